#include "rmk/cat/fincat.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace rmk::cat {

const char* to_string(LawKind k) {
  switch (k) {
    case LawKind::Malformed: return "Malformed";
    case LawKind::NonAssociative: return "NonAssociative";
    case LawKind::IdentityLaw: return "IdentityLaw";
    case LawKind::NotFunctorial: return "NotFunctorial";
    case LawKind::NotNatural: return "NotNatural";
    case LawKind::NotDiscreteFibration: return "NotDiscreteFibration";
    case LawKind::NotCartesian: return "NotCartesian";
    case LawKind::ClassNotClosed: return "ClassNotClosed";
    case LawKind::NotStable: return "NotStable";
    case LawKind::PushforwardUMPFails: return "PushforwardUMPFails";
    case LawKind::NotExponentiable: return "NotExponentiable";
    case LawKind::MissingAdjoint: return "MissingAdjoint";
    case LawKind::NoTerminal: return "NoTerminal";
    case LawKind::NotRMFunctor: return "NotRMFunctor";
    case LawKind::NotRepresentable: return "NotRepresentable";
    case LawKind::BCFails: return "BCFails";
    case LawKind::NoOverlay: return "NoOverlay";
  }
  return "?";
}

FinCat::FinCat(std::string name, std::vector<std::string> objects, std::vector<Arrow> arrows,
               std::vector<Arr> identities, std::vector<Arr> table)
    : name_(std::move(name)),
      objects_(std::move(objects)),
      arrows_(std::move(arrows)),
      identities_(std::move(identities)),
      table_(std::move(table)) {
  if (identities_.size() != objects_.size())
    throw LawError(LawKind::Malformed, "one identity per object required");
  if (table_.size() != arrows_.size() * arrows_.size())
    throw LawError(LawKind::Malformed, "composition table has the wrong size");
  size_t n = objects_.size();
  homs_.assign(n * n, {});
  for (Arr f = 0; f < num_arrows(); ++f) {
    const Arrow& a = arrows_[f];
    if (a.src < 0 || a.tgt < 0 || a.src >= num_objects() || a.tgt >= num_objects())
      throw LawError(LawKind::Malformed, "arrow " + a.name + " has an unknown endpoint", {a.name});
    homs_[static_cast<size_t>(a.src) * n + a.tgt].push_back(f);
  }
}

std::optional<Obj> FinCat::find_object(const std::string& name) const {
  for (Obj a = 0; a < num_objects(); ++a)
    if (objects_[a] == name) return a;
  return std::nullopt;
}

std::optional<Arr> FinCat::find_arrow(const std::string& name) const {
  for (Arr f = 0; f < num_arrows(); ++f)
    if (arrows_[f].name == name) return f;
  return std::nullopt;
}

Obj FinCat::object(const std::string& name) const {
  if (auto a = find_object(name)) return *a;
  throw std::out_of_range("no object named " + name + " in " + name_);
}

Arr FinCat::arrow_named(const std::string& name) const {
  if (auto f = find_arrow(name)) return *f;
  throw std::out_of_range("no arrow named " + name + " in " + name_);
}

std::optional<Arr> FinCat::inverse(Arr f) const {
  for (Arr g : hom(tgt(f), src(f)))
    if (compose(g, f) == id(src(f)) && compose(f, g) == id(tgt(f))) return g;
  return std::nullopt;
}

bool FinCat::isomorphic(Obj a, Obj b) const {
  for (Arr f : hom(a, b))
    if (is_iso(f)) return true;
  return false;
}

bool FinCat::is_thin() const {
  for (const auto& h : homs_)
    if (h.size() > 1) return false;
  return true;
}

void validate(const FinCat& c) {
  std::set<std::string> names;
  for (const auto& o : c.objects())
    if (!names.insert(o).second) throw LawError(LawKind::Malformed, "duplicate object " + o, {o});
  names.clear();
  for (const auto& a : c.arrows())
    if (!names.insert(a.name).second) throw LawError(LawKind::Malformed, "duplicate arrow " + a.name, {a.name});
  for (Obj a = 0; a < c.num_objects(); ++a) {
    Arr i = c.id(a);
    if (i < 0 || i >= c.num_arrows() || c.src(i) != a || c.tgt(i) != a)
      throw LawError(LawKind::IdentityLaw, "identity of " + c.object_name(a) + " is not an endo-arrow",
                     {c.object_name(a)});
  }
  int n = c.num_arrows();
  for (Arr f = 0; f < n; ++f)
    for (Arr g = 0; g < n; ++g) {
      if (c.tgt(f) != c.src(g)) continue;
      Arr h = c.compose(g, f);
      if (h < 0 || h >= n || c.src(h) != c.src(f) || c.tgt(h) != c.tgt(g))
        throw LawError(LawKind::Malformed,
                       "composite " + c.arrow_name(g) + " . " + c.arrow_name(f) + " is missing or ill-typed",
                       {c.arrow_name(g), c.arrow_name(f)});
    }
  for (Arr f = 0; f < n; ++f) {
    if (c.compose(f, c.id(c.src(f))) != f || c.compose(c.id(c.tgt(f)), f) != f)
      throw LawError(LawKind::IdentityLaw, "identities are not neutral for " + c.arrow_name(f),
                     {c.arrow_name(f)});
  }
  for (Arr f = 0; f < n; ++f)
    for (Obj b = 0; b < c.num_objects(); ++b)
      for (Arr g : c.hom(c.tgt(f), b))
        for (Obj d = 0; d < c.num_objects(); ++d)
          for (Arr h : c.hom(b, d))
            if (c.compose(h, c.compose(g, f)) != c.compose(c.compose(h, g), f))
              throw LawError(LawKind::NonAssociative,
                             "(" + c.arrow_name(h) + " . " + c.arrow_name(g) + ") . " + c.arrow_name(f) +
                                 " differs from " + c.arrow_name(h) + " . (" + c.arrow_name(g) + " . " +
                                 c.arrow_name(f) + ")",
                             {c.arrow_name(f), c.arrow_name(g), c.arrow_name(h)});
}

Obj FinCatBuilder::add_object(const std::string& name) {
  if (std::find(objects_.begin(), objects_.end(), name) != objects_.end())
    throw LawError(LawKind::Malformed, "duplicate object " + name, {name});
  objects_.push_back(name);
  return static_cast<Obj>(objects_.size()) - 1;
}

Arr FinCatBuilder::add_arrow(const std::string& name, Obj src, Obj tgt) {
  for (const auto& a : arrows_)
    if (a.name == name) throw LawError(LawKind::Malformed, "duplicate arrow " + name, {name});
  for (const auto& o : objects_)
    if ("id_" + o == name) throw LawError(LawKind::Malformed, "arrow name " + name + " is reserved", {name});
  if (src < 0 || tgt < 0 || src >= num_objects() || tgt >= num_objects())
    throw LawError(LawKind::Malformed, "arrow " + name + " has an unknown endpoint", {name});
  arrows_.push_back({name, src, tgt});
  return static_cast<Arr>(objects_.size() + arrows_.size()) - 1;
}

Arr FinCatBuilder::add_arrow(const std::string& name, const std::string& src, const std::string& tgt) {
  return add_arrow(name, object_index(src), object_index(tgt));
}

Obj FinCatBuilder::object_index(const std::string& name) const {
  auto it = std::find(objects_.begin(), objects_.end(), name);
  if (it == objects_.end()) throw LawError(LawKind::Malformed, "unknown object " + name, {name});
  return static_cast<Obj>(it - objects_.begin());
}

Arr FinCatBuilder::arrow_index(const std::string& name) const {
  for (size_t i = 0; i < objects_.size(); ++i)
    if ("id_" + objects_[i] == name) return static_cast<Arr>(i);
  for (size_t i = 0; i < arrows_.size(); ++i)
    if (arrows_[i].name == name) return static_cast<Arr>(objects_.size() + i);
  throw LawError(LawKind::Malformed, "unknown arrow " + name, {name});
}

void FinCatBuilder::set_composite(Arr g, Arr f, Arr h) { composites_.emplace_back(g, f, h); }

void FinCatBuilder::set_composite(const std::string& g, const std::string& f, const std::string& h) {
  set_composite(arrow_index(g), arrow_index(f), arrow_index(h));
}

FinCat FinCatBuilder::build() const {
  // Arrow numbering: identities first (in object order), then declared arrows.
  std::vector<Arrow> arrows;
  std::vector<Arr> ids;
  for (size_t i = 0; i < objects_.size(); ++i) {
    ids.push_back(static_cast<Arr>(i));
    arrows.push_back({"id_" + objects_[i], static_cast<Obj>(i), static_cast<Obj>(i)});
  }
  for (const auto& a : arrows_) arrows.push_back(a);
  size_t n = arrows.size();
  std::vector<Arr> table(n * n, kNone);
  auto is_id = [&](Arr f) { return f < static_cast<Arr>(objects_.size()); };
  for (const auto& [g, f, h] : composites_) {
    if (arrows[f].tgt != arrows[g].src)
      throw LawError(LawKind::Malformed,
                     "composite " + arrows[g].name + " . " + arrows[f].name + " of non-composable arrows",
                     {arrows[g].name, arrows[f].name});
    Arr& slot = table[static_cast<size_t>(g) * n + f];
    if (slot != kNone && slot != h)
      throw LawError(LawKind::Malformed, "composite " + arrows[g].name + " . " + arrows[f].name + " set twice",
                     {arrows[g].name, arrows[f].name});
    slot = h;
  }
  std::vector<std::vector<Arr>> homs(objects_.size() * objects_.size());
  for (Arr f = 0; f < static_cast<Arr>(n); ++f)
    homs[static_cast<size_t>(arrows[f].src) * objects_.size() + arrows[f].tgt].push_back(f);
  for (Arr f = 0; f < static_cast<Arr>(n); ++f)
    for (Arr g = 0; g < static_cast<Arr>(n); ++g) {
      if (arrows[f].tgt != arrows[g].src) continue;
      Arr& slot = table[static_cast<size_t>(g) * n + f];
      if (is_id(f) && slot == kNone) slot = g;
      if (is_id(g) && slot == kNone) slot = f;
      if (slot != kNone) continue;
      const auto& h = homs[static_cast<size_t>(arrows[f].src) * objects_.size() + arrows[g].tgt];
      if (h.size() == 1) {
        slot = h[0];
        continue;
      }
      throw LawError(LawKind::Malformed,
                     "composite " + arrows[g].name + " . " + arrows[f].name + " is not determined",
                     {arrows[g].name, arrows[f].name});
    }
  return FinCat(name_, objects_, std::move(arrows), std::move(ids), std::move(table));
}

FinCat terminal_category() {
  FinCatBuilder b("1");
  b.add_object("*");
  return b.build();
}

FinCat walking_arrow() {
  FinCatBuilder b("2");
  b.add_object("0");
  b.add_object("1");
  b.add_arrow("f", 0, 1);
  return b.build();
}

FinCat discrete_category(int n) {
  FinCatBuilder b("D" + std::to_string(n));
  for (int i = 0; i < n; ++i) b.add_object(std::to_string(i));
  return b.build();
}

FinCat preorder_category(const std::vector<std::string>& names, std::vector<std::vector<bool>> leq,
                         const std::string& name) {
  size_t n = names.size();
  for (size_t i = 0; i < n; ++i) leq[i][i] = true;
  for (size_t k = 0; k < n; ++k)
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        if (leq[i][k] && leq[k][j]) leq[i][j] = true;
  FinCatBuilder b(name);
  for (const auto& s : names) b.add_object(s);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      if (i != j && leq[i][j]) b.add_arrow(names[i] + "<=" + names[j], static_cast<Obj>(i), static_cast<Obj>(j));
  return b.build();
}

FinCat free_category(const std::vector<std::string>& names,
                     const std::vector<std::tuple<std::string, int, int>>& edges, const std::string& name) {
  // Paths as edge index lists in diagrammatic order.
  std::vector<std::vector<int>> paths;
  std::vector<std::vector<int>> frontier;
  for (size_t e = 0; e < edges.size(); ++e) frontier.push_back({static_cast<int>(e)});
  while (!frontier.empty()) {
    std::vector<std::vector<int>> next;
    for (auto& p : frontier) {
      paths.push_back(p);
      if (paths.size() > 100000) throw Overflow("free category has too many paths (graph not acyclic?)");
      int end = std::get<2>(edges[p.back()]);
      for (size_t e = 0; e < edges.size(); ++e)
        if (std::get<1>(edges[e]) == end) {
          auto q = p;
          q.push_back(static_cast<int>(e));
          next.push_back(std::move(q));
        }
    }
    frontier = std::move(next);
  }
  auto path_name = [&](const std::vector<int>& p) {
    std::string s;
    for (auto it = p.rbegin(); it != p.rend(); ++it) {
      if (!s.empty()) s += ".";
      s += std::get<0>(edges[*it]);
    }
    return s;
  };
  FinCatBuilder b(name);
  for (const auto& s : names) b.add_object(s);
  std::map<std::vector<int>, Arr> index;
  for (const auto& p : paths)
    index[p] = b.add_arrow(path_name(p), std::get<1>(edges[p.front()]), std::get<2>(edges[p.back()]));
  for (const auto& p : paths)
    for (const auto& q : paths) {
      if (std::get<2>(edges[p.back()]) != std::get<1>(edges[q.front()])) continue;
      auto pq = p;
      pq.insert(pq.end(), q.begin(), q.end());
      b.set_composite(index.at(q), index.at(p), index.at(pq));
    }
  return b.build();
}

void validate(const Functor& F) {
  const FinCat& c = *F.src;
  const FinCat& d = *F.tgt;
  if (static_cast<int>(F.on_obj.size()) != c.num_objects() || static_cast<int>(F.on_arr.size()) != c.num_arrows())
    throw LawError(LawKind::Malformed, "functor tables have the wrong size");
  for (Arr f = 0; f < c.num_arrows(); ++f) {
    Arr g = F.on_arr[f];
    if (g < 0 || g >= d.num_arrows() || d.src(g) != F(c.src(f)) || d.tgt(g) != F(c.tgt(f)))
      throw LawError(LawKind::NotFunctorial, "image of " + c.arrow_name(f) + " has the wrong endpoints",
                     {c.arrow_name(f)});
  }
  for (Obj a = 0; a < c.num_objects(); ++a)
    if (F.on_arr[c.id(a)] != d.id(F(a)))
      throw LawError(LawKind::NotFunctorial, "identity of " + c.object_name(a) + " not preserved",
                     {c.arrow_name(c.id(a))});
  for (Arr f = 0; f < c.num_arrows(); ++f)
    for (Obj b = 0; b < c.num_objects(); ++b)
      for (Arr g : c.hom(c.tgt(f), b))
        if (F.on_arr[c.compose(g, f)] != d.compose(F.on_arr[g], F.on_arr[f]))
          throw LawError(LawKind::NotFunctorial,
                         "composite " + c.arrow_name(g) + " . " + c.arrow_name(f) + " not preserved",
                         {c.arrow_name(f), c.arrow_name(g)});
}

Functor identity_functor(const CatRef& c) {
  Functor f{c, c, {}, {}};
  for (Obj a = 0; a < c->num_objects(); ++a) f.on_obj.push_back(a);
  for (Arr g = 0; g < c->num_arrows(); ++g) f.on_arr.push_back(g);
  return f;
}

Functor compose(const Functor& g, const Functor& f) {
  Functor h{f.src, g.tgt, {}, {}};
  for (Obj a : f.on_obj) h.on_obj.push_back(g.on_obj[a]);
  for (Arr x : f.on_arr) h.on_arr.push_back(g.on_arr[x]);
  return h;
}

bool operator==(const Functor& a, const Functor& b) {
  return a.src == b.src && a.tgt == b.tgt && a.on_obj == b.on_obj && a.on_arr == b.on_arr;
}

std::vector<Functor> all_functors(const CatRef& src, const CatRef& tgt, size_t cap) {
  const FinCat& c = *src;
  const FinCat& d = *tgt;
  std::vector<Functor> out;
  int no = c.num_objects();
  std::vector<Obj> obj(no, 0);
  std::vector<Arr> arr(c.num_arrows(), kNone);
  std::vector<Arr> order;
  for (Arr f = 0; f < c.num_arrows(); ++f)
    if (!c.is_identity(f)) order.push_back(f);

  std::function<void(size_t)> arrows = [&](size_t k) {
    if (k == order.size()) {
      if (out.size() >= cap) throw Overflow("more than " + std::to_string(cap) + " functors");
      out.push_back(Functor{src, tgt, obj, arr});
      return;
    }
    Arr f = order[k];
    for (Arr g : d.hom(obj[c.src(f)], obj[c.tgt(f)])) {
      arr[f] = g;
      bool ok = true;
      // Check every composable pair whose members and composite are assigned.
      for (Arr x = 0; x < c.num_arrows() && ok; ++x) {
        if (arr[x] == kNone) continue;
        for (Obj b = 0; b < c.num_objects() && ok; ++b)
          for (Arr y : c.hom(c.tgt(x), b)) {
            if (arr[y] == kNone) continue;
            Arr h = c.compose(y, x);
            if (arr[h] != kNone && arr[h] != d.compose(arr[y], arr[x])) {
              ok = false;
              break;
            }
          }
      }
      if (ok) arrows(k + 1);
    }
    arr[f] = kNone;
  };
  std::function<void(int)> objects = [&](int i) {
    if (i == no) {
      for (Obj a = 0; a < no; ++a) arr[c.id(a)] = d.id(obj[a]);
      arrows(0);
      for (Obj a = 0; a < no; ++a) arr[c.id(a)] = kNone;
      return;
    }
    for (Obj b = 0; b < d.num_objects(); ++b) {
      obj[i] = b;
      objects(i + 1);
    }
  };
  if (no == 0) {
    out.push_back(Functor{src, tgt, {}, {}});
    return out;
  }
  objects(0);
  return out;
}

void validate(const NatTrans& t) {
  validate(t.from);
  validate(t.to);
  if (t.from.src != t.to.src || t.from.tgt != t.to.tgt)
    throw LawError(LawKind::Malformed, "natural transformation between functors with different endpoints");
  const FinCat& c = *t.from.src;
  const FinCat& d = *t.from.tgt;
  if (static_cast<int>(t.component.size()) != c.num_objects())
    throw LawError(LawKind::Malformed, "wrong number of components");
  for (Obj a = 0; a < c.num_objects(); ++a) {
    Arr s = t.component[a];
    if (s < 0 || d.src(s) != t.from(a) || d.tgt(s) != t.to(a))
      throw LawError(LawKind::NotNatural, "component at " + c.object_name(a) + " has the wrong type",
                     {c.object_name(a)});
  }
  for (Arr f = 0; f < c.num_arrows(); ++f) {
    Obj a = c.src(f), b = c.tgt(f);
    if (d.compose(t.to.arr(f), t.component[a]) != d.compose(t.component[b], t.from.arr(f)))
      throw LawError(LawKind::NotNatural, "naturality square of " + c.arrow_name(f) + " does not commute",
                     {c.arrow_name(f)});
  }
}

NatTrans identity_nat(const Functor& f) {
  NatTrans t{f, f, {}};
  for (Obj a = 0; a < f.src->num_objects(); ++a) t.component.push_back(f.tgt->id(f(a)));
  return t;
}

std::vector<Cone> all_cones(const FinCat& c, const Diagram& d, size_t cap) {
  std::vector<Cone> out;
  size_t n = d.nodes.size();
  std::vector<Arr> legs(n, kNone);
  for (Obj apex = 0; apex < c.num_objects(); ++apex) {
    std::function<void(size_t)> go = [&](size_t i) {
      if (i == n) {
        if (out.size() >= cap) throw Overflow("more than " + std::to_string(cap) + " candidate cones");
        out.push_back({apex, legs});
        return;
      }
      for (Arr l : c.hom(apex, d.nodes[i])) {
        legs[i] = l;
        bool ok = true;
        for (const auto& e : d.edges) {
          if (static_cast<size_t>(e.from) > i || static_cast<size_t>(e.to) > i) continue;
          if (c.compose(e.arrow, legs[e.from]) != legs[e.to]) {
            ok = false;
            break;
          }
        }
        if (ok) go(i + 1);
      }
      legs[i] = kNone;
    };
    go(0);
  }
  return out;
}

std::vector<Arr> factorizations(const FinCat& c, const Cone& k, const Cone& l) {
  std::vector<Arr> out;
  for (Arr m : c.hom(k.apex, l.apex)) {
    bool ok = true;
    for (size_t i = 0; i < l.legs.size() && ok; ++i) ok = c.compose(l.legs[i], m) == k.legs[i];
    if (ok) out.push_back(m);
  }
  return out;
}

namespace {

bool universal_among(const FinCat& c, const Cone& l, const std::vector<Cone>& cones) {
  for (const auto& k : cones)
    if (factorizations(c, k, l).size() != 1) return false;
  return true;
}

}  // namespace

std::optional<Cone> finite_limit(const FinCat& c, const Diagram& d, size_t cap) {
  auto cones = all_cones(c, d, cap);
  for (const auto& l : cones)
    if (universal_among(c, l, cones)) return l;
  return std::nullopt;
}

bool is_limit(const FinCat& c, const Diagram& d, const Cone& l, size_t cap) {
  for (const auto& e : d.edges)
    if (c.compose(e.arrow, l.legs[e.from]) != l.legs[e.to]) return false;
  return universal_among(c, l, all_cones(c, d, cap));
}

std::optional<Cone> finite_limit(const Functor& diagram, size_t cap) {
  const FinCat& j = *diagram.src;
  Diagram d;
  for (Obj a = 0; a < j.num_objects(); ++a) d.nodes.push_back(diagram(a));
  for (Arr f = 0; f < j.num_arrows(); ++f)
    if (!j.is_identity(f)) d.edges.push_back({j.src(f), j.tgt(f), diagram.arr(f)});
  return finite_limit(*diagram.tgt, d, cap);
}

bool is_terminal(const FinCat& c, Obj t) {
  for (Obj a = 0; a < c.num_objects(); ++a)
    if (c.hom(a, t).size() != 1) return false;
  return true;
}

std::optional<Obj> terminal_object(const FinCat& c) {
  for (Obj t = 0; t < c.num_objects(); ++t)
    if (is_terminal(c, t)) return t;
  return std::nullopt;
}

std::optional<Cone> pullback(const FinCat& c, Arr f, Arr g) {
  if (c.tgt(f) != c.tgt(g)) throw LawError(LawKind::Malformed, "pullback of a non-cospan");
  Diagram d;
  d.nodes = {c.src(f), c.src(g), c.tgt(f)};
  d.edges = {{0, 2, f}, {1, 2, g}};
  auto l = finite_limit(c, d);
  if (!l) return l;
  l->legs.resize(2);
  return l;
}

bool is_pullback(const FinCat& c, Arr f, Arr g, Arr p1, Arr p2) {
  if (c.src(p1) != c.src(p2) || c.tgt(p1) != c.src(f) || c.tgt(p2) != c.src(g)) return false;
  if (c.compose(f, p1) != c.compose(g, p2)) return false;
  Diagram d;
  d.nodes = {c.src(f), c.src(g), c.tgt(f)};
  d.edges = {{0, 2, f}, {1, 2, g}};
  return is_limit(c, d, Cone{c.src(p1), {p1, p2, c.compose(f, p1)}});
}

std::optional<Cone> product(const FinCat& c, Obj a, Obj b) {
  Diagram d;
  d.nodes = {a, b};
  return finite_limit(c, d);
}

SubCategory slice(const CatRef& cref, Obj x) {
  const FinCat& c = *cref;
  std::vector<Arr> objs;
  for (Arr f = 0; f < c.num_arrows(); ++f)
    if (c.tgt(f) == x) objs.push_back(f);
  FinCatBuilder b(c.name() + "/" + c.object_name(x));
  for (Arr f : objs) b.add_object(c.arrow_name(f));
  struct SA {
    size_t from, to;
    Arr h;
    Arr index;
  };
  std::vector<SA> sas;
  std::vector<Arr> under;  // underlying arrow of each slice arrow, by index
  for (size_t i = 0; i < objs.size(); ++i) under.push_back(c.id(c.src(objs[i])));
  for (size_t i = 0; i < objs.size(); ++i)
    for (size_t j = 0; j < objs.size(); ++j)
      for (Arr h : c.hom(c.src(objs[i]), c.src(objs[j]))) {
        if (c.compose(objs[j], h) != objs[i]) continue;
        if (i == j && c.is_identity(h)) continue;
        Arr idx = b.add_arrow(c.arrow_name(h) + ":" + c.arrow_name(objs[i]) + "->" + c.arrow_name(objs[j]),
                              static_cast<Obj>(i), static_cast<Obj>(j));
        sas.push_back({i, j, h, idx});
        under.push_back(h);
      }
  for (const auto& p : sas)
    for (const auto& q : sas) {
      if (p.to != q.from) continue;
      Arr hk = c.compose(q.h, p.h);
      if (p.from == q.to && hk == c.id(c.src(objs[p.from]))) {
        b.set_composite(q.index, p.index, static_cast<Arr>(p.from));
        continue;
      }
      for (const auto& r : sas)
        if (r.from == p.from && r.to == q.to && r.h == hk) {
          b.set_composite(q.index, p.index, r.index);
          break;
        }
    }
  SubCategory out{b.build(), {}};
  auto sc = std::make_shared<const FinCat>(out.cat);
  out.inclusion.src = sc;
  out.inclusion.tgt = cref;
  for (Arr f : objs) out.inclusion.on_obj.push_back(c.src(f));
  out.inclusion.on_arr = under;
  return out;
}

SubCategory full_subcategory(const CatRef& cref, const std::vector<Obj>& objects, const std::string& name) {
  const FinCat& c = *cref;
  FinCatBuilder b(name.empty() ? c.name() + "|sub" : name);
  for (Obj a : objects) b.add_object(c.object_name(a));
  std::map<Arr, Arr> index;
  std::vector<Arr> under;
  for (Obj a : objects) under.push_back(c.id(a));
  for (size_t i = 0; i < objects.size(); ++i) index[c.id(objects[i])] = static_cast<Arr>(i);
  for (size_t i = 0; i < objects.size(); ++i)
    for (size_t j = 0; j < objects.size(); ++j)
      for (Arr f : c.hom(objects[i], objects[j])) {
        if (c.is_identity(f)) continue;
        index[f] = b.add_arrow(c.arrow_name(f), static_cast<Obj>(i), static_cast<Obj>(j));
        under.push_back(f);
      }
  for (const auto& [f, fi] : index)
    for (const auto& [g, gi] : index)
      if (c.tgt(f) == c.src(g)) b.set_composite(gi, fi, index.at(c.compose(g, f)));
  SubCategory out{b.build(), {}};
  out.inclusion.src = std::make_shared<const FinCat>(out.cat);
  out.inclusion.tgt = cref;
  out.inclusion.on_obj = objects;
  out.inclusion.on_arr = under;
  return out;
}

}  // namespace rmk::cat
