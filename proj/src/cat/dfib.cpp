#include "rmk/cat/dfib.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "rmk/cat/random.hpp"

namespace rmk::cat {

DFib::DFib(CatRef base, std::string name, std::vector<std::vector<std::string>> fibers,
           std::vector<std::vector<int>> restriction)
    : base_(std::move(base)), name_(std::move(name)), fibers_(std::move(fibers)), restriction_(std::move(restriction)) {
  const FinCat& b = *base_;
  if (static_cast<int>(fibers_.size()) != b.num_objects())
    throw LawError(LawKind::Malformed, name_ + ": one fiber per base object required");
  if (static_cast<int>(restriction_.size()) != b.num_arrows())
    throw LawError(LawKind::Malformed, name_ + ": one restriction per base arrow required");
  for (Arr f = 0; f < b.num_arrows(); ++f) {
    if (restriction_[f].size() != fibers_[b.tgt(f)].size())
      throw LawError(LawKind::Malformed, name_ + ": restriction along " + b.arrow_name(f) + " has the wrong size",
                     {b.arrow_name(f)});
    for (int v : restriction_[f])
      if (v < 0 || v >= static_cast<int>(fibers_[b.src(f)].size()))
        throw LawError(LawKind::Malformed, name_ + ": restriction along " + b.arrow_name(f) + " leaves the fiber",
                       {b.arrow_name(f)});
  }
  offsets_.push_back(0);
  for (const auto& fib : fibers_) offsets_.push_back(offsets_.back() + static_cast<int>(fib.size()));
}

std::optional<int> DFib::find_element(Obj a, const std::string& name) const {
  for (int i = 0; i < fiber_size(a); ++i)
    if (fibers_[a][i] == name) return i;
  return std::nullopt;
}

Elem DFib::unflat(int k) const {
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), k);
  Obj a = static_cast<Obj>(it - offsets_.begin()) - 1;
  return {a, k - offsets_[a]};
}

void validate(const DFib& d) {
  const FinCat& b = *d.base();
  for (Obj a = 0; a < b.num_objects(); ++a)
    for (int i = 0; i < d.fiber_size(a); ++i)
      if (d.act(i, b.id(a)) != i)
        throw LawError(LawKind::NotDiscreteFibration,
                       d.name() + ": restriction along " + b.arrow_name(b.id(a)) + " moves " + d.element_name(a, i),
                       {d.element_name(a, i), b.arrow_name(b.id(a))});
  for (Arr g = 0; g < b.num_arrows(); ++g)
    for (Obj z = 0; z < b.num_objects(); ++z)
      for (Arr f : b.hom(z, b.src(g)))
        for (int e = 0; e < d.fiber_size(b.tgt(g)); ++e)
          if (d.act(e, b.compose(g, f)) != d.act(d.act(e, g), f))
            throw LawError(LawKind::NotDiscreteFibration,
                           d.name() + ": restriction of " + d.element_name(b.tgt(g), e) + " along " + b.arrow_name(g) +
                               " . " + b.arrow_name(f) + " is not functorial",
                           {d.element_name(b.tgt(g), e), b.arrow_name(g), b.arrow_name(f)});
}

DFib terminal_dfib(const CatRef& base) {
  std::vector<std::vector<std::string>> fibers(base->num_objects(), {"*"});
  std::vector<std::vector<int>> r(base->num_arrows(), {0});
  return DFib(base, "1", std::move(fibers), std::move(r));
}

DFib empty_dfib(const CatRef& base) {
  return DFib(base, "0", std::vector<std::vector<std::string>>(base->num_objects()),
              std::vector<std::vector<int>>(base->num_arrows()));
}

std::vector<std::vector<int>> complete_restrictions(const FinCat& b,
                                                    const std::vector<std::vector<std::string>>& fibers,
                                                    std::vector<std::vector<int>> r) {
  r.resize(b.num_arrows());
  std::vector<bool> known(b.num_arrows());
  for (Arr f = 0; f < b.num_arrows(); ++f) {
    if (b.is_identity(f)) {
      r[f].resize(fibers[b.tgt(f)].size());
      std::iota(r[f].begin(), r[f].end(), 0);
    }
    known[f] = b.is_identity(f) || !r[f].empty() || fibers[b.tgt(f)].empty();
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (Arr g = 0; g < b.num_arrows(); ++g) {
      if (!known[g]) continue;
      for (Obj z = 0; z < b.num_objects(); ++z)
        for (Arr f : b.hom(z, b.src(g))) {
          Arr h = b.compose(g, f);
          if (!known[f] || known[h]) continue;
          r[h].clear();
          for (int v : r[g]) r[h].push_back(r[f][v]);
          known[h] = changed = true;
        }
    }
  }
  for (Arr f = 0; f < b.num_arrows(); ++f)
    if (!known[f])
      throw LawError(LawKind::Malformed, "restriction along " + b.arrow_name(f) + " is not determined",
                     {b.arrow_name(f)});
  return r;
}

DFibMap make_map(DFibRef src, DFibRef tgt, std::vector<std::vector<int>> fn) {
  Functor id = identity_functor(src->base());
  return DFibMap{std::move(src), std::move(tgt), std::move(id), std::move(fn)};
}

DFibMap identity_map(const DFibRef& d) {
  std::vector<std::vector<int>> fn;
  for (Obj a = 0; a < d->base()->num_objects(); ++a) {
    fn.emplace_back(d->fiber_size(a));
    std::iota(fn.back().begin(), fn.back().end(), 0);
  }
  return make_map(d, d, std::move(fn));
}

DFibMap compose(const DFibMap& g, const DFibMap& f) {
  DFibMap h{f.src, g.tgt, compose(g.base, f.base), {}};
  for (Obj a = 0; a < static_cast<Obj>(f.fn.size()); ++a) {
    h.fn.emplace_back();
    for (int v : f.fn[a]) h.fn.back().push_back(g.fn[f.base(a)][v]);
  }
  return h;
}

bool operator==(const DFibMap& a, const DFibMap& b) {
  return a.src == b.src && a.tgt == b.tgt && a.base == b.base && a.fn == b.fn;
}

bool over_identity(const DFibMap& m) {
  const FinCat& b = *m.src->base();
  if (m.src->base() != m.tgt->base()) return false;
  for (Obj a = 0; a < b.num_objects(); ++a)
    if (m.base(a) != a) return false;
  for (Arr f = 0; f < b.num_arrows(); ++f)
    if (m.base.arr(f) != f) return false;
  return true;
}

void validate(const DFibMap& m) {
  const DFib& d = *m.src;
  const DFib& e = *m.tgt;
  const FinCat& b = *d.base();
  validate(m.base);
  if (m.base.src != d.base() || m.base.tgt != e.base())
    throw LawError(LawKind::Malformed, "map " + d.name() + " -> " + e.name() + " lies over a functor between other bases");
  if (static_cast<int>(m.fn.size()) != b.num_objects())
    throw LawError(LawKind::Malformed, "map " + d.name() + " -> " + e.name() + " has the wrong number of components");
  for (Obj a = 0; a < b.num_objects(); ++a) {
    if (static_cast<int>(m.fn[a].size()) != d.fiber_size(a))
      throw LawError(LawKind::Malformed, "component over " + b.object_name(a) + " has the wrong size");
    for (int v : m.fn[a])
      if (v < 0 || v >= e.fiber_size(m.base(a)))
        throw LawError(LawKind::Malformed, "component over " + b.object_name(a) + " leaves the fiber");
  }
  for (Arr f = 0; f < b.num_arrows(); ++f)
    for (int x = 0; x < d.fiber_size(b.tgt(f)); ++x)
      if (m.fn[b.src(f)][d.act(x, f)] != e.act(m.fn[b.tgt(f)][x], m.base.arr(f)))
        throw LawError(LawKind::NotNatural,
                       "map " + d.name() + " -> " + e.name() + " does not commute with restriction of " +
                           d.element_name(b.tgt(f), x) + " along " + b.arrow_name(f),
                       {d.element_name(b.tgt(f), x), b.arrow_name(f)});
}

bool is_iso(const DFibMap& m) {
  for (Obj a = 0; a < static_cast<Obj>(m.fn.size()); ++a) {
    if (m.tgt->fiber_size(m.base(a)) != m.src->fiber_size(a)) return false;
    std::set<int> img(m.fn[a].begin(), m.fn[a].end());
    if (static_cast<int>(img.size()) != m.src->fiber_size(a)) return false;
  }
  // A map over a non-bijective base functor is never invertible over it.
  return m.base.src == m.base.tgt && m.base == identity_functor(m.base.src);
}

Total total(const DFibRef& dref) {
  const DFib& d = *dref;
  const FinCat& b = *d.base();
  Total t;
  std::vector<std::string> objects;
  for (Obj a = 0; a < b.num_objects(); ++a) {
    t.offset.push_back(static_cast<int>(objects.size()));
    for (int i = 0; i < d.fiber_size(a); ++i) {
      objects.push_back(d.element_name(a, i) + "@" + b.object_name(a));
      t.elements.push_back({a, i});
    }
  }
  std::vector<Arrow> arrows;
  for (Arr f = 0; f < b.num_arrows(); ++f) {
    t.arrow_offset.push_back(static_cast<int>(arrows.size()));
    for (int e = 0; e < d.fiber_size(b.tgt(f)); ++e)
      arrows.push_back({b.arrow_name(f) + "@" + d.element_name(b.tgt(f), e), t.offset[b.src(f)] + d.act(e, f),
                        t.offset[b.tgt(f)] + e});
  }
  std::vector<Arr> ids;
  for (Obj x = 0; x < static_cast<Obj>(objects.size()); ++x) {
    Elem e = t.elements[x];
    ids.push_back(t.arrow_offset[b.id(e.obj)] + e.idx);
  }
  size_t n = arrows.size();
  std::vector<Arr> table(n * n, kNone);
  for (Arr g = 0; g < b.num_arrows(); ++g)
    for (int e2 = 0; e2 < d.fiber_size(b.tgt(g)); ++e2) {
      int e1 = d.act(e2, g);
      for (Obj z = 0; z < b.num_objects(); ++z)
        for (Arr f : b.hom(z, b.src(g)))
          table[static_cast<size_t>(t.arrow_offset[g] + e2) * n + t.arrow_offset[f] + e1] =
              t.arrow_offset[b.compose(g, f)] + e2;
    }
  auto cat = std::make_shared<const FinCat>("∫" + d.name(), std::move(objects), std::move(arrows), std::move(ids),
                                            std::move(table));
  t.cat = cat;
  t.proj = Functor{cat, d.base(), {}, {}};
  for (const Elem& e : t.elements) t.proj.on_obj.push_back(e.obj);
  for (Arr f = 0; f < b.num_arrows(); ++f)
    for (int e = 0; e < d.fiber_size(b.tgt(f)); ++e) t.proj.on_arr.push_back(f);
  return t;
}

Functor total_functor(const DFibMap& m, const Total& s, const Total& t) {
  Functor out{s.cat, t.cat, {}, {}};
  const FinCat& b = *m.src->base();
  for (const Elem& e : s.elements) out.on_obj.push_back(t.object(m(e)));
  for (Arr f = 0; f < b.num_arrows(); ++f)
    for (int e = 0; e < m.src->fiber_size(b.tgt(f)); ++e)
      out.on_arr.push_back(t.lift(m.base.arr(f), m.fn[b.tgt(f)][e]));
  return out;
}

void check_discrete_fibration(const Functor& p) {
  const FinCat& e = *p.src;
  const FinCat& b = *p.tgt;
  std::vector<std::vector<Arr>> into(e.num_objects());
  for (Arr g = 0; g < e.num_arrows(); ++g) into[e.tgt(g)].push_back(g);
  for (Obj x = 0; x < e.num_objects(); ++x)
    for (Obj a = 0; a < b.num_objects(); ++a)
      for (Arr f : b.hom(a, p(x))) {
        int lifts = 0;
        for (Arr g : into[x]) lifts += p.arr(g) == f;
        if (lifts != 1)
          throw LawError(LawKind::NotDiscreteFibration,
                         std::to_string(lifts) + " lifts of " + b.arrow_name(f) + " at " + e.object_name(x),
                         {e.object_name(x), b.arrow_name(f)});
      }
}

bool is_discrete_fibration(const Functor& p) {
  try {
    check_discrete_fibration(p);
    return true;
  } catch (const LawError&) {
    return false;
  }
}

DFib fibration_of(const Functor& p, const std::string& name) {
  check_discrete_fibration(p);
  const FinCat& e = *p.src;
  const FinCat& b = *p.tgt;
  std::vector<std::vector<std::string>> fibers(b.num_objects());
  std::vector<int> index(e.num_objects());
  for (Obj x = 0; x < e.num_objects(); ++x) {
    index[x] = static_cast<int>(fibers[p(x)].size());
    fibers[p(x)].push_back(e.object_name(x));
  }
  std::vector<std::vector<int>> r(b.num_arrows());
  for (Arr f = 0; f < b.num_arrows(); ++f) r[f].assign(fibers[b.tgt(f)].size(), 0);
  for (Arr g = 0; g < e.num_arrows(); ++g) r[p.arr(g)][index[e.tgt(g)]] = index[e.src(g)];
  return DFib(p.tgt, name, std::move(fibers), std::move(r));
}

OverTotal over_total(const DFibMap& g, const Total& tx) {
  const DFib& z = *g.src;
  const FinCat& b = *z.base();
  const FinCat& c = *tx.cat;
  OverTotal out;
  out.members.resize(c.num_objects());
  std::vector<std::vector<int>> pos(b.num_objects());
  std::vector<std::vector<std::string>> fibers(c.num_objects());
  for (Obj a = 0; a < b.num_objects(); ++a) {
    pos[a].resize(z.fiber_size(a));
    for (int i = 0; i < z.fiber_size(a); ++i) {
      Obj x = tx.object({a, g(a, i)});
      pos[a][i] = static_cast<int>(out.members[x].size());
      out.members[x].push_back(i);
      fibers[x].push_back(z.element_name(a, i));
    }
  }
  std::vector<std::vector<int>> r(c.num_arrows());
  for (Arr f = 0; f < b.num_arrows(); ++f)
    for (int e = 0; e < g.tgt->fiber_size(b.tgt(f)); ++e) {
      auto& row = r[tx.lift(f, e)];
      for (int i : out.members[tx.object({b.tgt(f), e})]) row.push_back(pos[b.src(f)][z.act(i, f)]);
    }
  out.fib = DFib(tx.cat, z.name(), std::move(fibers), std::move(r));
  return out;
}

Sigma sigma(const DFib& e, const DFibRef& yref, const Total& ty) {
  const DFib& y = *yref;
  const FinCat& b = *y.base();
  Sigma out;
  std::vector<std::vector<std::string>> fibers(b.num_objects());
  std::vector<std::vector<int>> start(b.num_objects());
  std::vector<std::vector<int>> to_y(b.num_objects());
  out.decode.resize(b.num_objects());
  for (Obj a = 0; a < b.num_objects(); ++a)
    for (int i = 0; i < y.fiber_size(a); ++i) {
      start[a].push_back(static_cast<int>(fibers[a].size()));
      Obj x = ty.object({a, i});
      for (int k = 0; k < e.fiber_size(x); ++k) {
        fibers[a].push_back("(" + y.element_name(a, i) + "," + e.element_name(x, k) + ")");
        out.decode[a].emplace_back(i, k);
        to_y[a].push_back(i);
      }
    }
  std::vector<std::vector<int>> r(b.num_arrows());
  for (Arr f = 0; f < b.num_arrows(); ++f)
    for (auto [i, k] : out.decode[b.tgt(f)])
      r[f].push_back(start[b.src(f)][y.act(i, f)] + e.act(k, ty.lift(f, i)));
  out.obj = std::make_shared<const DFib>(y.base(), "Σ" + e.name(), std::move(fibers), std::move(r));
  out.to_base = make_map(out.obj, yref, std::move(to_y));
  return out;
}

DFib yoneda(const CatRef& bref, Obj x) {
  const FinCat& b = *bref;
  std::vector<std::vector<std::string>> fibers(b.num_objects());
  std::vector<int> pos(b.num_arrows(), -1);
  for (Obj a = 0; a < b.num_objects(); ++a) {
    const auto& h = b.hom(a, x);
    for (size_t j = 0; j < h.size(); ++j) {
      fibers[a].push_back(b.arrow_name(h[j]));
      pos[h[j]] = static_cast<int>(j);
    }
  }
  std::vector<std::vector<int>> r(b.num_arrows());
  for (Arr f = 0; f < b.num_arrows(); ++f)
    for (Arr k : b.hom(b.tgt(f), x)) r[f].push_back(pos[b.compose(k, f)]);
  return DFib(bref, "y(" + b.object_name(x) + ")", std::move(fibers), std::move(r));
}

namespace {

int position(const std::vector<Arr>& v, Arr f) {
  auto it = std::find(v.begin(), v.end(), f);
  return it == v.end() ? -1 : static_cast<int>(it - v.begin());
}

// Depth-first search for maps d -> e over the identity. Assigning an element
// forces the images of all its restrictions, so only a few choices remain.
class MapSearch {
 public:
  MapSearch(const DFib& d, const DFib& e, const MapFilter& allowed, Rng* rng)
      : d_(d), e_(e), b_(*d.base()), allowed_(allowed), rng_(rng), into_(b_.num_objects()) {
    if (d.base()->num_objects() != e.base()->num_objects() || d.base()->num_arrows() != e.base()->num_arrows())
      throw LawError(LawKind::Malformed, "maps between fibrations over different bases");
    for (Arr f = 0; f < b_.num_arrows(); ++f)
      if (!b_.is_identity(f)) into_[b_.tgt(f)].push_back(f);
    for (Obj a = 0; a < b_.num_objects(); ++a) m_.emplace_back(d.fiber_size(a), -1);
  }

  // False if the visitor stopped the search.
  bool run(const MapVisitor& visit) { return dfs(0, visit); }

 private:
  const DFib& d_;
  const DFib& e_;
  const FinCat& b_;
  const MapFilter& allowed_;
  Rng* rng_;
  std::vector<std::vector<Arr>> into_;
  std::vector<std::vector<int>> m_;
  std::vector<Elem> trail_;

  bool assign(Obj a, int i, int v) {
    if (m_[a][i] != -1) return m_[a][i] == v;
    if (allowed_ && !allowed_(a, i, v)) return false;
    m_[a][i] = v;
    trail_.push_back({a, i});
    for (Arr f : into_[a])
      if (!assign(b_.src(f), d_.act(i, f), e_.act(v, f))) return false;
    return true;
  }

  void undo(size_t mark) {
    while (trail_.size() > mark) {
      m_[trail_.back().obj][trail_.back().idx] = -1;
      trail_.pop_back();
    }
  }

  bool dfs(int k, const MapVisitor& visit) {
    while (k < d_.total_size()) {
      Elem x = d_.unflat(k);
      if (m_[x.obj][x.idx] == -1) break;
      ++k;
    }
    if (k == d_.total_size()) return visit(m_);
    Elem x = d_.unflat(k);
    std::vector<int> values(e_.fiber_size(x.obj));
    std::iota(values.begin(), values.end(), 0);
    if (rng_)
      for (size_t i = values.size(); i > 1; --i) std::swap(values[i - 1], values[rng_->below(static_cast<int>(i))]);
    for (int v : values) {
      size_t mark = trail_.size();
      if (assign(x.obj, x.idx, v) && !dfs(k + 1, visit)) {
        undo(mark);
        return false;
      }
      undo(mark);
    }
    return true;
  }
};

}  // namespace

int yoneda_element(const DFibMap& m, Obj x) {
  const FinCat& b = *m.src->base();
  return m.fn[x][position(b.hom(x, x), b.id(x))];
}

DFibMap yoneda_map(const DFibRef& slice, const DFibRef& d, Obj x, int e) {
  const FinCat& b = *d->base();
  std::vector<std::vector<int>> fn(b.num_objects());
  for (Obj a = 0; a < b.num_objects(); ++a)
    for (Arr k : b.hom(a, x)) fn[a].push_back(d->act(e, k));
  return make_map(slice, d, std::move(fn));
}

YonedaReport yoneda_bijection(const CatRef& b, Obj x, const DFibRef& d) {
  DFib slice = yoneda(b, x);
  int at = position(b->hom(x, x), b->id(x));
  std::set<int> values;
  YonedaReport r;
  r.fiber = d->fiber_size(x);
  for_each_map(slice, *d, [&](const std::vector<std::vector<int>>& m) {
    ++r.maps;
    values.insert(m[x][at]);
    return true;
  });
  r.bijective = r.maps == r.fiber && values.size() == r.fiber;
  return r;
}

void for_each_map(const DFib& d, const DFib& e, const MapVisitor& visit, const MapFilter& allowed) {
  MapSearch(d, e, allowed, nullptr).run(visit);
}

size_t count_maps(const DFib& d, const DFib& e, const MapFilter& allowed) {
  size_t n = 0;
  for_each_map(
      d, e,
      [&](const std::vector<std::vector<int>>&) {
        ++n;
        return true;
      },
      allowed);
  return n;
}

std::vector<DFibMap> all_maps(const DFibRef& d, const DFibRef& e, size_t cap) {
  std::vector<DFibMap> out;
  for_each_map(*d, *e, [&](const std::vector<std::vector<int>>& m) {
    if (out.size() >= cap) throw Overflow("more than " + std::to_string(cap) + " maps");
    out.push_back(make_map(d, e, m));
    return true;
  });
  return out;
}

size_t count_maps_over(const DFibMap& p, const DFibMap& q) {
  return count_maps(*p.src, *q.src, [&](Obj a, int i, int v) { return q.fn[a][v] == p.fn[a][i]; });
}

std::optional<DFibMap> random_map(Rng& rng, const DFibRef& d, const DFibRef& e, const MapFilter& allowed) {
  std::optional<DFibMap> out;
  MapSearch(*d, *e, allowed, &rng).run([&](const std::vector<std::vector<int>>& m) {
    out = make_map(d, e, m);
    return false;
  });
  return out;
}

std::optional<DFibMap> find_isomorphism(const DFibRef& d, const DFibRef& e) {
  const FinCat& b = *d->base();
  for (Obj a = 0; a < b.num_objects(); ++a)
    if (d->fiber_size(a) != e->fiber_size(a)) return std::nullopt;
  std::optional<DFibMap> out;
  for_each_map(*d, *e, [&](const std::vector<std::vector<int>>& m) {
    for (const auto& row : m)
      if (std::set<int>(row.begin(), row.end()).size() != row.size()) return true;
    out = make_map(d, e, m);
    return false;
  });
  return out;
}

DFib base_change(const DFib& d, const Functor& f, const CatRef& new_base) {
  const FinCat& b = *new_base;
  std::vector<std::vector<std::string>> fibers;
  for (Obj a = 0; a < b.num_objects(); ++a) fibers.push_back(d.fiber(f(a)));
  std::vector<std::vector<int>> r;
  for (Arr g = 0; g < b.num_arrows(); ++g) r.push_back(d.restriction(f.arr(g)));
  return DFib(new_base, d.name() + "*", std::move(fibers), std::move(r));
}

bool base_change_is_pullback(const DFib& d, const Functor& f, const DFib& fd) {
  const FinCat& b2 = *f.src;
  const FinCat& b = *f.tgt;
  // Objects of the pullback of categories: (a', e) with e over F a'.
  for (Obj a = 0; a < b2.num_objects(); ++a) {
    if (fd.fiber_size(a) != d.fiber_size(f(a))) return false;
    if (fd.fiber(a) != d.fiber(f(a))) return false;
  }
  // Arrows: (g', lift of F g' at e); both sides must restrict alike.
  for (Arr g = 0; g < b2.num_arrows(); ++g) {
    if (b.src(f.arr(g)) != f(b2.src(g)) || b.tgt(f.arr(g)) != f(b2.tgt(g))) return false;
    for (int e = 0; e < fd.fiber_size(b2.tgt(g)); ++e)
      if (fd.act(e, g) != d.act(e, f.arr(g))) return false;
  }
  return true;
}

Transport transport_along_nat(const NatTrans& s, const DFibRef& d) {
  validate(s);
  const FinCat& b2 = *s.from.src;
  Transport t;
  t.fd = std::make_shared<const DFib>(base_change(*d, s.from));
  t.gd = std::make_shared<const DFib>(base_change(*d, s.to));
  std::vector<std::vector<int>> fn(b2.num_objects());
  for (Obj a = 0; a < b2.num_objects(); ++a)
    for (int e = 0; e < t.gd->fiber_size(a); ++e) fn[a].push_back(d->act(e, s.component[a]));
  t.sigma_star = make_map(t.gd, t.fd, std::move(fn));
  // An overlay at e is an arrow of ∫D from m(e) to e lying over σ_a.
  Total td = total(d);
  for_each_map(*t.gd, *t.fd, [&](const std::vector<std::vector<int>>& m) {
    for (Obj a = 0; a < b2.num_objects(); ++a)
      for (int e = 0; e < t.gd->fiber_size(a); ++e) {
        Obj from = td.object({s.from(a), m[a][e]});
        Obj to = td.object({s.to(a), e});
        int n = 0;
        for (Arr g : td.cat->hom(from, to)) n += td.proj.arr(g) == s.component[a];
        if (n != 1) return true;
      }
    ++t.overlay_candidates;
    return true;
  });
  return t;
}

FibPullback pullback(const DFibMap& f, const DFibMap& g) {
  const DFib& a = *f.src;
  const DFib& bb = *g.src;
  const FinCat& b = *a.base();
  std::vector<std::vector<std::string>> fibers(b.num_objects());
  std::vector<std::vector<int>> f1(b.num_objects()), f2(b.num_objects());
  std::vector<std::map<std::pair<int, int>, int>> index(b.num_objects());
  for (Obj o = 0; o < b.num_objects(); ++o)
    for (int i = 0; i < a.fiber_size(o); ++i)
      for (int j = 0; j < bb.fiber_size(o); ++j)
        if (f.fn[o][i] == g.fn[o][j]) {
          index[o][{i, j}] = static_cast<int>(fibers[o].size());
          fibers[o].push_back("(" + a.element_name(o, i) + "," + bb.element_name(o, j) + ")");
          f1[o].push_back(i);
          f2[o].push_back(j);
        }
  std::vector<std::vector<int>> r(b.num_arrows());
  for (Arr h = 0; h < b.num_arrows(); ++h)
    for (size_t k = 0; k < fibers[b.tgt(h)].size(); ++k)
      r[h].push_back(index[b.src(h)].at({a.act(f1[b.tgt(h)][k], h), bb.act(f2[b.tgt(h)][k], h)}));
  FibPullback out;
  out.obj = std::make_shared<const DFib>(a.base(), a.name() + "×" + bb.name(), std::move(fibers), std::move(r));
  out.p1 = make_map(out.obj, f.src, std::move(f1));
  out.p2 = make_map(out.obj, g.src, std::move(f2));
  return out;
}

FibPullback product(const DFibRef& a, const DFibRef& b) {
  auto one = std::make_shared<const DFib>(terminal_dfib(a->base()));
  auto bang = [&](const DFibRef& d) {
    std::vector<std::vector<int>> fn;
    for (Obj o = 0; o < d->base()->num_objects(); ++o) fn.emplace_back(d->fiber_size(o), 0);
    return make_map(d, one, std::move(fn));
  };
  return pullback(bang(a), bang(b));
}

std::optional<RightAdjoint> right_adjoint(const DFibMap& u, Elem* failure) {
  const DFib& x = *u.src;
  const DFib& y = *u.tgt;
  const FinCat& b = *x.base();
  RightAdjoint ra;
  ra.value.resize(b.num_objects());
  ra.counit.resize(b.num_objects());
  struct CommaObj {
    Obj c;
    int x;
    Arr g;
  };
  for (Obj o = 0; o < b.num_objects(); ++o)
    for (int yi = 0; yi < y.fiber_size(o); ++yi) {
      std::vector<CommaObj> comma;
      for (Obj c = 0; c < b.num_objects(); ++c)
        for (int xi = 0; xi < x.fiber_size(c); ++xi)
          for (Arr g : b.hom(c, o))
            if (y.act(yi, g) == u.fn[c][xi]) comma.push_back({c, xi, g});
      bool found = false;
      for (const auto& t : comma) {
        bool terminal = true;
        for (const auto& s : comma) {
          int n = 0;
          for (Arr k : b.hom(s.c, t.c)) n += x.act(t.x, k) == s.x && b.compose(t.g, k) == s.g;
          if (n != 1) {
            terminal = false;
            break;
          }
        }
        if (terminal) {
          ra.value[o].push_back({t.c, t.x});
          ra.counit[o].push_back(t.g);
          found = true;
          break;
        }
      }
      if (!found) {
        if (failure) *failure = {o, yi};
        return std::nullopt;
      }
    }
  return ra;
}

bool is_representable(const DFibMap& u) { return right_adjoint(u).has_value(); }

Arr unit_arrow(const DFibMap& u, const RightAdjoint& ra, Elem x) {
  const FinCat& b = *u.src->base();
  Elem y = u(x);
  Elem g = ra(y);
  Arr g0 = ra.counit[y.obj][y.idx];
  for (Arr k : b.hom(x.obj, g.obj))
    if (u.src->act(g.idx, k) == x.idx && b.compose(g0, k) == b.id(x.obj)) return k;
  throw LawError(LawKind::MissingAdjoint, "no unit at " + u.src->element_name(x.obj, x.idx));
}

Functor adjoint_functor(const DFibMap& u, const RightAdjoint& ra, const Total& tx, const Total& ty) {
  const DFib& x = *u.src;
  const DFib& y = *u.tgt;
  const FinCat& b = *x.base();
  Functor g{ty.cat, tx.cat, {}, {}};
  for (const Elem& e : ty.elements) g.on_obj.push_back(tx.object(ra(e)));
  for (Arr f = 0; f < b.num_arrows(); ++f)
    for (int yi = 0; yi < y.fiber_size(b.tgt(f)); ++yi) {
      Elem hi{b.tgt(f), yi};
      Elem lo{b.src(f), y.act(yi, f)};
      Elem ghi = ra(hi), glo = ra(lo);
      Arr ghi_c = ra.counit[hi.obj][hi.idx], glo_c = ra.counit[lo.obj][lo.idx];
      Arr found = kNone;
      for (Arr k : b.hom(glo.obj, ghi.obj))
        if (x.act(ghi.idx, k) == glo.idx && b.compose(ghi_c, k) == b.compose(f, glo_c)) {
          found = k;
          break;
        }
      if (found == kNone) throw LawError(LawKind::MissingAdjoint, "right adjoint undefined on " + b.arrow_name(f));
      g.on_arr.push_back(tx.lift(found, ghi.idx));
    }
  return g;
}

bool verify_adjunction(const DFibMap& u, const RightAdjoint& ra) {
  const DFib& x = *u.src;
  const DFib& y = *u.tgt;
  const FinCat& b = *x.base();
  for (Obj c = 0; c < b.num_objects(); ++c)
    for (int xi = 0; xi < x.fiber_size(c); ++xi)
      for (Obj o = 0; o < b.num_objects(); ++o)
        for (int yi = 0; yi < y.fiber_size(o); ++yi) {
          std::set<Arr> lhs;
          for (Arr g : b.hom(c, o))
            if (y.act(yi, g) == u.fn[c][xi]) lhs.insert(g);
          Elem gy = ra({o, yi});
          Arr eps = ra.counit[o][yi];
          std::set<Arr> image;
          size_t n = 0;
          for (Arr k : b.hom(c, gy.obj))
            if (x.act(gy.idx, k) == xi) {
              ++n;
              image.insert(b.compose(eps, k));
            }
          if (image != lhs || n != lhs.size()) return false;
        }
  return true;
}

Extension context_extension(const DFibMap&, const RightAdjoint& ra, Elem y) {
  Elem g = ra(y);
  return {g.obj, ra.counit[y.obj][y.idx], g.idx};
}

bool extension_is_pullback(const DFibMap& u, Elem y, const Extension& ext) {
  const DFib& x = *u.src;
  const DFib& yy = *u.tgt;
  const FinCat& b = *x.base();
  if (yy.act(y.idx, ext.pi) != u.fn[ext.object][ext.q]) return false;
  for (Obj a = 0; a < b.num_objects(); ++a) {
    std::set<std::pair<Arr, int>> target;
    for (Arr k : b.hom(a, y.obj))
      for (int xi = 0; xi < x.fiber_size(a); ++xi)
        if (yy.act(y.idx, k) == u.fn[a][xi]) target.insert({k, xi});
    std::set<std::pair<Arr, int>> image;
    for (Arr m : b.hom(a, ext.object)) image.insert({b.compose(ext.pi, m), x.act(ext.q, m)});
    if (image != target || b.hom(a, ext.object).size() != target.size()) return false;
  }
  return true;
}

std::optional<Elem> representing_element(const DFib& d) {
  const FinCat& b = *d.base();
  for (Obj o = 0; o < b.num_objects(); ++o)
    for (int e = 0; e < d.fiber_size(o); ++e) {
      bool ok = true;
      for (Obj a = 0; a < b.num_objects() && ok; ++a) {
        std::set<int> img;
        for (Arr k : b.hom(a, o)) img.insert(d.act(e, k));
        ok = img.size() == b.hom(a, o).size() && static_cast<int>(img.size()) == d.fiber_size(a);
      }
      if (ok) return Elem{o, e};
    }
  return std::nullopt;
}

bool terminal_map_representable(const DFibRef& d) {
  auto one = std::make_shared<const DFib>(terminal_dfib(d->base()));
  std::vector<std::vector<int>> fn;
  for (Obj a = 0; a < d->base()->num_objects(); ++a) fn.emplace_back(d->fiber_size(a), 0);
  return is_representable(make_map(d, one, std::move(fn)));
}

Pushforward pushforward(const DFibMap& u, const RightAdjoint& ra, const DFibMap& g) {
  const FinCat& b = *u.src->base();
  Total tx = total(u.src);
  Total ty = total(u.tgt);
  Functor gu = adjoint_functor(u, ra, tx, ty);
  OverTotal ot = over_total(g, tx);
  DFib bc = base_change(ot.fib, gu, ty.cat);
  Sigma sg = sigma(bc, u.tgt, ty);
  Pushforward pf;
  pf.obj = sg.obj;
  pf.to_y = sg.to_base;
  pf.pulled = pullback(u, pf.to_y);
  std::vector<std::vector<int>> ev(b.num_objects());
  for (Obj a = 0; a < b.num_objects(); ++a)
    for (int k = 0; k < pf.pulled.obj->fiber_size(a); ++k) {
      int xi = pf.pulled.p1.fn[a][k];
      auto [yi, e] = sg.decode[a][pf.pulled.p2.fn[a][k]];
      int z = ot.members[gu(ty.object({a, yi}))][e];
      ev[a].push_back(g.src->act(z, unit_arrow(u, ra, {a, xi})));
    }
  pf.eval = make_map(pf.pulled.obj, g.src, std::move(ev));
  pf.decode.resize(b.num_objects());
  for (Obj a = 0; a < b.num_objects(); ++a)
    for (auto [yi, e] : sg.decode[a]) pf.decode[a].emplace_back(yi, ot.members[gu(ty.object({a, yi}))][e]);
  return pf;
}

UmpCounts pushforward_ump(const DFibMap& u, const DFibMap& g, const Pushforward& pf, const DFibMap& w) {
  UmpCounts c;
  FibPullback uw = pullback(u, w);
  c.lhs = count_maps_over(uw.p1, g);
  c.rhs = count_maps_over(w, pf.to_y);
  return c;
}

Polynomial polynomial(const DFibMap& u, const RightAdjoint& ra, const DFibRef& a) {
  FibPullback xa = product(u.src, a);
  Pushforward pf = pushforward(u, ra, xa.p1);
  Polynomial p;
  p.obj = pf.obj;
  p.decode.resize(pf.decode.size());
  for (Obj o = 0; o < static_cast<Obj>(pf.decode.size()); ++o)
    for (auto [yi, z] : pf.decode[o]) p.decode[o].emplace_back(yi, xa.p2.fn[ra({o, yi}).obj][z]);
  return p;
}

bool commutes(const Square& s) {
  const FinCat& b = *s.top.src->base();
  for (Obj a = 0; a < b.num_objects(); ++a)
    for (int i = 0; i < s.top.src->fiber_size(a); ++i)
      if (s.right.fn[a][s.top.fn[a][i]] != s.bottom.fn[a][s.left.fn[a][i]]) return false;
  return true;
}

bool is_pullback_square(const Square& s) {
  const FinCat& b = *s.top.src->base();
  for (Obj a = 0; a < b.num_objects(); ++a) {
    std::set<std::pair<int, int>> image;
    for (int i = 0; i < s.top.src->fiber_size(a); ++i) image.insert({s.top.fn[a][i], s.left.fn[a][i]});
    size_t pairs = 0;
    for (int x = 0; x < s.top.tgt->fiber_size(a); ++x)
      for (int y = 0; y < s.left.tgt->fiber_size(a); ++y) pairs += s.right.fn[a][x] == s.bottom.fn[a][y];
    if (image.size() != static_cast<size_t>(s.top.src->fiber_size(a)) || image.size() != pairs) return false;
  }
  return true;
}

NatTrans canonical_mate(const Square& s) {
  Elem bad;
  auto ra_r = right_adjoint(s.right, &bad);
  if (!ra_r)
    throw LawError(LawKind::MissingAdjoint, s.right.src->name() + " -> " + s.right.tgt->name() + " is not representable",
                   {s.right.tgt->element_name(bad.obj, bad.idx)});
  auto ra_l = right_adjoint(s.left, &bad);
  if (!ra_l)
    throw LawError(LawKind::MissingAdjoint, s.left.src->name() + " -> " + s.left.tgt->name() + " is not representable",
                   {s.left.tgt->element_name(bad.obj, bad.idx)});
  Total tx2 = total(s.left.src), ty2 = total(s.left.tgt);
  Total tx = total(s.right.src), ty = total(s.right.tgt);
  Functor g2 = adjoint_functor(s.left, *ra_l, tx2, ty2);
  Functor g = adjoint_functor(s.right, *ra_r, tx, ty);
  Functor v = total_functor(s.top, tx2, tx);
  Functor w = total_functor(s.bottom, ty2, ty);
  NatTrans mate{compose(v, g2), compose(g, w), {}};
  for (Obj yo = 0; yo < ty2.cat->num_objects(); ++yo) {
    Elem y2 = ty2.element(yo);
    Arr eps2 = ty2.lift(ra_l->counit[y2.obj][y2.idx], y2.idx);
    Elem x = tx.element(v(g2(yo)));
    Elem gx = (*ra_r)(s.right(x));
    Arr eta = tx.lift(unit_arrow(s.right, *ra_r, x), gx.idx);
    mate.component.push_back(tx.cat->compose(g.arr(w.arr(eps2)), eta));
  }
  return mate;
}

bool beck_chevalley(const Square& s) {
  NatTrans m = canonical_mate(s);
  const FinCat& c = *m.from.tgt;
  for (Arr a : m.component)
    if (!c.is_iso(a)) return false;
  return true;
}

PullbackBC pullback_iff_bc(const Square& s) {
  PullbackBC r;
  r.is_pullback = is_pullback_square(s);
  r.bc = beck_chevalley(s);
  r.agree = r.is_pullback == r.bc;
  return r;
}

}  // namespace rmk::cat
