#include "rmk/io/formats.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace rmk::io {

using namespace rmk::cat;
namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == ',' || c == '{' || c == '}') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

// "kw rest" -> rest, or nullopt when the head does not start with kw.
std::optional<std::string> after(const std::string& head, const std::string& kw) {
  if (head == kw) return std::string();
  if (head.size() > kw.size() && head.compare(0, kw.size(), kw) == 0 &&
      (head[kw.size()] == ' ' || head[kw.size()] == '\t'))
    return trim(head.substr(kw.size()));
  return std::nullopt;
}

// "left : right"
std::pair<std::string, std::string> colon(const Source& src, const Block& b, const std::string& rest) {
  auto k = rest.find(':');
  if (k == std::string::npos) throw ParseError(src.file, b.line, "expected ':' in '" + b.head + "'");
  return {trim(rest.substr(0, k)), trim(rest.substr(k + 1))};
}

// "a -> b, c -> d"
std::vector<std::pair<std::string, std::string>> pairs(const Source& src, const Block& b, const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split(text, ',')) {
    auto k = item.find("->");
    if (k == std::string::npos) throw ParseError(src.file, b.line, "expected 'a -> b' in '" + item + "'");
    out.emplace_back(trim(item.substr(0, k)), trim(item.substr(k + 2)));
  }
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path resolve(const Source& src, const std::string& p) {
  fs::path q(p);
  return q.is_absolute() ? q : src.dir / q;
}

Obj object_of(const Source& src, const Block& b, const FinCat& c, const std::string& name) {
  auto o = c.find_object(name);
  if (!o) throw ParseError(src.file, b.line, "unknown object '" + name + "' of " + c.name());
  return *o;
}

Arr arrow_of(const Source& src, const Block& b, const FinCat& c, const std::string& name) {
  auto a = c.find_arrow(name);
  if (!a) throw ParseError(src.file, b.line, "unknown arrow '" + name + "' of " + c.name());
  return *a;
}

int element_of(const Source& src, const Block& b, const DFib& d, Obj o, const std::string& name) {
  auto e = d.find_element(o, name);
  if (!e)
    throw ParseError(src.file, b.line,
                     "no element '" + name + "' over " + d.base()->object_name(o) + " in " + d.name());
  return *e;
}

CatRef base_of(const Source& src, const Block& b) {
  auto rest = *after(b.head, "base");
  if (!rest.empty()) return load_fincat(resolve(src, rest));
  return std::make_shared<const FinCat>(parse_fincat(src, b.children));
}

// Maps over the identity given as `over OBJ : e -> e', ...` lines.
DFibMap parse_map(const Source& src, const Block& b, const DFibRef& from, const DFibRef& to) {
  const FinCat& base = *from->base();
  std::vector<std::vector<int>> fn(base.num_objects());
  std::vector<bool> seen(base.num_objects());
  for (const auto& line : b.children) {
    auto rest = after(line.head, "over");
    if (!rest) throw ParseError(src.file, line.line, "expected 'over OBJ : ...'");
    auto [obj, body] = colon(src, line, *rest);
    Obj o = object_of(src, line, base, obj);
    fn[o].assign(from->fiber_size(o), -1);
    seen[o] = true;
    for (const auto& [x, y] : pairs(src, line, body))
      fn[o][element_of(src, line, *from, o, x)] = element_of(src, line, *to, o, y);
  }
  for (Obj o = 0; o < base.num_objects(); ++o) {
    if (!seen[o]) fn[o].assign(from->fiber_size(o), -1);
    for (int i = 0; i < from->fiber_size(o); ++i)
      if (fn[o][i] < 0)
        throw ParseError(src.file, b.line,
                         "no image for " + from->element_name(o, i) + " over " + base.object_name(o));
  }
  return make_map(from, to, std::move(fn));
}

}  // namespace

Source parse_blocks(const std::string& text, const std::string& file, const fs::path& dir) {
  Source src{file, dir, {}};
  std::vector<std::pair<int, Block*>> stack;  // indentation, block
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    if (trim(raw).empty()) continue;
    int indent = 0;
    while (indent < static_cast<int>(raw.size()) && (raw[indent] == ' ' || raw[indent] == '\t')) ++indent;
    Block b{trim(raw), lineno, {}};
    while (!stack.empty() && stack.back().first >= indent) stack.pop_back();
    std::vector<Block>& into = stack.empty() ? src.blocks : stack.back().second->children;
    into.push_back(std::move(b));
    stack.emplace_back(indent, &into.back());
  }
  return src;
}

Source read_source(const fs::path& path) {
  return parse_blocks(read_file(path), path.string(), path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

FinCat parse_fincat(const Source& src, const std::vector<Block>& lines) {
  std::string name = "C";
  std::vector<std::string> objects;
  std::vector<std::tuple<std::string, std::string, std::string, int>> arrows;
  std::vector<std::tuple<std::string, std::string, std::string, int>> composites;
  std::vector<std::pair<std::string, std::string>> le;
  for (const auto& b : lines) {
    if (auto r = after(b.head, "category")) {
      name = *r;
    } else if (auto r = after(b.head, "objects")) {
      for (const auto& w : words(*r)) objects.push_back(w);
    } else if (auto r = after(b.head, "object")) {
      objects.push_back(*r);
    } else if (auto r = after(b.head, "arrow")) {
      auto [n, sig] = colon(src, b, *r);
      auto ends = pairs(src, b, sig);
      if (ends.size() != 1) throw ParseError(src.file, b.line, "expected 'arrow f : A -> B'");
      arrows.emplace_back(n, ends[0].first, ends[0].second, b.line);
    } else if (auto r = after(b.head, "compose")) {
      auto sides = split(*r, '=');
      auto gf = words(sides[0]);
      if (sides.size() != 2 || gf.size() != 2) throw ParseError(src.file, b.line, "expected 'compose g f = h'");
      composites.emplace_back(gf[0], gf[1], sides[1], b.line);
    } else if (auto r = after(b.head, "le")) {
      auto w = words(*r);
      if (w.size() != 2) throw ParseError(src.file, b.line, "expected 'le A B'");
      le.emplace_back(w[0], w[1]);
    } else {
      throw ParseError(src.file, b.line, "unexpected line '" + b.head + "' in a category");
    }
  }
  auto index = [&](const std::string& o, int line) {
    for (size_t i = 0; i < objects.size(); ++i)
      if (objects[i] == o) return static_cast<int>(i);
    throw ParseError(src.file, line, "unknown object '" + o + "'");
  };
  if (!le.empty()) {
    if (!arrows.empty() || !composites.empty())
      throw ParseError(src.file, lines.front().line, "'le' cannot be mixed with arrow or compose lines");
    std::vector<std::vector<bool>> leq(objects.size(), std::vector<bool>(objects.size()));
    for (const auto& [a, b] : le) leq[index(a, 0)][index(b, 0)] = true;
    return preorder_category(objects, leq, name);
  }
  FinCatBuilder fb(name);
  for (const auto& o : objects) fb.add_object(o);
  for (const auto& [n, a, b, line] : arrows) {
    index(a, line);
    index(b, line);
    fb.add_arrow(n, a, b);
  }
  for (const auto& [g, f, h, line] : composites) {
    try {
      fb.set_composite(g, f, h);
    } catch (const std::exception& e) {
      throw ParseError(src.file, line, e.what());
    }
  }
  FinCat c = fb.build();
  validate(c);
  return c;
}

CatRef load_fincat(const fs::path& path) {
  Source src = read_source(path);
  return std::make_shared<const FinCat>(parse_fincat(src, src.blocks));
}

DFib parse_dfib(const Source& src, const CatRef& base, const std::string& name, const std::vector<Block>& lines) {
  const FinCat& b = *base;
  std::vector<std::vector<std::string>> fibers(b.num_objects());
  std::vector<const Block*> restricts;
  for (const auto& l : lines) {
    if (auto r = after(l.head, "fiber")) {
      auto [obj, elems] = colon(src, l, *r);
      fibers[object_of(src, l, b, obj)] = words(elems);
    } else if (after(l.head, "restrict")) {
      restricts.push_back(&l);
    } else if (after(l.head, "base") || after(l.head, "fibration")) {
      continue;
    } else {
      throw ParseError(src.file, l.line, "unexpected line '" + l.head + "' in a fibration");
    }
  }
  auto find = [&](const Block& l, Obj o, const std::string& e) {
    for (size_t i = 0; i < fibers[o].size(); ++i)
      if (fibers[o][i] == e) return static_cast<int>(i);
    throw ParseError(src.file, l.line, "no element '" + e + "' over " + b.object_name(o) + " in " + name);
  };
  std::vector<std::vector<int>> partial(b.num_arrows());
  for (const Block* l : restricts) {
    auto [arr, body] = colon(src, *l, *after(l->head, "restrict"));
    Arr f = arrow_of(src, *l, b, arr);
    std::vector<int> row(fibers[b.tgt(f)].size(), -1);
    for (const auto& [x, y] : pairs(src, *l, body)) row[find(*l, b.tgt(f), x)] = find(*l, b.src(f), y);
    for (size_t i = 0; i < row.size(); ++i)
      if (row[i] < 0) throw ParseError(src.file, l->line, "restriction along " + arr + " misses " + fibers[b.tgt(f)][i]);
    partial[f] = row;
  }
  DFib d(base, name, fibers, complete_restrictions(b, fibers, partial));
  validate(d);
  return d;
}

DFibRef load_dfib(const fs::path& path) {
  Source src = read_source(path);
  CatRef base;
  std::string name = path.stem().string();
  for (const auto& b : src.blocks) {
    if (after(b.head, "base")) base = base_of(src, b);
    if (auto r = after(b.head, "fibration")) name = *r;
  }
  if (!base) throw ParseError(src.file, 0, "missing 'base' line");
  return std::make_shared<const DFib>(parse_dfib(src, base, name, src.blocks));
}

RMCat parse_rmcat(const Source& src) {
  CatRef c;
  std::vector<std::string> reps;
  int rep_line = 0;
  std::map<std::pair<Arr, Arr>, PushforwardWitness> given;
  std::vector<const Block*> pfs;
  for (const auto& b : src.blocks) {
    if (auto r = after(b.head, "category")) {
      c = r->empty() ? std::make_shared<const FinCat>(parse_fincat(src, b.children)) : load_fincat(resolve(src, *r));
    } else if (b.head.rfind("representable:", 0) == 0) {
      for (const auto& w : words(b.head.substr(14))) reps.push_back(w);
      rep_line = b.line;
    } else if (after(b.head, "pushforward")) {
      pfs.push_back(&b);
    } else {
      throw ParseError(src.file, b.line, "unexpected line '" + b.head + "' in an rmcat file");
    }
  }
  if (!c) throw ParseError(src.file, 0, "missing 'category' line");
  std::vector<bool> cls(c->num_arrows());
  if (reps.size() == 1 && reps[0] == "all") {
    cls = all_arrows(*c);
  } else {
    cls = isomorphisms(*c);
    for (const auto& r : reps)
      if (r != "isos") cls[arrow_of(src, {"", rep_line, {}}, *c, r)] = true;
  }
  for (const Block* b : pfs) {
    // pushforward f g = h with eval e
    auto w = words(*after(b->head, "pushforward"));
    if (w.size() != 7 || w[2] != "=" || w[4] != "with" || w[5] != "eval")
      throw ParseError(src.file, b->line, "expected 'pushforward f g = h with eval e'");
    given[{arrow_of(src, *b, *c, w[0]), arrow_of(src, *b, *c, w[1])}] = {arrow_of(src, *b, *c, w[3]),
                                                                           arrow_of(src, *b, *c, w[6])};
  }
  return validate_rmcat(c, cls, given);
}

RMCat load_rmcat(const fs::path& path) { return parse_rmcat(read_source(path)); }

Theory load_theory(const fs::path& path) {
  Source src = read_source(path);
  RMCatRef t;
  for (const auto& b : src.blocks)
    if (auto r = after(b.head, "theory")) t = std::make_shared<const RMCat>(load_rmcat(resolve(src, *r)));
  if (!t) throw ParseError(src.file, 0, "missing 'theory' line");
  const FinCat& c = t->cat();
  Theory th{t, std::vector<std::vector<std::string>>(c.num_objects()), std::vector<std::vector<int>>(c.num_arrows())};
  std::vector<bool> have(c.num_arrows());
  auto find = [&](const Block& b, Obj o, const std::string& e) {
    for (size_t i = 0; i < th.sets[o].size(); ++i)
      if (th.sets[o][i] == e) return static_cast<int>(i);
    throw ParseError(src.file, b.line, "no element '" + e + "' in the set of " + c.object_name(o));
  };
  for (const auto& b : src.blocks)
    if (auto r = after(b.head, "set")) {
      auto [obj, elems] = colon(src, b, *r);
      th.sets[object_of(src, b, c, obj)] = words(elems);
    }
  for (const auto& b : src.blocks) {
    auto r = after(b.head, "map");
    if (!r) continue;
    auto [arr, body] = colon(src, b, *r);
    Arr f = arrow_of(src, b, c, arr);
    th.maps[f].assign(th.sets[c.src(f)].size(), -1);
    for (const auto& [x, y] : pairs(src, b, body)) th.maps[f][find(b, c.src(f), x)] = find(b, c.tgt(f), y);
    for (int v : th.maps[f])
      if (v < 0) throw ParseError(src.file, b.line, "map " + arr + " is not total");
    have[f] = true;
  }
  for (Obj a = 0; a < c.num_objects(); ++a)
    if (!have[c.id(a)]) {
      th.maps[c.id(a)].resize(th.sets[a].size());
      for (size_t i = 0; i < th.sets[a].size(); ++i) th.maps[c.id(a)][i] = static_cast<int>(i);
      have[c.id(a)] = true;
    }
  for (bool changed = true; changed;) {
    changed = false;
    for (Arr f = 0; f < c.num_arrows(); ++f)
      for (Arr g = 0; g < c.num_arrows(); ++g) {
        if (c.tgt(f) != c.src(g) || !have[f] || !have[g] || have[c.compose(g, f)]) continue;
        auto& h = th.maps[c.compose(g, f)];
        h.clear();
        for (int v : th.maps[f]) h.push_back(th.maps[g][v]);
        have[c.compose(g, f)] = changed = true;
      }
  }
  for (Arr f = 0; f < c.num_arrows(); ++f)
    if (!have[f]) throw ParseError(src.file, 0, "no map given for " + c.arrow_name(f));
  validate_theory(th);
  return th;
}

LoadedModel parse_model(const Source& src) {
  bool natural = false;
  RMCatRef t;
  CatRef base;
  std::string name = fs::path(src.file).stem().string();
  std::vector<const Block*> fibs, maps;
  for (const auto& b : src.blocks) {
    if (auto r = after(b.head, "mode")) {
      if (*r != "natural" && *r != "rm") throw ParseError(src.file, b.line, "mode is 'natural' or 'rm'");
      natural = *r == "natural";
    } else if (auto r = after(b.head, "theory")) {
      t = std::make_shared<const RMCat>(load_rmcat(resolve(src, *r)));
    } else if (after(b.head, "base")) {
      base = base_of(src, b);
    } else if (auto r = after(b.head, "name")) {
      name = *r;
    } else if (after(b.head, "fibration")) {
      fibs.push_back(&b);
    } else if (after(b.head, "map")) {
      maps.push_back(&b);
    } else {
      throw ParseError(src.file, b.line, "unexpected line '" + b.head + "' in a model");
    }
  }
  if (!base) throw ParseError(src.file, 0, "missing 'base'");
  std::map<std::string, DFibRef> fibrations;
  for (const Block* b : fibs) {
    auto w = words(*after(b->head, "fibration"));
    if (w.empty() || w.size() > 2) throw ParseError(src.file, b->line, "expected 'fibration NAME [PATH]'");
    if (fibrations.count(w[0])) throw ParseError(src.file, b->line, "fibration " + w[0] + " given twice");
    if (w.size() == 2) {
      Source other = read_source(resolve(src, w[1]));
      fibrations[w[0]] = std::make_shared<const DFib>(parse_dfib(other, base, w[0], other.blocks));
    } else {
      fibrations[w[0]] = std::make_shared<const DFib>(parse_dfib(src, base, w[0], b->children));
    }
  }
  struct MapDecl {
    const Block* block;
    std::string name, from, to;
  };
  std::vector<MapDecl> decls;
  for (const Block* b : maps) {
    auto [n, sig] = colon(src, *b, *after(b->head, "map"));
    auto ends = pairs(src, *b, sig);
    if (ends.size() != 1) throw ParseError(src.file, b->line, "expected 'map f : A -> B'");
    for (const auto& e : {ends[0].first, ends[0].second})
      if (!fibrations.count(e)) throw ParseError(src.file, b->line, "unknown fibration '" + e + "'");
    decls.push_back({b, n, ends[0].first, ends[0].second});
  }

  if (natural) {
    if (fibrations.size() != 2 || decls.size() != 1)
      throw ParseError(src.file, 0, "natural mode takes two fibrations and the map p : E -> U");
    const auto& d = decls[0];
    auto e = fibrations[d.from], u = fibrations[d.to];
    DFibMap p = parse_map(src, *d.block, e, u);
    try {
      return {natural_model_check(base, u, e, p), name};
    } catch (const LawError& err) {
      if (err.kind() != LawKind::NotRepresentable) throw;
      std::vector<std::string> w{d.name};
      w.insert(w.end(), err.witness().begin(), err.witness().end());
      throw LawError(LawKind::NotRMFunctor, d.name + " : " + d.from + " -> " + d.to + " is not representable: " +
                                                 err.what(),
                     w);
    }
  }

  if (!t) throw ParseError(src.file, 0, "missing 'theory'");
  const FinCat& tc = t->cat();
  std::vector<DFibRef> obj(tc.num_objects());
  for (Obj a = 0; a < tc.num_objects(); ++a) {
    auto it = fibrations.find(tc.object_name(a));
    if (it == fibrations.end()) throw ParseError(src.file, 0, "no fibration for object " + tc.object_name(a));
    obj[a] = it->second;
  }
  if (fibrations.size() != obj.size()) throw ParseError(src.file, 0, "fibration for an unknown object");
  std::vector<std::optional<DFibMap>> given(tc.num_arrows());
  for (const auto& d : decls) {
    Arr f = arrow_of(src, *d.block, tc, d.name);
    if (tc.object_name(tc.src(f)) != d.from || tc.object_name(tc.tgt(f)) != d.to)
      throw ParseError(src.file, d.block->line, "arrow " + d.name + " has other endpoints in " + tc.name());
    given[f] = parse_map(src, *d.block, obj[tc.src(f)], obj[tc.tgt(f)]);
  }
  return {validate_model(t, base, obj, complete_arrows(*t, obj, given), name), name};
}

LoadedModel load_model(const fs::path& path) { return parse_model(read_source(path)); }

FileKind file_kind(const fs::path& path) {
  auto e = path.extension().string();
  if (e == ".fincat") return FileKind::FinCat;
  if (e == ".dfib") return FileKind::DFib;
  if (e == ".rmcat") return FileKind::RMCat;
  if (e == ".theory") return FileKind::Theory;
  if (e == ".model") return FileKind::Model;
  if (e == ".lfsig") return FileKind::Signature;
  return FileKind::Unknown;
}

}  // namespace rmk::io
