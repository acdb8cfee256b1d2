#include "rmk/cat/random.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <tuple>

namespace rmk::cat {

namespace {

std::vector<std::string> object_names(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("b" + std::to_string(i));
  return out;
}

// Random order relation i <= j only for i < j, closed transitively.
std::vector<std::vector<bool>> random_order(Rng& rng, int n, int percent) {
  std::vector<std::vector<bool>> leq(n, std::vector<bool>(n));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) leq[i][j] = rng.chance(percent);
  return leq;
}

// A preorder with one extra endomorphism e on b0; e∘e is e or the identity.
FinCat with_endomorphism(Rng& rng, int n, bool idempotent, const std::string& name) {
  auto names = object_names(n);
  auto leq = random_order(rng, n, 50);
  for (int k = 0; k < n; ++k) leq[k][k] = true;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (leq[i][k] && leq[k][j]) leq[i][j] = true;
  FinCatBuilder b(name);
  for (const auto& s : names) b.add_object(s);
  b.add_arrow("e", 0, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && leq[i][j]) b.add_arrow(names[i] + "<=" + names[j], i, j);
  b.set_composite("e", "e", idempotent ? "e" : "id_b0");
  return b.build();
}

}  // namespace

FinCat random_category(Rng& rng, int max_objects, const std::string& name) {
  int n = rng.between(1, std::max(1, max_objects));
  switch (rng.below(5)) {
    case 0:
    case 1:
      return preorder_category(object_names(n), random_order(rng, n, 45), name);
    case 2: {
      std::vector<std::tuple<std::string, int, int>> edges;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (rng.chance(40)) edges.emplace_back("g" + std::to_string(edges.size()), i, j);
      // A parallel pair makes the category non-thin.
      if (n >= 2 && rng.chance(50)) edges.emplace_back("g" + std::to_string(edges.size()), 0, 1);
      return free_category(object_names(n), edges, name);
    }
    case 3:
      return with_endomorphism(rng, n, true, name);
    default:
      return with_endomorphism(rng, n, false, name);
  }
}

FinCat random_meet_semilattice(Rng& rng, int max_objects, const std::string& name) {
  for (;;) {
    int bits = rng.between(1, 3);
    unsigned full = (1u << bits) - 1;
    std::set<unsigned> family{full};
    int extra = rng.between(0, std::max(0, max_objects - 1));
    for (int i = 0; i < extra; ++i) family.insert(static_cast<unsigned>(rng.below(static_cast<int>(full) + 1)));
    for (bool changed = true; changed;) {
      changed = false;
      for (unsigned a : std::vector<unsigned>(family.begin(), family.end()))
        for (unsigned b : std::vector<unsigned>(family.begin(), family.end()))
          changed |= family.insert(a & b).second;
    }
    if (static_cast<int>(family.size()) > max_objects) continue;
    std::vector<unsigned> elems(family.begin(), family.end());
    std::vector<std::string> names;
    for (unsigned s : elems) {
      std::string n = "s";
      for (int k = bits - 1; k >= 0; --k) n += (s >> k) & 1 ? '1' : '0';
      names.push_back(n);
    }
    int m = static_cast<int>(elems.size());
    std::vector<std::vector<bool>> leq(m, std::vector<bool>(m));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) leq[i][j] = (elems[i] & ~elems[j]) == 0;
    return preorder_category(names, leq, name);
  }
}

DFib random_dfib(Rng& rng, const CatRef& base, int max_fiber, const std::string& name) {
  const FinCat& b = *base;
  struct Law {
    Arr g, f, h;
  };
  std::vector<Law> laws;
  for (Arr g = 0; g < b.num_arrows(); ++g)
    for (Obj z = 0; z < b.num_objects(); ++z)
      for (Arr f : b.hom(z, b.src(g)))
        if (!b.is_identity(f) && !b.is_identity(g)) laws.push_back({g, f, b.compose(g, f)});
  std::vector<Arr> free_arrows;
  for (Arr f = 0; f < b.num_arrows(); ++f)
    if (!b.is_identity(f)) free_arrows.push_back(f);

  for (;;) {
    std::vector<int> size(b.num_objects());
    for (auto& s : size) s = rng.chance(12) ? 0 : rng.between(1, std::max(1, max_fiber));
    std::vector<std::vector<int>> r(b.num_arrows());
    for (Arr f = 0; f < b.num_arrows(); ++f) {
      r[f].assign(size[b.tgt(f)], -1);
      if (b.is_identity(f)) std::iota(r[f].begin(), r[f].end(), 0);
    }
    std::vector<std::pair<Arr, int>> vars;
    for (Arr f : free_arrows)
      for (int e = 0; e < size[b.tgt(f)]; ++e) vars.emplace_back(f, e);
    auto consistent = [&]() {
      for (const auto& l : laws)
        for (int e = 0; e < size[b.tgt(l.g)]; ++e) {
          int a = r[l.g][e];
          if (a < 0) continue;
          int x = r[l.f][a], y = r[l.h][e];
          if (x >= 0 && y >= 0 && x != y) return false;
        }
      return true;
    };
    long budget = 20000;
    std::function<bool(size_t)> fill = [&](size_t k) -> bool {
      if (k == vars.size()) return true;
      if (--budget < 0) return false;
      auto [f, e] = vars[k];
      int n = size[b.src(f)];
      int start = rng.below(n);
      for (int t = 0; t < n; ++t) {
        r[f][e] = (start + t) % n;
        if (consistent() && fill(k + 1)) return true;
      }
      r[f][e] = -1;
      return false;
    };
    if (!fill(0)) continue;
    std::vector<std::vector<std::string>> fibers(b.num_objects());
    for (Obj a = 0; a < b.num_objects(); ++a)
      for (int i = 0; i < size[a]; ++i) fibers[a].push_back(b.object_name(a) + "." + std::to_string(i));
    return DFib(base, name, std::move(fibers), std::move(r));
  }
}

}  // namespace rmk::cat
