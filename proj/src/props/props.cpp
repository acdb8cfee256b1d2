#include "rmk/props/props.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "rmk/cat/dfib.hpp"
#include "rmk/cat/model.hpp"
#include "rmk/cat/random.hpp"
#include "rmk/cat/rmcat.hpp"
#include "rmk/lf/checker.hpp"
#include "rmk/syncat/syncat.hpp"

namespace rmk::props {

using namespace rmk::cat;

namespace {

CatRef share(FinCat c) { return std::make_shared<const FinCat>(std::move(c)); }
DFibRef share(DFib d) { return std::make_shared<const DFib>(std::move(d)); }

// Outcome of one case: empty string on success, otherwise what went wrong.
using Case = std::function<std::string(Rng&, const Params&, std::map<std::string, long>&)>;

std::uint64_t case_seed(std::uint64_t seed, int i) {
  return seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(i) * 0xBF58476D1CE4E5B9ull + 1;
}

// --- fibrations ---------------------------------------------------------------

std::string yoneda_case(Rng& rng, const Params& p, std::map<std::string, long>& tally) {
  auto b = share(random_category(rng, std::max(1, p.size)));
  auto d = share(random_dfib(rng, b, 3));
  Obj x = rng.below(b->num_objects());
  validate(*d);
  auto y = yoneda(b, x);
  size_t maps = count_maps(y, *d);
  tally["elements"] += d->fiber_size(x);
  if (maps != static_cast<size_t>(d->fiber_size(x)))
    return std::to_string(maps) + " maps from the slice over " + b->object_name(x) + " but " +
           std::to_string(d->fiber_size(x)) + " elements, base " + b->name();
  if (!yoneda_bijection(b, x, d).bijective) return "element correspondence is not bijective";
  return {};
}

// A representable u : X -> Y: a random map when one turns up, otherwise a
// product projection over a meet-semilattice.
struct RepMap {
  CatRef base;
  DFibMap u;
  RightAdjoint ra;
};

RepMap representable_map(Rng& rng, int size, std::map<std::string, long>& tally) {
  if (rng.chance(50)) {
    auto b = share(random_category(rng, size));
    for (int attempt = 0; attempt < 30; ++attempt) {
      auto x = share(random_dfib(rng, b, 2, "X"));
      auto y = share(random_dfib(rng, b, 2, "Y"));
      auto u = random_map(rng, x, y);
      if (!u) continue;
      if (auto ra = right_adjoint(*u)) {
        ++tally["random representable"];
        return {b, *u, *ra};
      }
    }
  }
  auto b = share(random_meet_semilattice(rng, size));
  auto y = share(random_dfib(rng, b, 2, "Y"));
  auto x = product(y, share(yoneda(b, rng.below(b->num_objects()))));
  ++tally["product projection"];
  return {b, x.p1, *right_adjoint(x.p1)};
}

template <class F>
DFibMap some_map(Rng& rng, const CatRef& b, const DFibRef& to, const std::string& name, F&& fallback) {
  for (int attempt = 0; attempt < 20; ++attempt) {
    auto d = share(random_dfib(rng, b, 2, name));
    if (auto m = random_map(rng, d, to)) return *m;
  }
  return fallback();
}

std::string pushforward_case(Rng& rng, const Params& p, std::map<std::string, long>& tally) {
  auto [b, u, ra] = representable_map(rng, std::max(1, p.size), tally);
  DFibMap g = some_map(rng, b, u.src, "Z", [&] { return identity_map(u.src); });
  DFibMap w = some_map(rng, b, u.tgt, "W", [&] { return identity_map(u.tgt); });
  auto pf = pushforward(u, ra, g);
  validate(*pf.obj);
  validate(pf.to_y);
  validate(pf.eval);
  auto c = pushforward_ump(u, g, pf, w);
  tally["maps"] += static_cast<long>(c.lhs);
  if (c.lhs != c.rhs)
    return "Hom(u*W, Z) has " + std::to_string(c.lhs) + " maps over X, Hom(W, u_*Z) has " + std::to_string(c.rhs);
  return {};
}

std::string bc_case(Rng& rng, const Params& p, std::map<std::string, long>& tally) {
  for (int attempt = 0; attempt < 50; ++attempt) {
    auto b = share(random_meet_semilattice(rng, std::max(1, p.size)));
    auto yy = share(random_dfib(rng, b, 2, "Y"));
    auto x = product(yy, share(yoneda(b, rng.below(b->num_objects()))));
    auto yp = share(random_dfib(rng, b, 2, "Y'"));
    auto wm = random_map(rng, yp, yy);
    if (!wm) continue;
    auto pb = pullback(x.p1, *wm);
    DFibMap left = pb.p2, top = pb.p1;
    if (rng.chance(50)) {
      auto xp = product(yp, share(yoneda(b, rng.below(b->num_objects()))));
      auto v = random_map(rng, xp.obj, x.obj,
                          [&](Obj a, int i, int val) { return x.p1.fn[a][val] == wm->fn[a][xp.p1.fn[a][i]]; });
      if (!v) continue;
      left = xp.p1;
      top = *v;
    }
    Square s{top, left, x.p1, *wm};
    if (!commutes(s)) return "generated square does not commute";
    auto r = pullback_iff_bc(s);
    ++tally[r.is_pullback ? "pullback" : "not pullback"];
    if (!r.agree)
      return std::string("pullback checker says ") + (r.is_pullback ? "yes" : "no") + ", mate checker says " +
             (r.bc ? "yes" : "no");
    return {};
  }
  ++tally["no square found"];
  return {};
}

// --- models ---------------------------------------------------------------------

// A finite RMCat on a random meet-semilattice with a random stable class.
RMCatRef random_rmcat(Rng& rng, int size, std::map<std::string, long>& tally) {
  auto l = share(random_meet_semilattice(rng, size, "T"));
  Cartesian c = cartesian_structure(l);
  std::vector<Arr> gens;
  for (Arr f = 0; f < l->num_arrows(); ++f)
    if (!l->is_identity(f) && rng.chance(40) && is_exponentiable(c, f)) gens.push_back(f);
  std::vector<bool> cls;
  try {
    cls = generate_stable_class(l, gens);
  } catch (const LawError&) {
    cls = isomorphisms(*l);
    ++tally["fallback to isomorphisms"];
  }
  tally["representable arrows"] += std::count(cls.begin(), cls.end(), true);
  return std::make_shared<const RMCat>(validate_rmcat(l, cls));
}

std::string model_case(Rng& rng, const Params& p, std::map<std::string, long>& tally) {
  auto t = random_rmcat(rng, std::max(1, p.size), tally);
  auto y = std::make_shared<const Model>(yoneda_model(t));
  auto b = std::make_shared<const Model>(bi_initial_model(t));
  Heart h = heart(y);
  if (!is_morphism(identity_morphism(y))) return "identity morphism rejected";
  if (!is_morphism(h.inclusion)) return "heart inclusion rejected";
  if (!is_democratic(*h.model)) return "heart is not democratic";
  if (!is_democratic(*b)) return "bi-initial model is not democratic";
  if (!find_model_isomorphism(b, h.model)) return "bi-initial model differs from the heart of the Yoneda model";
  if (heart(h.model).model->base->num_objects() != h.model->base->num_objects()) return "heart is not idempotent";
  Theory th = internal_language(*b);
  const FinCat& c = t->cat();
  for (Obj a = 0; a < c.num_objects(); ++a)
    if (th.sets[a].size() != c.hom(t->terminal(), a).size())
      return "internal language at " + c.object_name(a) + " is not Hom(1, " + c.object_name(a) + ")";
  tally["heart objects"] += h.model->base->num_objects();
  return {};
}

std::string democratic_case(Rng& rng, const Params& p, std::map<std::string, long>& tally) {
  auto b = share(random_meet_semilattice(rng, std::max(1, p.size), "B"));
  auto u = share(random_dfib(rng, b, 2, "U"));
  DFibMap pm;
  bool found = false;
  for (int attempt = 0; attempt < 20 && !found && rng.chance(60); ++attempt) {
    auto e = share(random_dfib(rng, b, 2, "E"));
    auto m = random_map(rng, e, u);
    if (m && is_representable(*m)) {
      pm = *m;
      found = true;
    }
  }
  if (!found) {
    auto x = product(u, share(yoneda(b, rng.below(b->num_objects()))));
    pm = x.p1;
  }
  NaturalModel nm = natural_model_check(b, u, pm.src, pm);
  auto in = contextual_closure(nm);
  if (!in[nm.terminal]) return "terminal object is not contextual";
  for (Obj x = 0; x < b->num_objects(); ++x)
    for (Obj y = 0; y < b->num_objects(); ++y)
      if (in[x] && !in[y] && b->isomorphic(x, y)) return "closure is not closed under isomorphism";
  int members = static_cast<int>(std::count(in.begin(), in.end(), true));
  NaturalModel h = heart(nm);
  if (h.base->num_objects() != members) return "heart has the wrong objects";
  if (!is_democratic(h)) return "heart is not democratic";
  for (int n = 0; n <= 2; ++n)
    if (polynomial_power_count(nm, n) != telescope_count(nm, n + 1))
      return "P^" + std::to_string(n) + "(U) over 1 differs from the telescope count";
  ++tally[is_democratic(nm) ? "democratic" : "not democratic"];
  return {};
}

Model constant_model(const RMCatRef& t, const CatRef& b) {
  std::vector<DFibRef> obj;
  for (Obj a = 0; a < t->cat().num_objects(); ++a) {
    DFib one = terminal_dfib(b);
    std::vector<std::vector<std::string>> fs;
    for (Obj o = 0; o < b->num_objects(); ++o) fs.push_back(one.fiber(o));
    obj.push_back(share(DFib(b, t->cat().object_name(a), fs, one.restrictions())));
  }
  std::vector<DFibMap> arr;
  for (Arr f = 0; f < t->cat().num_arrows(); ++f)
    arr.push_back(make_map(obj[t->cat().src(f)], obj[t->cat().tgt(f)],
                           std::vector<std::vector<int>>(b->num_objects(), std::vector<int>{0})));
  return validate_model(t, b, obj, arr, "const");
}

std::string contractible_case(Rng& rng, const Params& p, std::map<std::string, long>& tally) {
  int size = std::clamp(p.size, 1, 3);
  auto t = random_rmcat(rng, size, tally);
  auto m = std::make_shared<const Model>(bi_initial_model(t));
  ModelRef n;
  switch (rng.below(3)) {
    case 0:
      n = std::make_shared<const Model>(yoneda_model(t));
      break;
    case 1:
      n = heart(std::make_shared<const Model>(yoneda_model(t))).model;
      break;
    default:
      n = std::make_shared<const Model>(constant_model(t, share(random_meet_semilattice(rng, size, "B"))));
  }
  HomReport r = hom_category(m, n);
  tally["morphisms"] += static_cast<long>(r.morphisms);
  if (!r.contractible)
    return std::to_string(r.morphisms) + " morphisms, up to " + std::to_string(r.max_2morphisms) +
           " 2-morphisms between a pair, into " + n->name;
  if (!r.all_invertible) return "a 2-morphism is not invertible";
  return {};
}

// --- logical framework --------------------------------------------------------------

struct Corpus {
  struct Entry {
    std::string file;
    lf::PreSignature pre;
    lf::CheckedSignature sig;
  };
  std::vector<Entry> sigs;
  std::map<std::pair<size_t, size_t>, std::shared_ptr<const lf::CheckedSignature>> prefix_sigs;
  std::map<std::pair<size_t, size_t>, std::shared_ptr<const syncat::SynCat>> cats;

  const lf::CheckedSignature& prefix(size_t s, size_t len) {
    auto& slot = prefix_sigs[{s, len}];
    if (!slot) {
      lf::PreSignature p;
      p.entries.assign(sigs[s].pre.entries.begin(), sigs[s].pre.entries.begin() + static_cast<long>(len));
      slot = std::make_shared<const lf::CheckedSignature>(lf::check_signature(p));
    }
    return *slot;
  }

  const syncat::SynCat& cat(size_t s, size_t len) {
    auto& slot = cats[{s, len}];
    if (!slot) {
      syncat::Bounds b;
      b.depth = 2;
      b.size = 2;
      b.max_count = len == sigs[s].pre.entries.size() ? 3000 : 1000;
      slot = std::make_shared<const syncat::SynCat>(syncat::build_syncat(prefix(s, len), b));
    }
    return *slot;
  }
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Corpus load_corpus() {
  Corpus c;
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(corpus_dir()))
    if (e.path().extension() == ".lfsig") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    auto pre = lf::parse_signature(slurp(f));
    c.sigs.push_back({f.filename().string(), pre, lf::check_signature(pre)});
  }
  if (c.sigs.empty()) throw std::runtime_error("no signatures in " + corpus_dir());
  return c;
}

std::vector<lf::TermPtr> compose_tuples(const syncat::SynCat& sc, int g, int f) {
  const auto& d = sc.contexts[sc.arrows[f].tgt].ctx;
  auto s = lf::morphism_substitution(d, sc.arrows[f].rep);
  std::vector<lf::TermPtr> out;
  for (const auto& t : sc.arrows[g].rep) out.push_back(lf::substitute(t, s));
  return out;
}

std::string lf_case(Corpus& corpus, Rng& rng, int index, std::map<std::string, long>& tally) {
  size_t s = static_cast<size_t>(rng.below(static_cast<int>(corpus.sigs.size())));
  const auto& entry = corpus.sigs[s];
  size_t n = entry.pre.entries.size();
  if (index % 2 == 0) {
    // Substitution: a composite of two context morphisms is a context morphism.
    const auto& sc = corpus.cat(s, n);
    std::vector<std::pair<int, int>> pairs;
    for (int g = 0; g < static_cast<int>(sc.arrows.size()); ++g)
      for (int f = 0; f < static_cast<int>(sc.arrows.size()); ++f)
        if (sc.arrows[f].tgt == sc.arrows[g].src) pairs.emplace_back(g, f);
    if (pairs.empty()) return entry.file + ": no composable morphisms within bounds";
    auto [g, f] = pairs[rng.below(static_cast<int>(pairs.size()))];
    const auto& gamma = sc.contexts[sc.arrows[f].src].ctx;
    const auto& theta = sc.contexts[sc.arrows[g].tgt].ctx;
    auto h = compose_tuples(sc, g, f);
    auto r = lf::check_context_morphism(entry.sig, h, gamma, theta);
    ++tally["substitution"];
    if (!r.ok)
      return entry.file + ": " + syncat::arrow_text(sc, g) + " after " + syncat::arrow_text(sc, f) +
             " does not check: " + r.detail;
    // The identity substitution changes nothing.
    int id = sc.identity[sc.arrows[f].src];
    if (id >= 0 && !lf::morphisms_equal(entry.sig, gamma, sc.contexts[sc.arrows[f].tgt].ctx,
                                        compose_tuples(sc, f, id), sc.arrows[f].rep))
      return entry.file + ": substituting the identity into " + syncat::arrow_text(sc, f) + " changes it";
    return {};
  }
  // Weakening: a judgment over a prefix of the signature survives the rest.
  size_t len = 1 + static_cast<size_t>(rng.below(static_cast<int>(n)));
  const auto& sc = corpus.cat(s, len);
  lf::PreSignature prefix, e1, e2;
  size_t cut = len + static_cast<size_t>(rng.below(static_cast<int>(n - len) + 1));
  for (size_t i = 0; i < n; ++i)
    (i < len ? prefix : i < cut ? e1 : e2).entries.push_back(entry.pre.entries[i]);
  lf::Judgment j = lf::SigOk{};
  std::string what = "the signature";
  if (!sc.arrows.empty() && rng.chance(70)) {
    int a = rng.below(static_cast<int>(sc.arrows.size()));
    const auto& arr = sc.arrows[a];
    const auto& d = sc.contexts[arr.tgt].ctx;
    if (!d.empty()) {
      size_t i = static_cast<size_t>(rng.below(static_cast<int>(d.size())));
      lf::Substitution sub;
      for (size_t k = 0; k < i; ++k) sub[d[k].first] = arr.rep[k];
      j = lf::HasType{sc.contexts[arr.src].ctx, arr.rep[i], lf::substitute(d[i].second, sub)};
      what = "component " + std::to_string(i + 1) + " of " + syncat::arrow_text(sc, a);
    } else {
      j = lf::CtxOk{sc.contexts[arr.src].ctx};
      what = "context " + syncat::context_text(sc.contexts[arr.src]);
    }
  } else if (sc.contexts.size() > 1) {
    const auto& c = sc.contexts[1 + rng.below(static_cast<int>(sc.contexts.size()) - 1)];
    j = lf::CtxOk{c.ctx};
    what = "context " + syncat::context_text(c);
  }
  ++tally["weakening"];
  auto before = lf::check_judgment(corpus.prefix(s, len), j);
  if (!before.ok) return entry.file + ": generated judgment fails before weakening: " + before.detail;
  auto after = lf::weaken_signature(prefix, e1, e2, j);
  if (!after.ok)
    return entry.file + ": " + what + " fails after adding " + std::to_string(n - len) + " entries: " + after.detail;
  return {};
}

}  // namespace

std::string corpus_dir() {
  if (const char* env = std::getenv("RMK_CORPUS")) return env;
  return std::string(RMK_SOURCE_DIR) + "/corpus";
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"dfib-laws",       "pushforward-ump", "bc-pullback",    "model-laws",
                                              "democratic",      "contractibility", "lf-substitution"};
  return names;
}

SuiteReport run_suite(const std::string& suite, const Params& params) {
  SuiteReport r;
  r.suite = suite;
  r.params = params;
  std::map<std::string, long> tally;
  std::unique_ptr<Corpus> corpus;
  Case body;
  if (suite == "dfib-laws") body = yoneda_case;
  else if (suite == "pushforward-ump") body = pushforward_case;
  else if (suite == "bc-pullback") body = bc_case;
  else if (suite == "model-laws") body = model_case;
  else if (suite == "democratic") body = democratic_case;
  else if (suite == "contractibility") body = contractible_case;
  else if (suite == "lf-substitution") corpus = std::make_unique<Corpus>(load_corpus());
  else throw std::invalid_argument("unknown suite '" + suite + "'");

  for (int i = 0; i < params.cases; ++i) {
    Rng rng(case_seed(params.seed, i));
    std::string failure;
    try {
      failure = corpus ? lf_case(*corpus, rng, i, tally) : body(rng, params, tally);
    } catch (const std::exception& e) {
      failure = std::string("exception: ") + e.what();
    }
    ++r.cases;
    if (failure.empty()) ++r.passed;
    else if (r.failures.size() < 5) r.failures.push_back("case " + std::to_string(i) + ": " + failure);
  }
  for (const auto& [k, v] : tally) r.notes.push_back(k + " " + std::to_string(v));
  return r;
}

}  // namespace rmk::props
