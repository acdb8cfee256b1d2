// One line per acceptance criterion: `[PASS|FAIL] N name: detail (seconds / limit)`.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "rmk/cat/model.hpp"
#include "rmk/io/formats.hpp"
#include "rmk/lf/checker.hpp"
#include "rmk/props/props.hpp"
#include "rmk/syncat/syncat.hpp"

namespace fs = std::filesystem;
using namespace rmk;

namespace {

const fs::path kRoot = RMK_SOURCE_DIR;

struct Verdict {
  bool ok = true;
  std::string detail;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict fail(const std::string& why) { return {false, why}; }

// --- 1 ---------------------------------------------------------------------------

Verdict corpus() {
  int accepted = 0;
  for (const char* name : {"dtt", "pi", "id", "universes", "twolevel", "prop", "predicate", "cubical"}) {
    try {
      lf::check_signature(lf::parse_signature(slurp(kRoot / "corpus" / (std::string(name) + ".lfsig"))));
      ++accepted;
    } catch (const std::exception& e) {
      return fail(std::string(name) + " rejected: " + e.what());
    }
  }
  std::istringstream expected(slurp(kRoot / "corpus/mutants/expected.txt"));
  std::string line;
  int mutants = 0, matched = 0;
  std::string mismatch;
  while (std::getline(expected, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string file, kind, entry;
    ls >> file >> kind >> entry;
    ++mutants;
    std::string got_kind = "accepted", got_entry = "-", rule;
    try {
      lf::check_signature(lf::parse_signature(slurp(kRoot / "corpus/mutants" / (file + ".lfsig"))));
    } catch (const lf::CheckError& e) {
      got_kind = lf::to_string(e.kind());
      got_entry = e.entry;
      rule = e.rule();
    } catch (const lf::SyntaxError&) {
      got_kind = "SyntaxError";
    }
    if (got_kind == kind && got_entry == entry && !rule.empty()) ++matched;
    else if (mismatch.empty()) mismatch = file + " gave " + got_kind + " at " + got_entry;
  }
  std::string d = std::to_string(accepted) + "/8 signatures accepted, " + std::to_string(matched) + "/" +
                  std::to_string(mutants) + " mutants rejected as expected with a rule";
  if (!mismatch.empty()) d += "; first mismatch: " + mismatch;
  return {accepted == 8 && mutants == 20 && matched == 20, d};
}

// --- 2, 3, 4, 9 ------------------------------------------------------------------

Verdict suite(const std::string& name, int cases, int size) {
  props::Params p;
  p.seed = 1;
  p.size = size;
  p.cases = cases;
  auto r = props::run_suite(name, p);
  std::string d = name + " seed 1 size " + std::to_string(size) + ": " + std::to_string(r.passed) + "/" +
                  std::to_string(r.cases);
  for (const auto& n : r.notes) d += "; " + n;
  if (!r.failures.empty()) d += "; " + r.failures.front();
  return {r.ok() && r.cases == cases, d};
}

// --- 5 ---------------------------------------------------------------------------

Verdict subsingleton() {
  auto lm = io::load_model(kRoot / "corpus/models/subsingleton.model");
  if (!lm.natural()) return fail("not a natural model");
  const auto& nm = std::get<cat::NaturalModel>(lm.model);
  auto lang = cat::internal_language(nm);
  auto closure = cat::contextual_closure(nm);
  bool full = std::all_of(closure.begin(), closure.end(), [](bool b) { return b; });
  std::string d = "|Theta(Type)| = " + std::to_string(lang.types.size()) +
                  ", |Theta(el)| = " + std::to_string(lang.terms.size()) + ", contextual closure " +
                  (full ? "is" : "is not") + " the whole base";
  return {lang.types.size() == 2 && lang.terms.size() == 1 && full && cat::is_democratic(nm), d};
}

// --- 6, 7 ----------------------------------------------------------------------------

const char* kTheories[] = {"t_unit", "t_arrow", "t_chain"};

std::vector<cat::ModelRef> bundled_models(const std::string& theory_name) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(kRoot / "corpus/models"))
    if (io::file_kind(e.path()) == io::FileKind::Model) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<cat::ModelRef> out;
  for (const auto& f : files) {
    auto lm = io::load_model(f);
    if (lm.natural()) continue;
    const auto& m = std::get<cat::Model>(lm.model);
    if (m.T->cat().name() == theory_name) out.push_back(std::make_shared<const cat::Model>(m));
  }
  return out;
}

Verdict bi_initiality(const std::string& file) {
  auto t = std::make_shared<const cat::RMCat>(io::load_rmcat(kRoot / "corpus/models" / (file + ".rmcat")));
  auto b = std::make_shared<const cat::Model>(cat::bi_initial_model(t));
  auto y = std::make_shared<const cat::Model>(cat::yoneda_model(t));
  auto h = cat::heart(y);
  auto targets = bundled_models(t->cat().name());
  size_t files = targets.size();
  targets.push_back(y);
  targets.push_back(h.model);
  int contractible = 0;
  std::string bad;
  for (const auto& m : targets) {
    // Bundled models carry their own copy of T; the bi-initial model must
    // live over the same instance.
    auto src = m->T == t ? b : std::make_shared<const cat::Model>(cat::bi_initial_model(m->T));
    if (cat::hom_category_contractible(src, m)) ++contractible;
    else if (bad.empty()) bad = m->name;
  }
  bool iso = cat::find_model_isomorphism(b, h.model).has_value();
  std::string d = file + " contractible into " + std::to_string(contractible) + "/" + std::to_string(targets.size()) +
                  " models (" + std::to_string(files) + " bundled, Yoneda, its heart); bi-initial " +
                  (iso ? "is" : "is not") + " isomorphic to the heart of the Yoneda model";
  if (!bad.empty()) d += "; not contractible: " + bad;
  return {files > 0 && contractible == static_cast<int>(targets.size()) && iso, d};
}

Verdict language_vs_hom() {
  int objects = 0, agree = 0;
  std::string bad;
  for (const char* file : kTheories) {
    auto t = std::make_shared<const cat::RMCat>(io::load_rmcat(kRoot / "corpus/models" / (std::string(file) + ".rmcat")));
    const auto& c = t->cat();
    auto th = cat::internal_language(cat::bi_initial_model(t));
    for (cat::Obj a = 0; a < c.num_objects(); ++a) {
      ++objects;
      const auto& hom = c.hom(t->terminal(), a);
      std::set<std::string> want, got(th.sets[a].begin(), th.sets[a].end());
      for (auto x : hom) want.insert(c.arrow_name(x));
      bool ok = got.size() == th.sets[a].size() && got == want;
      // Functoriality matches post-composition.
      for (cat::Arr f = 0; ok && f < c.num_arrows(); ++f) {
        if (c.src(f) != a) continue;
        for (size_t i = 0; i < th.sets[a].size(); ++i) {
          cat::Arr x = c.arrow_named(th.sets[a][i]);
          ok = ok && th.sets[c.tgt(f)][th.maps[f][i]] == c.arrow_name(c.compose(f, x));
        }
      }
      if (ok) ++agree;
      else if (bad.empty()) bad = std::string(file) + " at " + c.object_name(a);
    }
  }
  std::string d = std::to_string(agree) + "/" + std::to_string(objects) +
                  " objects with Theta(A) = Hom(1, A) as sets with post-composition";
  if (!bad.empty()) d += "; differs: " + bad;
  return {agree == objects, d};
}

// --- 8 ---------------------------------------------------------------------------

// Types over the basic dependent signature written out from its grammar.
std::vector<lf::TermPtr> dtt_types(const lf::CheckedSignature& s, const lf::Context& ctx, int max_size) {
  auto names = s.source.symbol_names();
  std::vector<std::string> small{"Type"};
  for (const auto& [x, a] : ctx) small.push_back("el(" + x + ")");
  std::vector<std::string> texts = small;
  for (const auto& [v, a] : ctx)
    for (const auto& cod : small) texts.push_back("(y : el(" + v + ")) -> " + cod);
  for (const auto& t : small)
    for (const auto& [a, ta] : ctx)
      for (const auto& [b, tb] : ctx) texts.push_back(a + " = " + b + " in " + t);
  std::vector<lf::TermPtr> out;
  for (const auto& t : texts) {
    auto term = lf::parse_term(t, &names);
    if (lf::term_size(term) <= max_size && lf::check_type(s, ctx, term, lf::mk_box()).ok) out.push_back(term);
  }
  return out;
}

Verdict syntactic() {
  auto s = lf::check_signature(lf::parse_signature(slurp(kRoot / "corpus/dtt.lfsig")));
  syncat::Bounds b;
  b.depth = 2;
  b.size = 4;
  auto sc = syncat::build_syncat(s, b);
  auto names = s.source.symbol_names();
  auto P = [&](const std::string& t) { return lf::parse_term(t, &names); };

  std::vector<lf::Context> expected{{}};
  for (const auto& a : dtt_types(s, {}, b.size)) {
    expected.push_back({{"x1", a}});
    for (const auto& c : dtt_types(s, {{"x1", a}}, b.size)) expected.push_back({{"x1", a}, {"x2", c}});
  }
  size_t found = 0;
  for (const auto& e : expected)
    if (sc.find_context(e)) ++found;
  bool contexts = found == expected.size() && sc.contexts.size() == expected.size();

  auto type = sc.find_context({{"x1", P("Type")}});
  auto type2 = sc.find_context({{"x1", P("Type")}, {"x2", P("Type")}});
  auto el = sc.find_context({{"x1", P("Type")}, {"x2", P("el(x1)")}});
  if (!type || !type2 || !el) return fail("expected contexts missing");
  auto hom = sc.hom(*type, *type);
  bool one = hom.size() == 1 && lf::alpha_eq(sc.arrows[hom[0]].rep.at(0), P("x1"));

  auto classify = [&](int src, int tgt) {
    for (int a : sc.hom(src, tgt))
      if (sc.arrows[a].rep.size() == 1 && lf::alpha_eq(sc.arrows[a].rep[0], P("x1"))) return a;
    return -1;
  };
  int proj = classify(*el, *type), weak = classify(*type2, *type);
  bool gens = proj >= 0 && weak >= 0 && sc.arrows[proj].generating && !sc.arrows[weak].generating;
  bool pb = proj >= 0 && syncat::pullback_of(s, sc, proj, hom.at(0)).verified &&
            syncat::pullback_of(s, sc, proj, hom.at(0)).apex == *el;

  std::string d = std::to_string(sc.contexts.size()) + " contexts, " + std::to_string(found) + "/" +
                  std::to_string(expected.size()) + " from the grammar oracle; Hom((A:Type),(B:Type)) has " +
                  std::to_string(hom.size()) + " class; el projection " +
                  (gens ? "generating, weakening not" : "generator flags wrong") + "; pullback along (B := A) " +
                  (pb ? "verified" : "not verified");
  return {contexts && one && gens && pb && !sc.overflow, d};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    double limit;  // seconds, 0 for none
    std::function<Verdict()> run;
  };
  std::vector<Criterion> all{
      {1, "corpus acceptance", 10, corpus},
      {2, "Yoneda suite", 60, [] { return suite("dfib-laws", 500, 4); }},
      {3, "pushforward UMP", 120, [] { return suite("pushforward-ump", 200, 4); }},
      {4, "BC iff pullback", 60, [] { return suite("bc-pullback", 200, 4); }},
      {5, "subsingleton natural model", 0, subsingleton},
  };
  // The time limit applies per theory, so it is checked inside.
  all.push_back({6, "bi-initiality", 0, [] {
                   Verdict all_t;
                   for (const char* t : kTheories) {
                     auto start = std::chrono::steady_clock::now();
                     Verdict v = bi_initiality(t);
                     double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                     std::ostringstream d;
                     d << v.detail << " in " << std::fixed << std::setprecision(2) << s << " s";
                     if (s >= 120) d << " (over 120 s)";
                     all_t.ok = all_t.ok && v.ok && s < 120;
                     all_t.detail += (all_t.detail.empty() ? "" : "; ") + d.str();
                   }
                   return all_t;
                 }});
  all.push_back({7, "internal language vs Hom(1, A)", 0, language_vs_hom});
  all.push_back({8, "syntactic category", 30, syntactic});
  all.push_back({9, "LF metatheory", 0, [] { return suite("lf-substitution", 300, 3); }});

  int failed = 0;
  for (const auto& c : all) {
    auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = fail(std::string("exception: ") + e.what());
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_time = c.limit == 0 || s < c.limit;
    bool ok = v.ok && in_time;
    if (!ok) ++failed;
    std::ostringstream line;
    line << (ok ? "[PASS] " : "[FAIL] ") << c.id << " " << c.name << ": " << v.detail << " (" << std::fixed
         << std::setprecision(2) << s << " s";
    if (c.limit > 0) line << " / " << c.limit << " s";
    line << ")";
    if (!in_time) line << " over time";
    std::cout << line.str() << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
