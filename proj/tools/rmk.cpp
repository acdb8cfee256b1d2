// rmk: command-line front end. Every command prints a line-oriented report
// whose first line is `rmk-report 1 <command>`; json-like output carries the
// same fields. Exit codes: 0 ok, 1 verdict failure, 2 input error, 3 overflow.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rmk/cat/model.hpp"
#include "rmk/io/formats.hpp"
#include "rmk/lf/checker.hpp"
#include "rmk/lf/syntax.hpp"
#include "rmk/props/props.hpp"
#include "rmk/syncat/syncat.hpp"

namespace fs = std::filesystem;
using namespace rmk;

namespace {

enum Exit { kOk = 0, kVerdict = 1, kInput = 2, kOverflow = 3 };

class Report {
 public:
  explicit Report(std::string command) : command_(std::move(command)) {}

  void add(const std::string& key, const std::string& value) { fields_.emplace_back(key, value); }
  void add(const std::string& key, long value) { add(key, std::to_string(value)); }
  void caveat(const std::string& c) { add("caveat", c); }

  void print(std::ostream& out, bool json, double ms) const {
    if (!json) {
      out << "rmk-report 1 " << command_ << "\n";
      for (const auto& [k, v] : fields_) out << k << " " << v << "\n";
      out << "time_ms " << static_cast<long>(ms) << "\n";
      return;
    }
    nlohmann::ordered_json j;
    j["format"] = "rmk-report";
    j["version"] = 1;
    j["command"] = command_;
    for (const auto& [k, v] : fields_) {
      if (!j.contains(k)) j[k] = nlohmann::ordered_json::array();
      j[k].push_back(v);
    }
    j["time_ms"] = static_cast<long>(ms);
    out << j.dump(1) << "\n";
  }

 private:
  std::string command_;
  std::vector<std::pair<std::string, std::string>> fields_;
};

struct Options {
  std::string format = "text";
  std::string bounds;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string join(const std::vector<std::string>& xs, const std::string& sep = ", ") {
  std::string out;
  for (size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
  return out;
}

// --bounds objects=3,fiber=3,results=100000,depth=2,size=4,count=200000
struct AllBounds {
  cat::Bounds model;
  syncat::Bounds syn;
};

AllBounds parse_bounds(const std::string& text) {
  AllBounds b;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--bounds", "expected key=value, got '" + item + "'");
    std::string k = item.substr(0, eq);
    long v = std::stol(item.substr(eq + 1));
    if (v < 0) throw CLI::ValidationError("--bounds", "negative bound " + item);
    if (k == "objects") b.model.max_objects = static_cast<int>(v);
    else if (k == "fiber") b.model.max_fiber = static_cast<int>(v);
    else if (k == "results") b.model.max_results = static_cast<size_t>(v);
    else if (k == "depth") b.syn.depth = static_cast<int>(v);
    else if (k == "size") b.syn.size = static_cast<int>(v);
    else if (k == "count") b.syn.max_count = static_cast<size_t>(v);
    else throw CLI::ValidationError("--bounds", "unknown bound '" + k + "'");
  }
  return b;
}

// --- check-sig ------------------------------------------------------------------

int check_sig(const fs::path& path, Report& r) {
  r.add("input", path.string());
  lf::PreSignature pre;
  try {
    pre = lf::parse_signature(slurp(path));
  } catch (const lf::SyntaxError& e) {
    r.add("verdict", "input-error");
    r.add("error", std::string("SyntaxError ") + e.what());
    return kInput;
  }
  r.add("entries", static_cast<long>(pre.entries.size()));
  try {
    auto sig = lf::check_signature(pre);
    for (const auto& c : sig.certificates) r.add("entry", c);
    r.add("verdict", "accepted");
    return kOk;
  } catch (const lf::CheckError& e) {
    r.add("verdict", "rejected");
    r.add("error", lf::to_string(e.kind()));
    r.add("rule", e.rule());
    r.add("failing-entry", e.entry);
    r.add("detail", e.detail());
    return kVerdict;
  }
}

// --- check ------------------------------------------------------------------------

void describe(const cat::FinCat& c, Report& r, const std::string& prefix = "") {
  r.add(prefix + "objects", join(c.objects(), " "));
  r.add(prefix + "arrows", static_cast<long>(c.num_arrows()));
  auto t = cat::terminal_object(c);
  r.add(prefix + "terminal", t ? c.object_name(*t) : "none");
}

std::vector<std::string> closure_names(const cat::FinCat& base, const std::vector<bool>& in) {
  std::vector<std::string> out;
  for (cat::Obj x = 0; x < base.num_objects(); ++x)
    if (in[x]) out.push_back(base.object_name(x));
  return out;
}

int check_model(const fs::path& path, const AllBounds& b, Report& r) {
  auto lm = io::load_model(path);
  r.add("name", lm.name);
  if (lm.natural()) {
    const auto& nm = std::get<cat::NaturalModel>(lm.model);
    r.add("mode", "natural");
    describe(*nm.base, r, "base-");
    r.add("types", static_cast<long>(nm.U->fiber(nm.terminal).size()));
    r.add("contextual", join(closure_names(*nm.base, cat::contextual_closure(nm)), " "));
    r.add("democratic", cat::is_democratic(nm) ? "yes" : "no");
    r.add("verdict", "valid");
    return kOk;
  }
  const auto& m = std::get<cat::Model>(lm.model);
  r.add("mode", "rm");
  r.add("theory", m.T->cat().name());
  describe(*m.base, r, "base-");
  r.add("contextual", join(closure_names(*m.base, cat::contextual_closure(m)), " "));
  r.add("democratic", cat::is_democratic(m) ? "yes" : "no");
  auto src = std::make_shared<const cat::Model>(cat::bi_initial_model(m.T));
  auto tgt = std::make_shared<const cat::Model>(m);
  auto h = cat::hom_category(src, tgt, b.model);
  r.add("bounds", "objects=" + std::to_string(b.model.max_objects) + ",fiber=" + std::to_string(b.model.max_fiber) +
                      ",results=" + std::to_string(b.model.max_results));
  r.add("morphisms-from-bi-initial", static_cast<long>(h.morphisms));
  r.add("contractible", h.contractible ? "yes" : "no");
  r.add("verdict", "valid");
  return kOk;
}

int check_file(const fs::path& path, const AllBounds& b, Report& r) {
  auto kind = io::file_kind(path);
  r.add("input", path.string());
  switch (kind) {
    case io::FileKind::Signature:
      return check_sig(path, r);
    case io::FileKind::FinCat: {
      r.add("kind", "fincat");
      auto c = io::load_fincat(path);
      describe(*c, r);
      break;
    }
    case io::FileKind::DFib: {
      r.add("kind", "dfib");
      auto d = io::load_dfib(path);
      r.add("base", d->base()->name());
      for (cat::Obj a = 0; a < d->base()->num_objects(); ++a)
        r.add("fiber", d->base()->object_name(a) + " : " + join(d->fiber(a), " "));
      break;
    }
    case io::FileKind::RMCat: {
      r.add("kind", "rmcat");
      auto t = io::load_rmcat(path);
      describe(t.cat(), r);
      std::vector<std::string> reps;
      for (auto f : t.representables()) reps.push_back(t.cat().arrow_name(f));
      r.add("representable", join(reps));
      r.add("pushforwards", static_cast<long>(t.pushforwards.size()));
      break;
    }
    case io::FileKind::Theory: {
      r.add("kind", "theory");
      auto th = io::load_theory(path);
      for (cat::Obj a = 0; a < th.T->cat().num_objects(); ++a)
        r.add("set", th.T->cat().object_name(a) + " = {" + join(th.sets[a]) + "}");
      r.add("cofiltered", cat::elements_cofiltered(th) ? "yes" : "no");
      break;
    }
    case io::FileKind::Model:
      r.add("kind", "model");
      return check_model(path, b, r);
    case io::FileKind::Unknown:
      r.add("verdict", "input-error");
      r.add("error", "unknown file kind");
      return kInput;
  }
  r.add("verdict", "valid");
  return kOk;
}

// --- syncat -------------------------------------------------------------------------

std::string arrow_label(const syncat::SynCat& sc, int a) {
  return std::to_string(sc.arrows[a].src) + "->" + std::to_string(sc.arrows[a].tgt) + " " + syncat::arrow_text(sc, a);
}

int syncat_cmd(const fs::path& path, const syncat::Bounds& b, bool dump, Report& r) {
  r.add("input", path.string());
  r.add("bounds", syncat::to_string(b));
  lf::CheckedSignature sig;
  try {
    sig = lf::check_signature(lf::parse_signature(slurp(path)));
  } catch (const lf::SyntaxError& e) {
    r.add("error", std::string("SyntaxError ") + e.what());
    return kInput;
  } catch (const lf::CheckError& e) {
    r.add("verdict", "rejected");
    r.add("error", e.what());
    return kVerdict;
  }
  auto sc = syncat::build_syncat(sig, b);
  r.add("contexts", static_cast<long>(sc.contexts.size()));
  for (size_t i = 0; i < sc.contexts.size(); ++i)
    r.add("context", std::to_string(i) + " " + syncat::context_text(sc.contexts[i]));
  r.add("arrows", static_cast<long>(sc.arrows.size()));
  for (size_t a = 0; a < sc.contexts.size(); ++a)
    for (size_t c = 0; c < sc.contexts.size(); ++c)
      r.add("hom", std::to_string(a) + " " + std::to_string(c) + " " + std::to_string(sc.hom(a, c).size()));
  for (int g : syncat::generating_representables(sc)) r.add("generating", arrow_label(sc, g));
  r.add("terminal", syncat::check_terminal(sc) ? "yes" : "no");
  int code = kOk;
  if (!sc.overflow) {
    auto pr = syncat::check_representable_pullbacks(sig, sc);
    for (const auto& c : pr.checks)
      r.add("pullback", arrow_label(sc, c.generator) + " along " + arrow_label(sc, c.along) + " : " +
                            (c.verified ? "verified" : "unverified") + (c.note.empty() ? "" : " (" + c.note + ")"));
    r.add("pullbacks-verified", static_cast<long>(pr.verified));
    r.add("pullbacks-out-of-bounds", static_cast<long>(pr.out_of_bounds));
    if (!pr.ok()) code = kVerdict;
  }
  r.add("category", sc.cat ? "closed" : "not closed under composition");
  for (const auto& c : sc.caveats) r.caveat(c);
  if (dump && sc.cat) r.add("dump", "\n" + syncat::fincat_dump(sc));
  if (sc.overflow) return kOverflow;
  return code;
}

// --- lang ---------------------------------------------------------------------------

int lang_cmd(const fs::path& path, Report& r) {
  r.add("input", path.string());
  auto lm = io::load_model(path);
  r.add("name", lm.name);
  if (lm.natural()) {
    const auto& nm = std::get<cat::NaturalModel>(lm.model);
    auto l = cat::internal_language(nm);
    r.add("set", nm.U->name() + " = {" + join(l.types) + "}");
    r.add("set", nm.E->name() + " = {" + join(l.terms) + "}");
    for (size_t i = 0; i < l.terms.size(); ++i) r.add("typing", l.terms[i] + " : " + l.types[l.type_of[i]]);
    return kOk;
  }
  const auto& m = std::get<cat::Model>(lm.model);
  auto th = cat::internal_language(m);
  const auto& t = th.T->cat();
  for (cat::Obj a = 0; a < t.num_objects(); ++a) r.add("set", t.object_name(a) + " = {" + join(th.sets[a]) + "}");
  for (cat::Arr f = 0; f < t.num_arrows(); ++f) {
    if (t.is_identity(f)) continue;
    std::vector<std::string> pairs;
    for (size_t i = 0; i < th.sets[t.src(f)].size(); ++i)
      pairs.push_back(th.sets[t.src(f)][i] + " -> " + th.sets[t.tgt(f)][th.maps[f][i]]);
    r.add("map", t.arrow_name(f) + " : " + (pairs.empty() ? "(empty)" : join(pairs)));
  }
  return kOk;
}

// --- props --------------------------------------------------------------------------

int props_cmd(const std::vector<std::string>& suites, const props::Params& p, Report& r) {
  r.add("seed", std::to_string(p.seed));
  r.add("size", static_cast<long>(p.size));
  r.add("cases", static_cast<long>(p.cases));
  int code = kOk;
  for (const auto& s : suites) {
    auto rep = props::run_suite(s, p);
    r.add("suite", s + " " + std::to_string(rep.passed) + "/" + std::to_string(rep.cases) +
                       (rep.ok() ? " pass" : " FAIL"));
    for (const auto& n : rep.notes) r.add("note", s + ": " + n);
    for (const auto& f : rep.failures) r.add("failure", s + ": " + f);
    if (!rep.ok()) code = kVerdict;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rmk: logical framework checker and finite semantics workbench"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--format", opt.format, "text or json-like")
      ->check(CLI::IsMember({"text", "json-like"}))
      ->capture_default_str();
  app.add_option("--bounds", opt.bounds, "objects=N,fiber=N,results=N,depth=N,size=N,count=N");

  fs::path path;
  auto* sig_cmd = app.add_subcommand("check-sig", "check a .lfsig signature");
  sig_cmd->add_option("file", path)->required();

  std::vector<fs::path> paths;
  auto* chk = app.add_subcommand("check", "validate .fincat .dfib .rmcat .theory .model .lfsig files");
  chk->add_option("files", paths)->required();

  int depth = -1, size = -1;
  bool dump = false;
  auto* syn = app.add_subcommand("syncat", "bounded syntactic category of a signature");
  syn->add_option("file", path)->required();
  syn->add_option("--depth", depth, "largest context length");
  syn->add_option("--size", size, "largest term size");
  syn->add_flag("--dump", dump, "print the category in .fincat form");

  auto* lang = app.add_subcommand("lang", "internal language of a model");
  lang->add_option("file", path)->required();

  props::Params params;
  std::string suite = "all";
  auto* pr = app.add_subcommand("props", "run a property suite");
  pr->add_option("--suite", suite, "suite name or all")->capture_default_str();
  pr->add_option("--seed", params.seed)->capture_default_str();
  pr->add_option("--size", params.size)->capture_default_str();
  pr->add_option("--cases", params.cases)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  std::string command = app.get_subcommands().front()->get_name();
  Report r(command);
  auto start = std::chrono::steady_clock::now();
  int code = kOk;
  try {
    AllBounds b = parse_bounds(opt.bounds);
    if (depth >= 0) b.syn.depth = depth;
    if (size >= 0) b.syn.size = size;
    if (*sig_cmd) {
      code = check_sig(path, r);
    } else if (*chk) {
      for (const auto& p : paths) code = std::max(code, check_file(p, b, r));
    } else if (*syn) {
      code = syncat_cmd(path, b.syn, dump, r);
    } else if (*lang) {
      code = lang_cmd(path, r);
    } else if (*pr) {
      std::vector<std::string> suites = props::suite_names();
      if (suite != "all") {
        if (std::find(suites.begin(), suites.end(), suite) == suites.end())
          throw std::invalid_argument("unknown suite '" + suite + "'");
        suites = {suite};
      }
      code = props_cmd(suites, params, r);
    }
  } catch (const cat::LawError& e) {
    r.add("verdict", "invalid");
    r.add("error", e.what());
    if (!e.witness().empty()) r.add("witness", join(e.witness()));
    code = kVerdict;
  } catch (const cat::Overflow& e) {
    r.add("verdict", "overflow");
    r.add("error", e.what());
    code = kOverflow;
  } catch (const lf::CheckError& e) {
    r.add("verdict", "rejected");
    r.add("error", e.what());
    code = kVerdict;
  } catch (const std::exception& e) {
    r.add("verdict", "input-error");
    r.add("error", e.what());
    code = kInput;
  }
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  r.print(std::cout, opt.format == "json-like", ms);
  return code;
}
