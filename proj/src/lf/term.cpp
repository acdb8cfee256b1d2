#include "rmk/lf/term.hpp"

#include <algorithm>
#include <sstream>

namespace rmk::lf {

namespace {

TermPtr make(TermKind k, std::string name, std::vector<TermPtr> children) {
  return std::make_shared<const Term>(k, std::move(name), std::move(children));
}

void collect_free(const TermPtr& t, std::vector<std::string>& bound, std::set<std::string>& out) {
  if (!t) return;
  auto under = [&](const std::string& x, const TermPtr& part) {
    bound.push_back(x);
    collect_free(part, bound, out);
    bound.pop_back();
  };
  switch (t->kind()) {
    case TermKind::Box:
    case TermKind::Rep:
      return;
    case TermKind::Var:
      if (std::find(bound.begin(), bound.end(), t->name()) == bound.end()) out.insert(t->name());
      return;
    case TermKind::Pi:
      collect_free(t->domain(), bound, out);
      under(t->name(), t->codomain());
      return;
    case TermKind::Abs:
      collect_free(t->domain(), bound, out);
      under(t->name(), t->body());
      return;
    case TermKind::App:
      collect_free(t->domain(), bound, out);
      under(t->name(), t->codomain());
      collect_free(t->function(), bound, out);
      collect_free(t->argument(), bound, out);
      return;
    default:
      for (const auto& c : t->children()) collect_free(c, bound, out);
  }
}

TermPtr subst_rec(const TermPtr& t, const Substitution& s);

// Substitutes under the binder `x`; returns the (possibly renamed) binder and
// the rewritten bound part.
std::pair<std::string, TermPtr> subst_binder(const std::string& x, const TermPtr& part,
                                             const Substitution& s) {
  if (!part) return {x, part};
  Substitution inner = s;
  inner.erase(x);
  if (inner.empty()) return {x, part};
  auto fv = free_vars(part);
  std::set<std::string> repl_fv;
  bool relevant = false;
  for (const auto& [v, r] : inner) {
    if (!fv.count(v)) continue;
    relevant = true;
    auto rf = free_vars(r);
    repl_fv.insert(rf.begin(), rf.end());
  }
  if (!relevant) return {x, part};
  std::string y = x;
  if (repl_fv.count(x)) {
    std::set<std::string> avoid = fv;
    avoid.insert(repl_fv.begin(), repl_fv.end());
    for (const auto& kv : inner) avoid.insert(kv.first);
    y = fresh_name(x, avoid);
    inner[x] = mk_var(y);
  }
  return {y, subst_rec(part, inner)};
}

TermPtr subst_rec(const TermPtr& t, const Substitution& s) {
  if (!t || s.empty()) return t;
  switch (t->kind()) {
    case TermKind::Box:
    case TermKind::Rep:
      return t;
    case TermKind::Var: {
      auto it = s.find(t->name());
      return it == s.end() ? t : it->second;
    }
    case TermKind::Pi: {
      auto dom = subst_rec(t->domain(), s);
      auto [x, cod] = subst_binder(t->name(), t->codomain(), s);
      return mk_pi(dom, x, cod);
    }
    case TermKind::Abs: {
      auto dom = subst_rec(t->domain(), s);
      auto [x, body] = subst_binder(t->name(), t->body(), s);
      return mk_abs(dom, x, body);
    }
    case TermKind::App: {
      auto dom = subst_rec(t->domain(), s);
      auto [x, cod] = subst_binder(t->name(), t->codomain(), s);
      return mk_app(dom, x, cod, subst_rec(t->function(), s), subst_rec(t->argument(), s));
    }
    default: {
      std::vector<TermPtr> kids;
      kids.reserve(t->children().size());
      for (const auto& c : t->children()) kids.push_back(subst_rec(c, s));
      return make(t->kind(), t->name(), std::move(kids));
    }
  }
}

int lookup(const std::vector<std::string>& env, const std::string& x) {
  for (int i = static_cast<int>(env.size()) - 1; i >= 0; --i)
    if (env[i] == x) return i;
  return -1;
}

bool aeq(const TermPtr& a, const TermPtr& b, std::vector<std::string>& ea, std::vector<std::string>& eb) {
  if (!a || !b) return !a && !b;
  if (a->kind() != b->kind()) return false;
  auto under = [&](const TermPtr& pa, const TermPtr& pb) {
    ea.push_back(a->name());
    eb.push_back(b->name());
    bool r = aeq(pa, pb, ea, eb);
    ea.pop_back();
    eb.pop_back();
    return r;
  };
  switch (a->kind()) {
    case TermKind::Box:
    case TermKind::Rep:
      return true;
    case TermKind::Var: {
      int ia = lookup(ea, a->name()), ib = lookup(eb, b->name());
      if (ia >= 0 || ib >= 0) return ia == ib;
      return a->name() == b->name();
    }
    case TermKind::Sym:
      if (a->name() != b->name() || a->args().size() != b->args().size()) return false;
      for (size_t i = 0; i < a->args().size(); ++i)
        if (!aeq(a->args()[i], b->args()[i], ea, eb)) return false;
      return true;
    case TermKind::Pi:
      return aeq(a->domain(), b->domain(), ea, eb) && under(a->codomain(), b->codomain());
    case TermKind::Abs:
      return aeq(a->domain(), b->domain(), ea, eb) && under(a->body(), b->body());
    case TermKind::App:
      return aeq(a->domain(), b->domain(), ea, eb) && under(a->codomain(), b->codomain()) &&
             aeq(a->function(), b->function(), ea, eb) && aeq(a->argument(), b->argument(), ea, eb);
    default:
      for (size_t i = 0; i < a->children().size(); ++i)
        if (!aeq(a->children()[i], b->children()[i], ea, eb)) return false;
      return true;
  }
}

void key_rec(const TermPtr& t, std::vector<std::string>& env, std::ostringstream& out, bool erase) {
  if (!t) {
    out << '?';
    return;
  }
  auto under = [&](const TermPtr& part) {
    env.push_back(t->name());
    key_rec(part, env, out, erase);
    env.pop_back();
  };
  switch (t->kind()) {
    case TermKind::Box: out << "Box"; return;
    case TermKind::Rep: out << "Rep"; return;
    case TermKind::Var: {
      int i = lookup(env, t->name());
      if (i >= 0) out << '#' << i;
      else out << '$' << t->name();
      return;
    }
    case TermKind::Sym:
      out << t->name() << '(';
      for (const auto& c : t->args()) {
        key_rec(c, env, out, erase);
        out << ',';
      }
      out << ')';
      return;
    case TermKind::Pi:
      out << "Pi(";
      key_rec(t->domain(), env, out, erase);
      out << ',';
      under(t->codomain());
      out << ')';
      return;
    case TermKind::Abs:
      out << "Lam(";
      if (!erase) key_rec(t->domain(), env, out, erase);
      out << ',';
      under(t->body());
      out << ')';
      return;
    case TermKind::App:
      out << "App(";
      if (!erase) {
        key_rec(t->domain(), env, out, erase);
        out << ',';
        under(t->codomain());
        out << ',';
      }
      key_rec(t->function(), env, out, erase);
      out << ',';
      key_rec(t->argument(), env, out, erase);
      out << ')';
      return;
    case TermKind::Eq:
      out << "Eq(";
      for (const auto& c : t->children()) {
        key_rec(c, env, out, erase);
        out << ',';
      }
      out << ')';
      return;
    case TermKind::Refl:
      out << "Refl(";
      key_rec(t->subject(), env, out, erase);
      out << ')';
      return;
  }
}

}  // namespace

TermPtr mk_box() { return make(TermKind::Box, "", {}); }
TermPtr mk_rep() { return make(TermKind::Rep, "", {}); }
TermPtr mk_sym(std::string name, std::vector<TermPtr> args) {
  return make(TermKind::Sym, std::move(name), std::move(args));
}
TermPtr mk_var(std::string name) { return make(TermKind::Var, std::move(name), {}); }
TermPtr mk_pi(TermPtr dom, std::string x, TermPtr cod) {
  return make(TermKind::Pi, std::move(x), {std::move(dom), std::move(cod)});
}
TermPtr mk_abs(TermPtr dom, std::string x, TermPtr body) {
  return make(TermKind::Abs, std::move(x), {std::move(dom), std::move(body)});
}
TermPtr mk_app(TermPtr dom, std::string x, TermPtr cod, TermPtr fn, TermPtr arg) {
  return make(TermKind::App, std::move(x),
              {std::move(dom), std::move(cod), std::move(fn), std::move(arg)});
}
TermPtr mk_eq(TermPtr type, TermPtr lhs, TermPtr rhs) {
  return make(TermKind::Eq, "", {std::move(type), std::move(lhs), std::move(rhs)});
}
TermPtr mk_refl(TermPtr subject) { return make(TermKind::Refl, "", {std::move(subject)}); }

TermPtr mk_surface_app(TermPtr fn, TermPtr arg) {
  return mk_app(nullptr, "_", nullptr, std::move(fn), std::move(arg));
}

std::set<std::string> free_vars(const TermPtr& t) {
  std::set<std::string> out;
  std::vector<std::string> bound;
  collect_free(t, bound, out);
  return out;
}

bool occurs_free(const std::string& x, const TermPtr& t) { return free_vars(t).count(x) > 0; }

TermPtr substitute(const TermPtr& t, const Substitution& s) { return subst_rec(t, s); }

TermPtr substitute(const TermPtr& t, const std::string& x, const TermPtr& replacement) {
  return subst_rec(t, Substitution{{x, replacement}});
}

bool alpha_eq(const TermPtr& a, const TermPtr& b) {
  std::vector<std::string> ea, eb;
  return aeq(a, b, ea, eb);
}

int term_size(const TermPtr& t) {
  if (!t) return 0;
  switch (t->kind()) {
    case TermKind::Abs:
      return 1 + term_size(t->body());
    case TermKind::App:
      return 1 + term_size(t->function()) + term_size(t->argument());
    default: {
      int n = 1;
      for (const auto& c : t->children()) n += term_size(c);
      return n;
    }
  }
}

bool fully_annotated(const TermPtr& t) {
  if (!t) return false;
  for (const auto& c : t->children())
    if (!fully_annotated(c)) return false;
  return true;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  for (int n = 1;; ++n) {
    std::string cand = base + std::to_string(n);
    if (!avoid.count(cand)) return cand;
  }
}

std::string canonical_key(const TermPtr& t) {
  std::ostringstream out;
  std::vector<std::string> env;
  key_rec(t, env, out, false);
  return out.str();
}

std::string erased_key(const TermPtr& t) {
  std::ostringstream out;
  std::vector<std::string> env;
  key_rec(t, env, out, true);
  return out.str();
}

}  // namespace rmk::lf
