#include "rmk/lf/checker.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <numeric>

namespace rmk::lf {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::None: return "None";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnboundSymbol: return "UnboundSymbol";
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::DuplicateSymbol: return "DuplicateSymbol";
    case ErrorKind::IllFormedContext: return "IllFormedContext";
    case ErrorKind::SortError: return "SortError";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::NotRepresentable: return "NotRepresentable";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::NotAFunction: return "NotAFunction";
    case ErrorKind::CannotInfer: return "CannotInfer";
    case ErrorKind::FuelExhausted: return "FuelExhausted";
  }
  return "?";
}

long default_fuel() {
  if (const char* env = std::getenv("RMK_MAX_STEPS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return v;
  }
  return 10000;
}

namespace {

bool is_proof_type(const TermPtr& t) {
  TermPtr cur = t;
  while (cur && cur->is(TermKind::Pi)) cur = cur->codomain();
  return cur && cur->is(TermKind::Eq);
}

const TermPtr* lookup_ctx(const Context& ctx, const std::string& x) {
  for (auto it = ctx.rbegin(); it != ctx.rend(); ++it)
    if (it->first == x) return &it->second;
  return nullptr;
}

Context extend(const Context& ctx, const std::string& x, const TermPtr& a) {
  Context out = ctx;
  out.emplace_back(x, a);
  return out;
}

}  // namespace

const Decl* Signature::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &decls_[it->second];
}

const std::vector<size_t>& Signature::rules_for(const std::string& head) const {
  static const std::vector<size_t> none;
  auto it = by_head_.find(head);
  return it == by_head_.end() ? none : it->second;
}

void Signature::add(Decl d) {
  if (d.proof_arg.size() != d.context.size()) {
    d.proof_arg.clear();
    for (const auto& [x, a] : d.context) d.proof_arg.push_back(is_proof_type(a));
  }
  if (d.sort == SortKind::Type && d.type && d.type->is(TermKind::Eq)) {
    std::set<std::string> vars;
    for (const auto& [x, a] : d.context) vars.insert(x);
    auto is_pvar = [&](const TermPtr& t) { return t->is(TermKind::Var) && vars.count(t->name()); };
    const TermPtr& l = d.type->lhs();
    const TermPtr& r = d.type->rhs();
    auto add_rule = [&](const TermPtr& from, const TermPtr& to) {
      std::string head = from->is(TermKind::Sym) ? from->name() : "@";
      by_head_[head].push_back(rules_.size());
      rules_.push_back({d.name, d.context, from, to});
    };
    // A side may serve as a left-hand side when it is not a bare variable and
    // mentions every variable of the other side.
    auto covers = [&](const TermPtr& from, const TermPtr& to) {
      auto ff = free_vars(from);
      for (const auto& v : free_vars(to))
        if (vars.count(v) && !ff.count(v)) return false;
      return true;
    };
    if (!is_pvar(l) && covers(l, r)) add_rule(l, r);
    else if (!is_pvar(r) && covers(r, l)) add_rule(r, l);
    else schemas_.push_back({d.name, d.context, d.type->eq_type(), l, r});
  }
  index_[d.name] = decls_.size();
  decls_.push_back(std::move(d));
}

// All checking logic lives here; one Impl per public call so the set of
// equality goals in progress is per-query state.
class Checker::Impl {
 public:
  Impl(Checker& c) : c_(c), sig_(c.sig_) {}

  [[noreturn]] static void fail(ErrorKind k, const std::string& rule, const std::string& detail) {
    throw CheckError(k, rule, detail);
  }

  void tick() {
    if (--c_.remaining_ < 0)
      fail(ErrorKind::FuelExhausted, "conv",
           "reduction fuel of " + std::to_string(c_.fuel_) + " steps exhausted");
  }

  std::string fresh(const Context& ctx, const std::string& base, std::initializer_list<TermPtr> terms) {
    std::set<std::string> avoid;
    for (const auto& [x, a] : ctx) avoid.insert(x);
    for (const auto& t : terms) {
      auto fv = free_vars(t);
      avoid.insert(fv.begin(), fv.end());
    }
    if (sig_.find(base)) avoid.insert(base);
    std::string b = (base.empty() || base == "_") ? "x" : base;
    std::string name = fresh_name(b, avoid);
    while (sig_.find(name)) {
      avoid.insert(name);
      name = fresh_name(b, avoid);
    }
    return name;
  }

  // ---------- elaboration ----------

  Context check_context(const PreContext& pre) {
    Context ctx;
    for (const auto& [x, a] : pre) {
      if (lookup_ctx(ctx, x))
        fail(ErrorKind::IllFormedContext, "ctx-ext", "variable " + x + " declared twice");
      if (x == "_") fail(ErrorKind::IllFormedContext, "ctx-ext", "'_' is not a variable name");
      ctx.emplace_back(x, type_former(ctx, a, nullptr));
    }
    return ctx;
  }

  std::vector<TermPtr> check_args(const Context& ctx, const Decl& d, const std::vector<TermPtr>& args,
                                  Substitution* out_subst = nullptr) {
    if (args.size() != d.context.size())
      fail(ErrorKind::ArityMismatch, "sym-app",
           d.name + " expects " + std::to_string(d.context.size()) + " arguments, got " +
               std::to_string(args.size()));
    Substitution s;
    std::vector<TermPtr> out;
    for (size_t i = 0; i < args.size(); ++i) {
      TermPtr ti = substitute(d.context[i].second, s);
      TermPtr ai = check(ctx, args[i], ti);
      s[d.context[i].first] = ai;
      out.push_back(ai);
    }
    if (out_subst) *out_subst = std::move(s);
    return out;
  }

  TermPtr as_application(const std::string& head, const std::vector<TermPtr>& args) {
    TermPtr f = mk_var(head);
    for (const auto& a : args) f = mk_surface_app(f, a);
    return f;
  }

  TermPtr type_former(const Context& ctx, const TermPtr& a, bool* rep) {
    if (rep) *rep = false;
    if (!a) fail(ErrorKind::CannotInfer, "type", "missing type");
    switch (a->kind()) {
      case TermKind::Box:
      case TermKind::Rep:
        fail(ErrorKind::SortError, "type", "the sort " + print_term(a) + " is not a type");
      case TermKind::Var:
        if (lookup_ctx(ctx, a->name()))
          fail(ErrorKind::SortError, "type", "variable " + a->name() + " is a term, not a type");
        if (sig_.find(a->name())) return type_former(ctx, mk_sym(a->name()), rep);
        fail(ErrorKind::UnboundSymbol, "sym-app", "unbound symbol " + a->name());
      case TermKind::Sym: {
        const Decl* d = sig_.find(a->name());
        if (!d) {
          if (lookup_ctx(ctx, a->name()))
            fail(ErrorKind::SortError, "type", print_term(a) + " is a term, not a type");
          fail(ErrorKind::UnboundSymbol, "sym-app", "unbound symbol " + a->name());
        }
        if (d->sort == SortKind::Type)
          fail(ErrorKind::SortError, "type",
               print_term(a) + " is a term of type " + print_term(d->type) + ", not a type");
        auto args = check_args(ctx, *d, a->args());
        if (rep) *rep = d->sort == SortKind::Rep;
        return mk_sym(a->name(), std::move(args));
      }
      case TermKind::Pi: {
        bool drep = false;
        TermPtr dom = type_former(ctx, a->domain(), &drep);
        if (!drep)
          fail(ErrorKind::NotRepresentable, "pi-form",
               "domain " + print_term(dom) + " of a dependent product is not representable");
        std::string x = binder_name(ctx, a->name(), a->codomain());
        TermPtr cod = a->name() == x ? a->codomain() : substitute(a->codomain(), a->name(), mk_var(x));
        TermPtr cod2 = type_former(extend(ctx, x, dom), cod, nullptr);
        return mk_pi(dom, x, cod2);
      }
      case TermKind::Eq: {
        TermPtr type, l, r;
        if (a->eq_type()) {
          type = type_former(ctx, a->eq_type(), nullptr);
          l = check(ctx, a->lhs(), type);
        } else {
          l = infer(ctx, a->lhs(), &type);
        }
        r = check(ctx, a->rhs(), type);
        return mk_eq(type, l, r);
      }
      default:
        fail(ErrorKind::SortError, "type", print_term(a) + " is a term, not a type");
    }
  }

  std::string binder_name(const Context& ctx, const std::string& x, const TermPtr& part) {
    if (x != "_" && !lookup_ctx(ctx, x) && !sig_.find(x)) return x;
    return fresh(ctx, x, {part});
  }

  TermPtr infer(const Context& ctx, const TermPtr& a, TermPtr* type) {
    switch (a->kind()) {
      case TermKind::Var: {
        if (const TermPtr* t = lookup_ctx(ctx, a->name())) {
          *type = *t;
          return a;
        }
        if (sig_.find(a->name())) return infer(ctx, mk_sym(a->name()), type);
        fail(ErrorKind::UnboundVariable, "var", "unbound variable " + a->name());
      }
      case TermKind::Sym: {
        const Decl* d = sig_.find(a->name());
        if (!d) {
          if (lookup_ctx(ctx, a->name())) return infer(ctx, as_application(a->name(), a->args()), type);
          fail(ErrorKind::UnboundSymbol, "sym-app", "unbound symbol " + a->name());
        }
        if (d->sort != SortKind::Type)
          fail(ErrorKind::SortError, "sym-app", print_term(a) + " is a type, not a term");
        Substitution s;
        auto args = check_args(ctx, *d, a->args(), &s);
        *type = substitute(d->type, s);
        return mk_sym(a->name(), std::move(args));
      }
      case TermKind::Abs: {
        if (!a->domain())
          fail(ErrorKind::CannotInfer, "abs",
               "cannot infer the domain of " + print_term(a) + "; annotate the binder");
        bool drep = false;
        TermPtr dom = type_former(ctx, a->domain(), &drep);
        if (!drep)
          fail(ErrorKind::NotRepresentable, "abs",
               "domain " + print_term(dom) + " of an abstraction is not representable");
        std::string x = binder_name(ctx, a->name(), a->body());
        TermPtr body = a->name() == x ? a->body() : substitute(a->body(), a->name(), mk_var(x));
        TermPtr btype;
        TermPtr body2 = infer(extend(ctx, x, dom), body, &btype);
        *type = mk_pi(dom, x, btype);
        return mk_abs(dom, x, body2);
      }
      case TermKind::App: {
        TermPtr ftype;
        TermPtr f = infer(ctx, a->function(), &ftype);
        if (!ftype->is(TermKind::Pi))
          fail(ErrorKind::NotAFunction, "app",
               print_term(a->function()) + " has type " + print_term(ftype) + ", not a function type");
        TermPtr pi = ftype;
        if (a->domain() && a->codomain()) {
          TermPtr given = type_former(ctx, mk_pi(a->domain(), a->name(), a->codomain()), nullptr);
          if (!types_equal(ctx, given, ftype))
            fail(ErrorKind::TypeMismatch, "app",
                 "annotation " + print_term(given) + " does not match " + print_term(ftype));
          pi = given;
        }
        TermPtr arg = check(ctx, a->argument(), pi->domain());
        *type = substitute(pi->codomain(), pi->name(), arg);
        return mk_app(pi->domain(), pi->name(), pi->codomain(), f, arg);
      }
      case TermKind::Refl: {
        TermPtr st;
        TermPtr s = infer(ctx, a->subject(), &st);
        *type = mk_eq(st, s, s);
        return mk_refl(s);
      }
      default:
        fail(ErrorKind::SortError, "term", print_term(a) + " is a type or sort, not a term");
    }
  }

  TermPtr check(const Context& ctx, const TermPtr& a, const TermPtr& type) {
    if (a->is(TermKind::Abs)) {
      if (!type->is(TermKind::Pi))
        fail(ErrorKind::TypeMismatch, "abs",
             "abstraction " + print_term(a) + " checked against non-function type " + print_term(type));
      TermPtr dom = type->domain();
      if (a->domain()) {
        TermPtr given = type_former(ctx, a->domain(), nullptr);
        if (!types_equal(ctx, given, dom))
          fail(ErrorKind::TypeMismatch, "abs",
               "binder type " + print_term(given) + " differs from " + print_term(dom));
      }
      std::string x = binder_name(ctx, a->name(), a->body());
      TermPtr body = a->name() == x ? a->body() : substitute(a->body(), a->name(), mk_var(x));
      TermPtr cod = substitute(type->codomain(), type->name(), mk_var(x));
      TermPtr body2 = check(extend(ctx, x, dom), body, cod);
      return mk_abs(dom, x, body2);
    }
    if (a->is(TermKind::Refl) && type->is(TermKind::Eq)) {
      TermPtr s = check(ctx, a->subject(), type->eq_type());
      if (!equal(ctx, s, type->lhs(), type->eq_type()) || !equal(ctx, s, type->rhs(), type->eq_type()))
        fail(ErrorKind::TypeMismatch, "refl",
             print_term(mk_refl(s)) + " does not prove " + print_term(type));
      return mk_refl(s);
    }
    TermPtr inferred;
    TermPtr out = infer(ctx, a, &inferred);
    if (!types_equal(ctx, inferred, type))
      fail(ErrorKind::TypeMismatch, "conv",
           print_term(a) + " has type " + print_term(inferred) + " but " + print_term(type) +
               " was expected");
    return out;
  }

  // ---------- normalization ----------

  struct Matcher {
    const Signature& sig;
    const std::set<std::string>& pvars;
    Substitution& bind;
    std::vector<std::string> penv, senv;

    static int level(const std::vector<std::string>& env, const std::string& x) {
      for (int i = static_cast<int>(env.size()) - 1; i >= 0; --i)
        if (env[i] == x) return i;
      return -1;
    }

    bool go(const TermPtr& p, const TermPtr& s) {
      if (!p || !s) return !p && !s;
      if (p->is(TermKind::Var)) {
        int ip = level(penv, p->name());
        if (ip >= 0) return s->is(TermKind::Var) && level(senv, s->name()) == ip;
        if (pvars.count(p->name())) {
          for (const auto& v : free_vars(s))
            if (level(senv, v) >= 0) return false;
          auto it = bind.find(p->name());
          if (it != bind.end()) return erased_key(it->second) == erased_key(s);
          bind[p->name()] = s;
          return true;
        }
        return s->is(TermKind::Var) && s->name() == p->name() && level(senv, s->name()) < 0;
      }
      if (p->kind() != s->kind()) return false;
      auto under = [&](const TermPtr& pp, const TermPtr& ss) {
        penv.push_back(p->name());
        senv.push_back(s->name());
        bool r = go(pp, ss);
        penv.pop_back();
        senv.pop_back();
        return r;
      };
      switch (p->kind()) {
        case TermKind::Box:
        case TermKind::Rep:
          return true;
        case TermKind::Sym: {
          if (p->name() != s->name() || p->args().size() != s->args().size()) return false;
          const Decl* d = sig.find(p->name());
          for (size_t i = 0; i < p->args().size(); ++i) {
            if (d && i < d->proof_arg.size() && d->proof_arg[i]) continue;
            if (!go(p->args()[i], s->args()[i])) return false;
          }
          return true;
        }
        case TermKind::App:
          return go(p->function(), s->function()) && go(p->argument(), s->argument());
        case TermKind::Abs:
          return under(p->body(), s->body());
        case TermKind::Pi:
          return go(p->domain(), s->domain()) && under(p->codomain(), s->codomain());
        case TermKind::Eq:
          if (p->eq_type() && s->eq_type() && !go(p->eq_type(), s->eq_type())) return false;
          return go(p->lhs(), s->lhs()) && go(p->rhs(), s->rhs());
        case TermKind::Refl:
          return go(p->subject(), s->subject());
        default:
          return false;
      }
    }
  };

  static std::set<std::string> tele_names(const Context& tele) {
    std::set<std::string> out;
    for (const auto& [x, a] : tele) out.insert(x);
    return out;
  }

  TermPtr try_rules(const std::string& head, const TermPtr& t, const Context* ctx) {
    for (size_t idx : sig_.rules_for(head)) {
      const RewriteRule& r = sig_.rules()[idx];
      auto pvars = tele_names(r.tele);
      Substitution bind;
      Matcher m{sig_, pvars, bind, {}, {}};
      if (!m.go(r.lhs, t)) continue;
      bool complete = true;
      for (const auto& v : free_vars(r.rhs))
        if (pvars.count(v) && !bind.count(v)) complete = false;
      if (!complete) continue;
      // Data premises the left-hand side does not determine must be
      // witnessed by the context; equation premises are implied by the
      // typing of the matched term.
      std::vector<size_t> pending;
      for (size_t i = r.tele.size(); i-- > 0;)
        if (!bind.count(r.tele[i].first) && !is_proof_type(r.tele[i].second)) pending.push_back(i);
      if (!pending.empty()) {
        if (!ctx) continue;
        int budget = 64;
        Substitution found;
        if (!instantiate(*ctx, r.tele, pvars, pending, 0, bind, budget, false, &found)) continue;
      }
      tick();
      return substitute(r.rhs, bind);
    }
    return nullptr;
  }

  TermPtr norm(const TermPtr& t, const Context* ctx = nullptr) {
    if (!t) return t;
    switch (t->kind()) {
      case TermKind::Sym: {
        std::vector<TermPtr> args;
        args.reserve(t->args().size());
        for (const auto& a : t->args()) args.push_back(norm(a, ctx));
        TermPtr u = mk_sym(t->name(), std::move(args));
        if (TermPtr r = try_rules(t->name(), u, ctx)) return norm(r, ctx);
        return u;
      }
      case TermKind::Abs:
        return mk_abs(t->domain(), t->name(), norm(t->body(), ctx));
      case TermKind::App: {
        TermPtr f = norm(t->function(), ctx);
        TermPtr a = norm(t->argument(), ctx);
        if (f->is(TermKind::Abs)) {
          tick();
          return norm(substitute(f->body(), f->name(), a), ctx);
        }
        TermPtr u = mk_app(t->domain(), t->name(), t->codomain(), f, a);
        if (TermPtr r = try_rules("@", u, ctx)) return norm(r, ctx);
        return u;
      }
      case TermKind::Refl:
        return mk_refl(norm(t->subject(), ctx));
      case TermKind::Eq:
        return mk_eq(t->eq_type(), norm(t->lhs(), ctx), norm(t->rhs(), ctx));
      case TermKind::Pi:
        return mk_pi(norm(t->domain(), ctx), t->name(), norm(t->codomain(), ctx));
      default:
        return t;
    }
  }

  // ---------- equality ----------

  bool types_equal(const Context& ctx, const TermPtr& a, const TermPtr& b) {
    if (a->kind() != b->kind()) return false;
    switch (a->kind()) {
      case TermKind::Box:
      case TermKind::Rep:
        return true;
      case TermKind::Sym: {
        if (a->name() != b->name() || a->args().size() != b->args().size()) return false;
        const Decl* d = sig_.find(a->name());
        if (!d) return false;
        return args_equal(ctx, *d, a->args(), b->args());
      }
      case TermKind::Pi: {
        if (!types_equal(ctx, a->domain(), b->domain())) return false;
        std::string y = fresh(ctx, a->name(), {a->codomain(), b->codomain()});
        Context c2 = extend(ctx, y, a->domain());
        return types_equal(c2, substitute(a->codomain(), a->name(), mk_var(y)),
                           substitute(b->codomain(), b->name(), mk_var(y)));
      }
      case TermKind::Eq:
        return types_equal(ctx, a->eq_type(), b->eq_type()) &&
               equal(ctx, a->lhs(), b->lhs(), a->eq_type()) &&
               equal(ctx, a->rhs(), b->rhs(), a->eq_type());
      default:
        return false;
    }
  }

  bool args_equal(const Context& ctx, const Decl& d, const std::vector<TermPtr>& as,
                  const std::vector<TermPtr>& bs) {
    Substitution s;
    for (size_t i = 0; i < as.size(); ++i) {
      if (!(i < d.proof_arg.size() && d.proof_arg[i])) {
        TermPtr ti = substitute(d.context[i].second, s);
        if (!equal(ctx, as[i], bs[i], ti)) return false;
      }
      s[d.context[i].first] = as[i];
    }
    return true;
  }

  bool equal(const Context& ctx, const TermPtr& a, const TermPtr& b, const TermPtr& type) {
    if (type->is(TermKind::Eq)) return true;
    if (type->is(TermKind::Pi)) {
      std::string y = fresh(ctx, type->name(), {a, b, type->codomain()});
      TermPtr vy = mk_var(y);
      TermPtr cod = substitute(type->codomain(), type->name(), vy);
      auto app = [&](const TermPtr& f) {
        return mk_app(type->domain(), type->name(), type->codomain(), f, vy);
      };
      return equal(extend(ctx, y, type->domain()), app(a), app(b), cod);
    }
    return equal_base(ctx, norm(a, &ctx), norm(b, &ctx), type);
  }

  std::string goal_key(const Context& ctx, const TermPtr& a, const TermPtr& b, const TermPtr& type) {
    std::set<std::string> hyps;
    for (const auto& [x, t] : ctx) hyps.insert(erased_key(t));
    std::string k = erased_key(a) + "|" + erased_key(b) + "|" + erased_key(type);
    for (const auto& h : hyps) k += "|" + h;
    return k;
  }

  bool equal_base(const Context& ctx, const TermPtr& a, const TermPtr& b, const TermPtr& type) {
    if (erased_key(a) == erased_key(b)) return true;
    std::string key = goal_key(ctx, a, b, type);
    if (in_progress_.count(key) || in_progress_.size() > 200) {
      c_.incomplete_ = true;
      return false;
    }
    in_progress_.insert(key);
    struct Erase {
      std::set<std::string>& s;
      std::string k;
      ~Erase() { s.erase(k); }
    } guard{in_progress_, key};
    if (congruent(ctx, a, b)) return true;
    if (neutral_equal(ctx, a, b)) return true;
    if (by_schema(ctx, a, b, type)) return true;
    return false;
  }

  bool neutral_equal(const Context& ctx, const TermPtr& a, const TermPtr& b) {
    if (a->kind() != b->kind()) return false;
    switch (a->kind()) {
      case TermKind::Var:
        return a->name() == b->name();
      case TermKind::Sym: {
        if (a->name() != b->name() || a->args().size() != b->args().size()) return false;
        const Decl* d = sig_.find(a->name());
        if (!d) return false;
        return args_equal(ctx, *d, a->args(), b->args());
      }
      case TermKind::App:
        if (!neutral_equal(ctx, a->function(), b->function())) return false;
        if (!a->domain()) return erased_key(a->argument()) == erased_key(b->argument());
        return equal(ctx, a->argument(), b->argument(), a->domain());
      case TermKind::Refl:
        return true;
      default:
        return false;
    }
  }

  // Ground congruence closure over the equation hypotheses of the context.
  class Congruence {
   public:
    Congruence(const Signature& sig) : sig_(sig) {}

    int add(const TermPtr& t) {
      std::string key = erased_key(t);
      auto it = ids_.find(key);
      if (it != ids_.end()) return it->second;
      Node n;
      if (t->is(TermKind::Sym)) {
        n.label = t->name() + "/" + std::to_string(t->args().size());
        const Decl* d = sig_.find(t->name());
        for (size_t i = 0; i < t->args().size(); ++i) {
          if (d && i < d->proof_arg.size() && d->proof_arg[i]) continue;
          n.kids.push_back(add(t->args()[i]));
        }
      } else if (t->is(TermKind::App)) {
        n.label = "@";
        n.kids = {add(t->function()), add(t->argument())};
      } else {
        n.label = "atom " + key;
      }
      int id = static_cast<int>(nodes_.size());
      nodes_.push_back(std::move(n));
      parent_.push_back(id);
      ids_[key] = id;
      return id;
    }

    int find(int x) {
      while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
      return x;
    }
    void merge(int a, int b) {
      a = find(a);
      b = find(b);
      if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

    void close() {
      for (bool changed = true; changed;) {
        changed = false;
        for (size_t i = 0; i < nodes_.size(); ++i)
          for (size_t j = i + 1; j < nodes_.size(); ++j) {
            if (find(i) == find(j)) continue;
            const Node& x = nodes_[i];
            const Node& y = nodes_[j];
            if (x.kids.empty() || x.label != y.label || x.kids.size() != y.kids.size()) continue;
            bool same = true;
            for (size_t k = 0; k < x.kids.size() && same; ++k) same = find(x.kids[k]) == find(y.kids[k]);
            if (same) {
              merge(i, j);
              changed = true;
            }
          }
      }
    }

   private:
    struct Node {
      std::string label;
      std::vector<int> kids;
    };
    const Signature& sig_;
    std::map<std::string, int> ids_;
    std::vector<Node> nodes_;
    std::vector<int> parent_;
  };

  bool congruent(const Context& ctx, const TermPtr& a, const TermPtr& b) {
    Congruence cc(sig_);
    bool any = false;
    for (const auto& [x, t] : ctx) {
      if (!t->is(TermKind::Eq)) continue;
      any = true;
      cc.merge(cc.add(norm(t->lhs(), &ctx)), cc.add(norm(t->rhs(), &ctx)));
    }
    if (!any) return false;
    int ia = cc.add(a), ib = cc.add(b);
    cc.close();
    return cc.find(ia) == cc.find(ib);
  }

  struct LocalSchema {
    std::string name;
    Context tele;
    TermPtr type, lhs, rhs;
  };

  std::vector<LocalSchema> schemas_in(const Context& ctx) {
    std::vector<LocalSchema> out;
    for (const auto& s : sig_.schemas()) out.push_back({s.name, s.tele, s.type, s.lhs, s.rhs});
    int counter = 0;
    for (const auto& [h, t] : ctx) {
      if (!t->is(TermKind::Pi) || !is_proof_type(t)) continue;
      LocalSchema ls;
      ls.name = h;
      TermPtr cur = t;
      while (cur->is(TermKind::Pi)) {
        // Pattern variables get names no user identifier can take.
        std::string v = "%" + std::to_string(counter++);
        ls.tele.emplace_back(v, cur->domain());
        cur = substitute(cur->codomain(), cur->name(), mk_var(v));
      }
      ls.type = cur->eq_type();
      ls.lhs = cur->lhs();
      ls.rhs = cur->rhs();
      out.push_back(std::move(ls));
    }
    return out;
  }

  bool discharge(const Context& ctx, const TermPtr& prop) {
    Context c = ctx;
    TermPtr cur = prop;
    while (cur->is(TermKind::Pi)) {
      std::string y = fresh(c, cur->name(), {cur->codomain()});
      c.emplace_back(y, cur->domain());
      cur = substitute(cur->codomain(), cur->name(), mk_var(y));
    }
    return equal(c, cur->lhs(), cur->rhs(), cur->eq_type());
  }

  // Binds the data premises listed in `pending` to context variables by
  // matching their types, then (optionally) discharges the equation premises.
  bool instantiate(const Context& ctx, const Context& tele, const std::set<std::string>& pvars,
                   const std::vector<size_t>& pending, size_t k, const Substitution& bind, int& budget,
                   bool prove, Substitution* out) {
    if (--budget < 0) return false;
    if (k == pending.size()) {
      if (prove) {
        for (const auto& [z, ztype] : tele) {
          if (!is_proof_type(ztype)) continue;
          for (const auto& v : free_vars(ztype))
            if (pvars.count(v) && !bind.count(v)) return false;
          TermPtr ty = substitute(ztype, bind);
          if (!discharge(ctx, ty)) return false;
        }
      }
      if (out) *out = bind;
      return true;
    }
    const auto& [z, ztype] = tele[pending[k]];
    for (auto it = ctx.rbegin(); it != ctx.rend(); ++it) {
      Substitution b2 = bind;
      Matcher m{sig_, pvars, b2, {}, {}};
      if (!m.go(norm(ztype), norm(it->second))) continue;
      b2[z] = mk_var(it->first);
      if (instantiate(ctx, tele, pvars, pending, k + 1, b2, budget, prove, out)) return true;
    }
    return false;
  }

  bool by_schema(const Context& ctx, const TermPtr& a, const TermPtr& b, const TermPtr& type) {
    auto schemas = schemas_in(ctx);
    if (schemas.empty()) return false;
    TermPtr ntype = norm(type);
    for (const auto& s : schemas) {
      auto pvars = tele_names(s.tele);
      for (int orient = 0; orient < 2; ++orient) {
        const TermPtr& x = orient ? b : a;
        const TermPtr& y = orient ? a : b;
        Substitution bind;
        Matcher m{sig_, pvars, bind, {}, {}};
        if (!m.go(s.lhs, x) || !m.go(s.rhs, y)) continue;
        if (s.type && !m.go(norm(s.type), ntype)) continue;
        // Later premises constrain earlier ones, so search them first.
        std::vector<size_t> pending;
        for (size_t i = s.tele.size(); i-- > 0;)
          if (!bind.count(s.tele[i].first) && !is_proof_type(s.tele[i].second)) pending.push_back(i);
        int budget = 256;
        if (instantiate(ctx, s.tele, pvars, pending, 0, bind, budget, true, nullptr)) return true;
      }
    }
    return false;
  }

 private:
  Checker& c_;
  const Signature& sig_;
  std::set<std::string> in_progress_;
};

Checker::Checker(const Signature& sig, long fuel) : sig_(sig), fuel_(fuel), remaining_(fuel) {}

Context Checker::check_context(const PreContext& ctx) {
  refuel();
  return Impl(*this).check_context(ctx);
}

TermPtr Checker::check_type_former(const Context& ctx, const TermPtr& a, bool* representable) {
  refuel();
  return Impl(*this).type_former(ctx, a, representable);
}

TermPtr Checker::check(const Context& ctx, const TermPtr& a, const TermPtr& type) {
  refuel();
  return Impl(*this).check(ctx, a, type);
}

TermPtr Checker::infer(const Context& ctx, const TermPtr& a, TermPtr* type) {
  refuel();
  return Impl(*this).infer(ctx, a, type);
}

bool Checker::equal(const Context& ctx, const TermPtr& a, const TermPtr& b, const TermPtr& type) {
  refuel();
  return Impl(*this).equal(ctx, a, b, type);
}

bool Checker::types_equal(const Context& ctx, const TermPtr& a, const TermPtr& b) {
  refuel();
  return Impl(*this).types_equal(ctx, a, b);
}

TermPtr Checker::normalize(const TermPtr& t) {
  refuel();
  return Impl(*this).norm(t);
}

CheckedSignature check_signature(const PreSignature& pre) {
  CheckedSignature out;
  out.source = pre;
  for (const auto& e : pre.entries) {
    try {
      if (out.sig.find(e.name))
        throw CheckError(ErrorKind::DuplicateSymbol, "sig-ext", "symbol " + e.name + " declared twice");
      Checker ck(out.sig);
      Decl d;
      d.name = e.name;
      d.context = ck.check_context(e.context);
      d.sort = e.sort;
      std::string rule;
      if (e.sort == SortKind::Type) {
        d.type = ck.check_type_former(d.context, e.type);
        rule = "sig-type";
      } else {
        rule = e.sort == SortKind::Box ? "sig-sort Box" : "sig-sort Rep";
      }
      out.certificates.push_back(e.name + ": " + rule + ", context of length " +
                                 std::to_string(d.context.size()));
      out.sig.add(std::move(d));
    } catch (CheckError& err) {
      err.entry = e.name;
      throw;
    }
  }
  return out;
}

Outcome failure(const CheckError& e) {
  Outcome o;
  o.ok = false;
  o.kind = e.kind();
  o.rule = e.rule();
  o.detail = e.detail();
  return o;
}

Outcome check_type(const CheckedSignature& sig, const PreContext& ctx, const TermPtr& term,
                   const TermPtr& expected) {
  try {
    Checker ck(sig.sig);
    Context c = ck.check_context(ctx);
    if (expected->is(TermKind::Box) || expected->is(TermKind::Rep)) {
      bool rep = false;
      ck.check_type_former(c, term, &rep);
      if (expected->is(TermKind::Rep) && !rep)
        throw CheckError(ErrorKind::NotRepresentable, "rep", print_term(term) + " is not representable");
      return {};
    }
    TermPtr type = ck.check_type_former(c, expected);
    ck.check(c, term, type);
    return {};
  } catch (const CheckError& e) {
    return failure(e);
  }
}

bool check_equal(const CheckedSignature& sig, const PreContext& ctx, const TermPtr& a,
                 const TermPtr& b, const TermPtr& type) {
  Checker ck(sig.sig);
  Context c = ck.check_context(ctx);
  if (type->is(TermKind::Box) || type->is(TermKind::Rep)) {
    TermPtr ta = ck.check_type_former(c, a);
    TermPtr tb = ck.check_type_former(c, b);
    return ck.types_equal(c, ta, tb);
  }
  TermPtr t = ck.check_type_former(c, type);
  TermPtr ea = ck.check(c, a, t);
  TermPtr eb = ck.check(c, b, t);
  return ck.equal(c, ea, eb, t);
}

Substitution morphism_substitution(const PreContext& delta, const std::vector<TermPtr>& f) {
  Substitution s;
  for (size_t i = 0; i < delta.size() && i < f.size(); ++i) s[delta[i].first] = f[i];
  return s;
}

namespace {

std::vector<TermPtr> elaborate_morphism(Checker& ck, const Context& g, const Context& d,
                                        const std::vector<TermPtr>& f) {
  if (f.size() != d.size())
    throw CheckError(ErrorKind::ArityMismatch, "ctx-morphism",
                     "morphism has " + std::to_string(f.size()) + " components, target has " +
                         std::to_string(d.size()));
  Substitution s;
  std::vector<TermPtr> out;
  for (size_t i = 0; i < f.size(); ++i) {
    TermPtr bi = substitute(d[i].second, s);
    TermPtr fi = ck.check(g, f[i], bi);
    s[d[i].first] = fi;
    out.push_back(fi);
  }
  return out;
}

}  // namespace

Outcome check_context_morphism(const CheckedSignature& sig, const std::vector<TermPtr>& f,
                               const PreContext& gamma, const PreContext& delta) {
  try {
    Checker ck(sig.sig);
    Context g = ck.check_context(gamma);
    Context d = ck.check_context(delta);
    elaborate_morphism(ck, g, d, f);
    return {};
  } catch (const CheckError& e) {
    return failure(e);
  }
}

bool morphisms_equal(const CheckedSignature& sig, const PreContext& gamma, const PreContext& delta,
                     const std::vector<TermPtr>& f, const std::vector<TermPtr>& g) {
  Checker ck(sig.sig);
  Context cg = ck.check_context(gamma);
  Context cd = ck.check_context(delta);
  auto ef = elaborate_morphism(ck, cg, cd, f);
  auto eg = elaborate_morphism(ck, cg, cd, g);
  Substitution s;
  for (size_t i = 0; i < ef.size(); ++i) {
    TermPtr bi = substitute(cd[i].second, s);
    if (!ck.equal(cg, ef[i], eg[i], bi)) return false;
    s[cd[i].first] = ef[i];
  }
  return true;
}

Outcome check_judgment(const CheckedSignature& sig, const Judgment& j) {
  try {
    return std::visit(
        [&](const auto& jj) -> Outcome {
          using J = std::decay_t<decltype(jj)>;
          if constexpr (std::is_same_v<J, SigOk>) {
            return {};
          } else if constexpr (std::is_same_v<J, CtxOk>) {
            Checker ck(sig.sig);
            ck.check_context(jj.ctx);
            return {};
          } else if constexpr (std::is_same_v<J, HasType>) {
            return check_type(sig, jj.ctx, jj.term, jj.type);
          } else {
            if (check_equal(sig, jj.ctx, jj.lhs, jj.rhs, jj.type)) return {};
            Outcome o;
            o.ok = false;
            o.kind = ErrorKind::TypeMismatch;
            o.rule = "conv";
            o.detail = print_term(jj.lhs) + " and " + print_term(jj.rhs) + " are not shown equal";
            return o;
          }
        },
        j);
  } catch (const CheckError& e) {
    return failure(e);
  }
}

Outcome weaken_signature(const PreSignature& base, const PreSignature& extra1,
                         const PreSignature& extra2, const Judgment& j) {
  PreSignature merged = base;
  std::set<std::string> names = base.symbol_names();
  for (const PreSignature* part : {&extra1, &extra2})
    for (const auto& e : part->entries) {
      if (!names.insert(e.name).second) {
        Outcome o;
        o.ok = false;
        o.kind = ErrorKind::DuplicateSymbol;
        o.rule = "sig-ext";
        o.detail = "symbol " + e.name + " occurs in more than one signature";
        return o;
      }
      merged.entries.push_back(e);
    }
  try {
    CheckedSignature cs = check_signature(merged);
    return check_judgment(cs, j);
  } catch (const CheckError& e) {
    return failure(e);
  }
}

}  // namespace rmk::lf
