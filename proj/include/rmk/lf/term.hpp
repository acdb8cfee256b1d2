#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace rmk::lf {

enum class TermKind { Box, Rep, Sym, Var, Pi, Abs, App, Eq, Refl };

class Term;
using TermPtr = std::shared_ptr<const Term>;

// Immutable pre-term of the framework. Binding forms (Pi, Abs, App) carry
// the bound variable in name(); App binds it in its codomain annotation only.
// Annotations that the surface syntax lets the user omit (Abs domain, App
// domain/codomain, Eq type) may be null until elaboration fills them in.
class Term {
 public:
  Term(TermKind kind, std::string name, std::vector<TermPtr> children)
      : kind_(kind), name_(std::move(name)), children_(std::move(children)) {}

  TermKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const std::vector<TermPtr>& children() const { return children_; }

  bool is(TermKind k) const { return kind_ == k; }

  // Pi(dom, x.cod) / Abs(dom, x.body) / App(dom, x.cod, fn, arg)
  const TermPtr& domain() const { return children_[0]; }
  const TermPtr& codomain() const { return children_[1]; }
  const TermPtr& body() const { return children_[1]; }
  const TermPtr& function() const { return children_[2]; }
  const TermPtr& argument() const { return children_[3]; }
  // Eq(type, lhs, rhs)
  const TermPtr& eq_type() const { return children_[0]; }
  const TermPtr& lhs() const { return children_[1]; }
  const TermPtr& rhs() const { return children_[2]; }
  // Refl(subject)
  const TermPtr& subject() const { return children_[0]; }
  // Sym(args...)
  const std::vector<TermPtr>& args() const { return children_; }

 private:
  TermKind kind_;
  std::string name_;
  std::vector<TermPtr> children_;
};

TermPtr mk_box();
TermPtr mk_rep();
TermPtr mk_sym(std::string name, std::vector<TermPtr> args = {});
TermPtr mk_var(std::string name);
TermPtr mk_pi(TermPtr dom, std::string x, TermPtr cod);
TermPtr mk_abs(TermPtr dom, std::string x, TermPtr body);
TermPtr mk_app(TermPtr dom, std::string x, TermPtr cod, TermPtr fn, TermPtr arg);
TermPtr mk_eq(TermPtr type, TermPtr lhs, TermPtr rhs);
TermPtr mk_refl(TermPtr subject);

// Surface application `fn arg` with both annotations left open.
TermPtr mk_surface_app(TermPtr fn, TermPtr arg);

using Substitution = std::map<std::string, TermPtr>;

std::set<std::string> free_vars(const TermPtr& t);
bool occurs_free(const std::string& x, const TermPtr& t);

// Capture-avoiding simultaneous substitution.
TermPtr substitute(const TermPtr& t, const Substitution& s);
TermPtr substitute(const TermPtr& t, const std::string& x, const TermPtr& replacement);

bool alpha_eq(const TermPtr& a, const TermPtr& b);

// Number of nodes, not counting elaboration annotations (Abs domain, App
// domain/codomain). Eq counts its type since it is part of the type former.
int term_size(const TermPtr& t);

// True when no annotation is missing anywhere in t.
bool fully_annotated(const TermPtr& t);

// A name based on `base` that is not in `avoid`.
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

// Alpha-invariant key: bound variables are printed by binding depth.
std::string canonical_key(const TermPtr& t);
// Same, but ignoring the Abs domain and App type annotations.
std::string erased_key(const TermPtr& t);

}  // namespace rmk::lf
