#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rmk/lf/syntax.hpp"
#include "rmk/lf/term.hpp"

namespace rmk::lf {

enum class ErrorKind {
  None,
  SyntaxError,
  UnboundSymbol,
  UnboundVariable,
  DuplicateSymbol,
  IllFormedContext,
  SortError,
  TypeMismatch,
  NotRepresentable,
  ArityMismatch,
  NotAFunction,
  CannotInfer,
  FuelExhausted,
};

const char* to_string(ErrorKind k);

class CheckError : public std::runtime_error {
 public:
  CheckError(ErrorKind kind, std::string rule, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + " [" + rule + "]: " + detail),
        kind_(kind),
        rule_(std::move(rule)),
        detail_(detail) {}

  ErrorKind kind() const { return kind_; }
  const std::string& rule() const { return rule_; }
  const std::string& detail() const { return detail_; }
  // Name of the signature entry being checked, if any.
  std::string entry;

 private:
  ErrorKind kind_;
  std::string rule_;
  std::string detail_;
};

using Context = PreContext;

struct Decl {
  std::string name;
  Context context;  // elaborated
  SortKind sort = SortKind::Box;
  TermPtr type;  // elaborated, when sort == Type
  // Argument positions whose declared type is an equation, possibly under
  // binders. Such arguments are proofs and never inspected by equality.
  std::vector<bool> proof_arg;
};

// Equation entry `tele => lhs = rhs` used left to right by normalization.
struct RewriteRule {
  std::string name;
  Context tele;
  TermPtr lhs;
  TermPtr rhs;
};

// Equation used only when an equality goal is stuck: `tele => lhs = rhs in type`
// with variables of tele as pattern variables. Covers equations between two
// variables (uniqueness principles) and local hypotheses under binders.
struct Schema {
  std::string name;
  Context tele;
  TermPtr type;
  TermPtr lhs;
  TermPtr rhs;
};

class Signature {
 public:
  const Decl* find(const std::string& name) const;
  const std::vector<Decl>& decls() const { return decls_; }
  const std::vector<RewriteRule>& rules() const { return rules_; }
  const std::vector<Schema>& schemas() const { return schemas_; }
  const std::vector<size_t>& rules_for(const std::string& head) const;

  void add(Decl d);

 private:
  std::vector<Decl> decls_;
  std::map<std::string, size_t> index_;
  std::vector<RewriteRule> rules_;
  std::map<std::string, std::vector<size_t>> by_head_;
  std::vector<Schema> schemas_;
};

struct CheckedSignature {
  PreSignature source;
  Signature sig;
  // One line per entry naming the rule that admitted it.
  std::vector<std::string> certificates;
};

// Default fuel is 10^4 reduction steps, overridable through RMK_MAX_STEPS.
long default_fuel();

// Bidirectional checker for one signature. Every public call starts from a
// full fuel tank. Errors are thrown as CheckError.
class Checker {
 public:
  explicit Checker(const Signature& sig, long fuel = default_fuel());

  Context check_context(const PreContext& ctx);
  // Elaborates a type; `representable` receives whether it has sort Rep.
  TermPtr check_type_former(const Context& ctx, const TermPtr& a, bool* representable = nullptr);
  TermPtr check(const Context& ctx, const TermPtr& a, const TermPtr& type);
  TermPtr infer(const Context& ctx, const TermPtr& a, TermPtr* type);

  bool equal(const Context& ctx, const TermPtr& a, const TermPtr& b, const TermPtr& type);
  bool types_equal(const Context& ctx, const TermPtr& a, const TermPtr& b);
  TermPtr normalize(const TermPtr& t);

  long steps_used() const { return fuel_ - remaining_; }
  // True when some equality query ran out of ideas rather than finding a
  // disagreement between normal forms.
  bool incomplete() const { return incomplete_; }

 private:
  class Impl;
  friend class Impl;
  const Signature& sig_;
  long fuel_;
  long remaining_;
  bool incomplete_ = false;
  void refuel() { remaining_ = fuel_; }
};

CheckedSignature check_signature(const PreSignature& sig);

struct Outcome {
  bool ok = true;
  ErrorKind kind = ErrorKind::None;
  std::string rule;
  std::string detail;
  explicit operator bool() const { return ok; }
};

Outcome failure(const CheckError& e);

struct SigOk {};
struct CtxOk {
  PreContext ctx;
};
struct HasType {
  PreContext ctx;
  TermPtr term;
  TermPtr type;  // a type, or the sorts Box / Rep
};
struct DefEq {
  PreContext ctx;
  TermPtr lhs;
  TermPtr rhs;
  TermPtr type;
};
using Judgment = std::variant<SigOk, CtxOk, HasType, DefEq>;

Outcome check_judgment(const CheckedSignature& sig, const Judgment& j);

// Σ; Γ ⊢ term : expected, where expected is a type or one of Box, Rep.
Outcome check_type(const CheckedSignature& sig, const PreContext& ctx, const TermPtr& term,
                   const TermPtr& expected);
bool check_equal(const CheckedSignature& sig, const PreContext& ctx, const TermPtr& a,
                 const TermPtr& b, const TermPtr& type);
Outcome check_context_morphism(const CheckedSignature& sig, const std::vector<TermPtr>& f,
                               const PreContext& gamma, const PreContext& delta);
bool morphisms_equal(const CheckedSignature& sig, const PreContext& gamma, const PreContext& delta,
                     const std::vector<TermPtr>& f, const std::vector<TermPtr>& g);

// The substitution [f1/y1, ..., fm/ym] for Δ = (y1 : B1, ..., ym : Bm).
Substitution morphism_substitution(const PreContext& delta, const std::vector<TermPtr>& f);

// Concatenates the three signatures (DuplicateSymbol on a name clash),
// checks the result and re-checks the judgment under it.
Outcome weaken_signature(const PreSignature& base, const PreSignature& extra1,
                         const PreSignature& extra2, const Judgment& j);

}  // namespace rmk::lf
