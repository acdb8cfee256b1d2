#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rmk/lf/term.hpp"

namespace rmk::lf {

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& msg, int line, int column)
      : std::runtime_error("syntax error at " + std::to_string(line) + ":" + std::to_string(column) +
                           ": " + msg),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

using PreContext = std::vector<std::pair<std::string, TermPtr>>;

enum class SortKind { Box, Rep, Type };

struct SignatureEntry {
  std::string name;
  PreContext context;
  SortKind sort = SortKind::Box;
  TermPtr type;  // set iff sort == Type
  int line = 0;
};

// Finite restriction of a well-ordered pre-signature; list order is the order.
struct PreSignature {
  std::vector<SignatureEntry> entries;

  std::set<std::string> symbol_names() const;
  const SignatureEntry* find(const std::string& name) const;
};

// Surface grammar:
//   term  ::= '\' binder+ '.' term | '(' x ':' term (',' y ':' term)* ')' '->' term
//           | eq ('->' term)?
//   eq    ::= app ('=' app ('in' app)?)?
//   app   ::= atom+ | 'refl' atom
//   atom  ::= 'Box' | 'Rep' | ident | ident'(' term,* ')' | '(' term ')'
// A '(' directly adjacent to an identifier starts a symbol application;
// with whitespace in between it is an ordinary application argument.
// `symbols`, when given, turns free identifiers naming a symbol into
// nullary symbol applications and symbol applications whose head is a bound
// variable into iterated application.
TermPtr parse_term(std::string_view text, const std::set<std::string>* symbols = nullptr);

// Re-resolves identifiers against a symbol table; names in `bound` shadow symbols.
TermPtr resolve_names(const TermPtr& t, const std::set<std::string>& symbols,
                      std::vector<std::string> bound = {});

std::string print_term(const TermPtr& t);
std::string print_context(const PreContext& ctx);

// `.lfsig` format: one entry per line, `name : (x1 : A1, ..., xn : An) => SORT`
// with SORT one of Box, Rep or a type term. Indented lines continue the
// previous entry; `#` starts a comment. Entries named `_` get fresh names
// `_eq1`, `_eq2`, ...
PreSignature parse_signature(std::string_view text);
std::string print_signature(const PreSignature& sig);

}  // namespace rmk::lf
