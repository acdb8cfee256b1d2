#include <algorithm>
#include <cctype>
#include <sstream>

#include "rmk/lf/syntax.hpp"

namespace rmk::lf {

namespace {

enum class Tok { Ident, LParen, RParen, Comma, Colon, Arrow, FatArrow, Equals, Dot, Backslash, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
  bool glued;  // no whitespace between this token and the previous one
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> lex(std::string_view s, int line0 = 1) {
  std::vector<Token> out;
  int line = line0, col = 1;
  bool glued = false;
  size_t i = 0;
  auto adv = [&](size_t n) {
    for (size_t k = 0; k < n; ++k, ++i) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < s.size()) {
    char c = s[i];
    if (c == '#') {
      while (i < s.size() && s[i] != '\n') adv(1);
      glued = false;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      adv(1);
      glued = false;
      continue;
    }
    Token t{Tok::End, "", line, col, glued};
    if (ident_start(c)) {
      size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(s.substr(i, j - i));
      adv(j - i);
    } else if (s.substr(i, 2) == "->") {
      t.kind = Tok::Arrow;
      adv(2);
    } else if (s.substr(i, 2) == "=>") {
      t.kind = Tok::FatArrow;
      adv(2);
    } else {
      switch (c) {
        case '(': t.kind = Tok::LParen; break;
        case ')': t.kind = Tok::RParen; break;
        case ',': t.kind = Tok::Comma; break;
        case ':': t.kind = Tok::Colon; break;
        case '=': t.kind = Tok::Equals; break;
        case '.': t.kind = Tok::Dot; break;
        case '\\': t.kind = Tok::Backslash; break;
        default:
          throw SyntaxError(std::string("unexpected character '") + c + "'", line, col);
      }
      adv(1);
    }
    out.push_back(std::move(t));
    glued = true;
  }
  out.push_back(Token{Tok::End, "", line, col, false});
  return out;
}

bool is_keyword(const std::string& s) {
  return s == "Box" || s == "Rep" || s == "refl" || s == "in";
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_word(const char* w) const { return at(Tok::Ident) && peek().text == w; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg, peek().line, peek().column);
  }

  const Token& expect(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what);
    return toks_[pos_++];
  }

  std::string variable() {
    if (!at(Tok::Ident) || is_keyword(peek().text) || peek().text == "_")
      fail("expected a variable name");
    return toks_[pos_++].text;
  }

  TermPtr term() {
    if (at(Tok::Backslash)) return lambda();
    if (at(Tok::LParen) && peek(1).kind == Tok::Ident && peek(2).kind == Tok::Colon) {
      ++pos_;
      std::vector<std::pair<std::string, TermPtr>> binders;
      for (;;) {
        std::string x = variable();
        expect(Tok::Colon, "':'");
        binders.emplace_back(x, term());
        if (at(Tok::Comma)) {
          ++pos_;
          continue;
        }
        expect(Tok::RParen, "')'");
        break;
      }
      expect(Tok::Arrow, "'->' after a binder group");
      TermPtr body = term();
      for (auto it = binders.rbegin(); it != binders.rend(); ++it)
        body = mk_pi(it->second, it->first, body);
      return body;
    }
    TermPtr lhs = equation();
    if (at(Tok::Arrow)) {
      ++pos_;
      return mk_pi(lhs, "_", term());
    }
    return lhs;
  }

  TermPtr lambda() {
    expect(Tok::Backslash, "'\\'");
    std::vector<std::pair<std::string, TermPtr>> binders;
    while (!at(Tok::Dot)) {
      if (at(Tok::LParen)) {
        ++pos_;
        std::string x = variable();
        expect(Tok::Colon, "':'");
        TermPtr dom = term();
        expect(Tok::RParen, "')'");
        binders.emplace_back(x, dom);
      } else if (at(Tok::Ident)) {
        binders.emplace_back(variable(), nullptr);
      } else {
        fail("expected a binder or '.'");
      }
    }
    if (binders.empty()) fail("lambda without binders");
    expect(Tok::Dot, "'.'");
    TermPtr body = term();
    for (auto it = binders.rbegin(); it != binders.rend(); ++it)
      body = mk_abs(it->second, it->first, body);
    return body;
  }

  TermPtr equation() {
    TermPtr a = application();
    if (!at(Tok::Equals)) return a;
    ++pos_;
    TermPtr b = application();
    TermPtr type;
    if (at_word("in")) {
      ++pos_;
      type = application();
    }
    return mk_eq(type, a, b);
  }

  bool starts_atom() const {
    if (at(Tok::LParen) || at(Tok::Backslash)) return true;
    return at(Tok::Ident) && peek().text != "in";
  }

  TermPtr application() {
    if (!starts_atom()) fail("expected a term");
    TermPtr f = atom();
    while (starts_atom()) {
      if (at(Tok::Backslash)) return mk_surface_app(f, lambda());
      f = mk_surface_app(f, atom());
    }
    return f;
  }

  TermPtr atom() {
    if (at(Tok::LParen)) {
      ++pos_;
      TermPtr t = term();
      expect(Tok::RParen, "')'");
      return t;
    }
    if (at(Tok::Backslash)) return lambda();
    if (!at(Tok::Ident)) fail("expected a term");
    const Token& t = toks_[pos_++];
    if (t.text == "Box") return mk_box();
    if (t.text == "Rep") return mk_rep();
    if (t.text == "refl") return mk_refl(atom());
    if (t.text == "in") fail("unexpected 'in'");
    if (t.text == "_") fail("'_' is not a term");
    if (at(Tok::LParen) && peek().glued) {
      ++pos_;
      std::vector<TermPtr> args;
      if (!at(Tok::RParen)) {
        for (;;) {
          args.push_back(term());
          if (at(Tok::Comma)) {
            ++pos_;
            continue;
          }
          break;
        }
      }
      expect(Tok::RParen, "')' closing the argument list");
      return mk_sym(t.text, std::move(args));
    }
    return mk_var(t.text);
  }

  size_t pos_ = 0;
  std::vector<Token> toks_;
};

TermPtr resolve(const TermPtr& t, const std::set<std::string>& syms, std::vector<std::string>& bound) {
  if (!t) return t;
  auto is_bound = [&](const std::string& x) {
    return std::find(bound.begin(), bound.end(), x) != bound.end();
  };
  auto under = [&](const std::string& x, const TermPtr& part) {
    bound.push_back(x);
    TermPtr r = resolve(part, syms, bound);
    bound.pop_back();
    return r;
  };
  switch (t->kind()) {
    case TermKind::Box:
    case TermKind::Rep:
      return t;
    case TermKind::Var:
      if (!is_bound(t->name()) && syms.count(t->name())) return mk_sym(t->name());
      return t;
    case TermKind::Sym: {
      std::vector<TermPtr> args;
      for (const auto& a : t->args()) args.push_back(resolve(a, syms, bound));
      if (!is_bound(t->name())) return mk_sym(t->name(), std::move(args));
      // f(a, b) with f a bound variable is iterated application.
      TermPtr f = mk_var(t->name());
      for (auto& a : args) f = mk_surface_app(f, a);
      return f;
    }
    case TermKind::Pi:
      return mk_pi(resolve(t->domain(), syms, bound), t->name(), under(t->name(), t->codomain()));
    case TermKind::Abs:
      return mk_abs(resolve(t->domain(), syms, bound), t->name(), under(t->name(), t->body()));
    case TermKind::App:
      return mk_app(resolve(t->domain(), syms, bound), t->name(), under(t->name(), t->codomain()),
                    resolve(t->function(), syms, bound), resolve(t->argument(), syms, bound));
    case TermKind::Eq:
      return mk_eq(resolve(t->eq_type(), syms, bound), resolve(t->lhs(), syms, bound),
                   resolve(t->rhs(), syms, bound));
    case TermKind::Refl:
      return mk_refl(resolve(t->subject(), syms, bound));
  }
  return t;
}

// Printing precedence: 0 binders and arrows, 1 equations, 2 applications, 3 atoms.
void print(const TermPtr& t, int prec, std::vector<std::string>& scope, std::ostream& out);

void print_under(const std::string& x, const TermPtr& t, int prec, std::vector<std::string>& scope,
                 std::ostream& out) {
  scope.push_back(x);
  print(t, prec, scope, out);
  scope.pop_back();
}

void print(const TermPtr& t, int prec, std::vector<std::string>& scope, std::ostream& out) {
  if (!t) {
    out << "?";
    return;
  }
  auto open = [&](int level) {
    if (prec > level) out << '(';
  };
  auto close = [&](int level) {
    if (prec > level) out << ')';
  };
  switch (t->kind()) {
    case TermKind::Box: out << "Box"; return;
    case TermKind::Rep: out << "Rep"; return;
    case TermKind::Var: out << t->name(); return;
    case TermKind::Sym: {
      out << t->name();
      bool shadowed = std::find(scope.begin(), scope.end(), t->name()) != scope.end();
      if (t->args().empty() && !shadowed) return;
      out << '(';
      for (size_t i = 0; i < t->args().size(); ++i) {
        if (i) out << ", ";
        print(t->args()[i], 0, scope, out);
      }
      out << ')';
      return;
    }
    case TermKind::Refl:
      open(2);
      out << "refl ";
      print(t->subject(), 3, scope, out);
      close(2);
      return;
    case TermKind::App:
      open(2);
      print(t->function(), 2, scope, out);
      out << ' ';
      print(t->argument(), 3, scope, out);
      close(2);
      return;
    case TermKind::Eq:
      open(1);
      print(t->lhs(), 2, scope, out);
      out << " = ";
      print(t->rhs(), 2, scope, out);
      if (t->eq_type()) {
        out << " in ";
        print(t->eq_type(), 2, scope, out);
      }
      close(1);
      return;
    case TermKind::Pi:
      open(0);
      if (t->name() != "_" && occurs_free(t->name(), t->codomain())) {
        out << '(' << t->name() << " : ";
        print(t->domain(), 0, scope, out);
        out << ") -> ";
      } else {
        print(t->domain(), 1, scope, out);
        out << " -> ";
      }
      print_under(t->name(), t->codomain(), 0, scope, out);
      close(0);
      return;
    case TermKind::Abs:
      open(0);
      out << '\\';
      if (t->domain()) {
        out << '(' << t->name() << " : ";
        print(t->domain(), 0, scope, out);
        out << ')';
      } else {
        out << t->name();
      }
      out << ". ";
      print_under(t->name(), t->body(), 0, scope, out);
      close(0);
      return;
  }
}

}  // namespace

TermPtr resolve_names(const TermPtr& t, const std::set<std::string>& symbols,
                      std::vector<std::string> bound) {
  return resolve(t, symbols, bound);
}

TermPtr parse_term(std::string_view text, const std::set<std::string>* symbols) {
  Parser p(lex(text));
  TermPtr t = p.term();
  if (!p.at(Tok::End)) p.fail("unexpected trailing input");
  if (symbols) return resolve_names(t, *symbols);
  return t;
}

std::string print_term(const TermPtr& t) {
  std::ostringstream out;
  std::vector<std::string> scope;
  print(t, 0, scope, out);
  return out.str();
}

std::string print_context(const PreContext& ctx) {
  std::ostringstream out;
  std::vector<std::string> scope;
  out << '(';
  for (size_t i = 0; i < ctx.size(); ++i) {
    if (i) out << ", ";
    out << ctx[i].first << " : ";
    print(ctx[i].second, 0, scope, out);
    scope.push_back(ctx[i].first);
  }
  out << ')';
  return out.str();
}

std::set<std::string> PreSignature::symbol_names() const {
  std::set<std::string> out;
  for (const auto& e : entries) out.insert(e.name);
  return out;
}

const SignatureEntry* PreSignature::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

PreSignature parse_signature(std::string_view text) {
  // Group physical lines into entries first so that a malformed entry does
  // not swallow the next one.
  struct Chunk {
    std::string text;
    int line;
  };
  std::vector<Chunk> chunks;
  int lineno = 0;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    ++lineno;
    start = end + 1;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    bool blank = std::all_of(line.begin(), line.end(),
                             [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
    if (blank) continue;
    if (std::isspace(static_cast<unsigned char>(line[0]))) {
      if (chunks.empty()) throw SyntaxError("continuation line without an entry", lineno, 1);
      chunks.back().text += "\n" + line;
    } else {
      chunks.push_back({line, lineno});
    }
    if (end == text.size()) break;
  }

  PreSignature sig;
  std::vector<std::vector<Token>> lexed;
  for (const auto& c : chunks) lexed.push_back(lex(c.text, c.line));

  // Names are collected up front so that identifiers can be resolved to
  // symbols even when the entry declaring them comes later; the checker
  // reports such forward references.
  std::set<std::string> names;
  int anon = 0;
  std::vector<std::string> entry_names;
  for (auto& toks : lexed) {
    if (toks.empty() || toks[0].kind != Tok::Ident || is_keyword(toks[0].text))
      throw SyntaxError("expected a symbol name", toks[0].line, toks[0].column);
    std::string name = toks[0].text;
    if (name == "_") name = "_eq" + std::to_string(++anon);
    entry_names.push_back(name);
    names.insert(name);
  }

  for (size_t k = 0; k < lexed.size(); ++k) {
    Parser p(lexed[k]);
    SignatureEntry e;
    e.name = entry_names[k];
    e.line = chunks[k].line;
    ++p.pos_;
    p.expect(Tok::Colon, "':' after the symbol name");
    p.expect(Tok::LParen, "'(' opening the context");
    std::vector<std::string> bound;
    if (!p.at(Tok::RParen)) {
      for (;;) {
        std::string x = p.variable();
        p.expect(Tok::Colon, "':'");
        TermPtr a = resolve_names(p.term(), names, bound);
        e.context.emplace_back(x, a);
        bound.push_back(x);
        if (p.at(Tok::Comma)) {
          ++p.pos_;
          continue;
        }
        break;
      }
    }
    p.expect(Tok::RParen, "')' closing the context");
    p.expect(Tok::FatArrow, "'=>'");
    if (p.at_word("Box") && p.peek(1).kind == Tok::End) {
      e.sort = SortKind::Box;
      ++p.pos_;
    } else if (p.at_word("Rep") && p.peek(1).kind == Tok::End) {
      e.sort = SortKind::Rep;
      ++p.pos_;
    } else {
      e.sort = SortKind::Type;
      e.type = resolve_names(p.term(), names, bound);
    }
    if (!p.at(Tok::End)) p.fail("unexpected trailing input in entry");
    sig.entries.push_back(std::move(e));
  }
  return sig;
}

std::string print_signature(const PreSignature& sig) {
  std::ostringstream out;
  for (const auto& e : sig.entries) {
    out << e.name << " : " << print_context(e.context) << " => ";
    switch (e.sort) {
      case SortKind::Box: out << "Box"; break;
      case SortKind::Rep: out << "Rep"; break;
      case SortKind::Type: {
        std::vector<std::string> scope;
        for (const auto& [x, a] : e.context) scope.push_back(x);
        print(e.type, 0, scope, out);
        break;
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace rmk::lf
