#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rmk/cat/dfib.hpp"
#include "rmk/cat/fincat.hpp"
#include "rmk/cat/model.hpp"
#include "rmk/cat/rmcat.hpp"

namespace rmk::io {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, int line, const std::string& msg)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// A line with its indented children. Blank lines and `#` comments are dropped.
struct Block {
  std::string head;
  int line = 0;
  std::vector<Block> children;
};

struct Source {
  std::string file;  // for messages
  std::filesystem::path dir;  // relative references resolve against it
  std::vector<Block> blocks;
};

Source parse_blocks(const std::string& text, const std::string& file = "<input>",
                    const std::filesystem::path& dir = ".");
Source read_source(const std::filesystem::path& path);

// .fincat:
//   category NAME
//   object A            (or: objects A B C)
//   arrow f : A -> B
//   compose g f = h     (g . f)
//   le A B              (preorder shorthand; no arrow lines allowed with it)
cat::FinCat parse_fincat(const Source& src, const std::vector<Block>& lines);
cat::CatRef load_fincat(const std::filesystem::path& path);

// .dfib:
//   base PATH | base + indented .fincat lines
//   fibration NAME
//   fiber OBJ : e1 e2 ...
//   restrict ARROW : e -> e', ...   (from the fiber over the target to the one over the source)
cat::DFib parse_dfib(const Source& src, const cat::CatRef& base, const std::string& name,
                     const std::vector<Block>& lines);
cat::DFibRef load_dfib(const std::filesystem::path& path);

// .rmcat:
//   category PATH | category + indented block
//   representable: f, g, ...     (also `all`, `isos`)
//   pushforward f g = h with eval e
cat::RMCat load_rmcat(const std::filesystem::path& path);
cat::RMCat parse_rmcat(const Source& src);

// .theory:
//   theory PATH                  (an .rmcat)
//   set A : {a, b}
//   map f : a -> x, b -> y
cat::Theory load_theory(const std::filesystem::path& path);

// .model:
//   theory PATH                  (omitted with `mode natural`)
//   base PATH | base + block
//   fibration A [PATH] + block   (one per object of the theory; U and E in natural mode)
//   map f : A -> B + block of `over OBJ : e -> e', ...` lines
// Maps for identities and composites may be omitted. Natural mode takes
// exactly the map p : E -> U.
struct LoadedModel {
  std::variant<cat::Model, cat::NaturalModel> model;
  std::string name;
  bool natural() const { return model.index() == 1; }
};
LoadedModel load_model(const std::filesystem::path& path);
LoadedModel parse_model(const Source& src);

// What kind of file this is, from its extension.
enum class FileKind { FinCat, DFib, RMCat, Theory, Model, Signature, Unknown };
FileKind file_kind(const std::filesystem::path& path);

}  // namespace rmk::io
