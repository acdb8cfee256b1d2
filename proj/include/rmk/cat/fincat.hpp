#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace rmk::cat {

using Obj = int;
using Arr = int;
inline constexpr Arr kNone = -1;

enum class LawKind {
  Malformed,
  NonAssociative,
  IdentityLaw,
  NotFunctorial,
  NotNatural,
  NotDiscreteFibration,
  NotCartesian,
  ClassNotClosed,
  NotStable,
  PushforwardUMPFails,
  NotExponentiable,
  MissingAdjoint,
  NoTerminal,
  NotRMFunctor,
  NotRepresentable,
  BCFails,
  NoOverlay,
};

const char* to_string(LawKind k);

// A violated law, with the names of the offending arrows/objects/elements.
class LawError : public std::runtime_error {
 public:
  LawError(LawKind kind, const std::string& msg, std::vector<std::string> witness = {})
      : std::runtime_error(std::string(to_string(kind)) + ": " + msg),
        kind_(kind),
        witness_(std::move(witness)) {}
  LawKind kind() const { return kind_; }
  const std::vector<std::string>& witness() const { return witness_; }

 private:
  LawKind kind_;
  std::vector<std::string> witness_;
};

// An enumeration exceeded its declared bound.
class Overflow : public std::runtime_error {
 public:
  explicit Overflow(const std::string& what) : std::runtime_error("Overflow: " + what) {}
};

struct Arrow {
  std::string name;
  Obj src = 0;
  Obj tgt = 0;
};

class FinCat;
using CatRef = std::shared_ptr<const FinCat>;

// Finite category with an explicit composition table. compose(g, f) is g∘f
// and is only meaningful when tgt f == src g.
class FinCat {
 public:
  FinCat() = default;
  FinCat(std::string name, std::vector<std::string> objects, std::vector<Arrow> arrows,
         std::vector<Arr> identities, std::vector<Arr> table);

  const std::string& name() const { return name_; }
  int num_objects() const { return static_cast<int>(objects_.size()); }
  int num_arrows() const { return static_cast<int>(arrows_.size()); }
  const std::vector<std::string>& objects() const { return objects_; }
  const std::vector<Arrow>& arrows() const { return arrows_; }
  const std::string& object_name(Obj a) const { return objects_.at(a); }
  const Arrow& arrow(Arr f) const { return arrows_.at(f); }
  const std::string& arrow_name(Arr f) const { return arrows_.at(f).name; }
  Obj src(Arr f) const { return arrows_[f].src; }
  Obj tgt(Arr f) const { return arrows_[f].tgt; }

  std::optional<Obj> find_object(const std::string& name) const;
  std::optional<Arr> find_arrow(const std::string& name) const;
  Obj object(const std::string& name) const;  // throws std::out_of_range
  Arr arrow_named(const std::string& name) const;

  Arr id(Obj a) const { return identities_[a]; }
  bool is_identity(Arr f) const { return identities_[src(f)] == f; }
  Arr compose(Arr g, Arr f) const { return table_[static_cast<size_t>(g) * arrows_.size() + f]; }
  const std::vector<Arr>& hom(Obj a, Obj b) const { return homs_[static_cast<size_t>(a) * objects_.size() + b]; }

  std::optional<Arr> inverse(Arr f) const;
  bool is_iso(Arr f) const { return inverse(f).has_value(); }
  bool isomorphic(Obj a, Obj b) const;

  // Every hom-set has at most one element.
  bool is_thin() const;

 private:
  std::string name_;
  std::vector<std::string> objects_;
  std::vector<Arrow> arrows_;
  std::vector<Arr> identities_;
  std::vector<Arr> table_;
  std::vector<std::vector<Arr>> homs_;
};

// Checks the category laws; throws LawError with a witness.
void validate(const FinCat& c);

// Incremental construction. Identities are implicit (named id_<object>) and
// composites with identities are filled in. A composite g∘f that is not set
// explicitly is inferred when Hom(src f, tgt g) has exactly one arrow.
class FinCatBuilder {
 public:
  explicit FinCatBuilder(std::string name = "C") : name_(std::move(name)) {}
  Obj add_object(const std::string& name);
  Arr add_arrow(const std::string& name, Obj src, Obj tgt);
  Arr add_arrow(const std::string& name, const std::string& src, const std::string& tgt);
  void set_composite(Arr g, Arr f, Arr h);
  void set_composite(const std::string& g, const std::string& f, const std::string& h);
  int num_objects() const { return static_cast<int>(objects_.size()); }
  // Throws LawError(Malformed) if some composite is undetermined.
  FinCat build() const;

 private:
  std::string name_;
  std::vector<std::string> objects_;
  std::vector<Arrow> arrows_;  // non-identity arrows
  std::vector<std::tuple<Arr, Arr, Arr>> composites_;
  Obj object_index(const std::string& name) const;
  Arr arrow_index(const std::string& name) const;
};

FinCat terminal_category();
FinCat walking_arrow();  // objects 0, 1 and one arrow f : 0 -> 1
FinCat discrete_category(int n);
// Preorder on n objects from a reflexive-transitive relation leq[a][b]
// (closed automatically). Arrow a->b is named "<a><=<b>" unless it is an identity.
FinCat preorder_category(const std::vector<std::string>& names, std::vector<std::vector<bool>> leq,
                         const std::string& name = "P");
// Free category on a finite acyclic graph: arrows are paths.
FinCat free_category(const std::vector<std::string>& names,
                     const std::vector<std::tuple<std::string, int, int>>& edges,
                     const std::string& name = "F");

struct Functor {
  CatRef src;
  CatRef tgt;
  std::vector<Obj> on_obj;
  std::vector<Arr> on_arr;

  Obj operator()(Obj a) const { return on_obj[a]; }
  Arr arr(Arr f) const { return on_arr[f]; }
};

void validate(const Functor& f);
Functor identity_functor(const CatRef& c);
Functor compose(const Functor& g, const Functor& f);  // g∘f
bool operator==(const Functor& a, const Functor& b);
// Every functor between the two categories, in lexicographic order of the
// object and arrow assignments.
std::vector<Functor> all_functors(const CatRef& src, const CatRef& tgt, size_t cap = 1000000);

struct NatTrans {
  Functor from;
  Functor to;
  std::vector<Arr> component;  // per object of the common source
};

void validate(const NatTrans& t);
NatTrans identity_nat(const Functor& f);

// A diagram presented as a finite graph in C: nodes are objects, edges are
// arrows of C between the nodes' objects.
struct Diagram {
  std::vector<Obj> nodes;
  struct Edge {
    int from;
    int to;
    Arr arrow;
  };
  std::vector<Edge> edges;
};

struct Cone {
  Obj apex = 0;
  std::vector<Arr> legs;
};

inline constexpr size_t kDefaultConeCap = 1000000;

std::vector<Cone> all_cones(const FinCat& c, const Diagram& d, size_t cap = kDefaultConeCap);
// Arrows m : k.apex -> l.apex with l.legs[i]∘m == k.legs[i] for all i.
std::vector<Arr> factorizations(const FinCat& c, const Cone& k, const Cone& l);
// The first limiting cone in enumeration order (apex by object order, legs
// lexicographically), or none.
std::optional<Cone> finite_limit(const FinCat& c, const Diagram& d, size_t cap = kDefaultConeCap);
// Limit of a diagram given as a functor from a finite shape.
std::optional<Cone> finite_limit(const Functor& diagram, size_t cap = kDefaultConeCap);
bool is_limit(const FinCat& c, const Diagram& d, const Cone& l, size_t cap = kDefaultConeCap);

std::optional<Obj> terminal_object(const FinCat& c);
bool is_terminal(const FinCat& c, Obj t);
// Pullback of f : a -> z and g : b -> z; legs are (p1 : P -> a, p2 : P -> b).
std::optional<Cone> pullback(const FinCat& c, Arr f, Arr g);
std::optional<Cone> product(const FinCat& c, Obj a, Obj b);
// Is (p1, p2) a pullback of (f, g)?
bool is_pullback(const FinCat& c, Arr f, Arr g, Arr p1, Arr p2);

struct SubCategory {
  FinCat cat;
  Functor inclusion;  // inclusion.src is the subcategory
};

// Slice C/X with its domain projection C/X -> C.
SubCategory slice(const CatRef& c, Obj x);
SubCategory full_subcategory(const CatRef& c, const std::vector<Obj>& objects,
                             const std::string& name = "");

}  // namespace rmk::cat
