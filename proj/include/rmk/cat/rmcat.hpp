#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rmk/cat/dfib.hpp"
#include "rmk/cat/fincat.hpp"

namespace rmk::cat {

// A terminal object and a designated pullback for every cospan. Finite
// categories with this structure are necessarily thin: Hom(A, B^n) has
// |Hom(A, B)|^n elements.
struct Cartesian {
  CatRef cat;
  Obj terminal = 0;
  // (f, g) with a common codomain -> cone with legs to src f and src g.
  std::map<std::pair<Arr, Arr>, Cone> pullbacks;

  const Cone& pullback(Arr f, Arr g) const { return pullbacks.at({f, g}); }
};

// Throws LawError(NotCartesian) naming a cospan without a pullback.
Cartesian cartesian_structure(const CatRef& c);

// f_* g for f : X -> Y and g : Z -> X: an arrow h : W -> Y with evaluation
// e : f^*W -> Z over X, where f^*W is the designated pullback of (f, h).
struct PushforwardWitness {
  Arr h = kNone;
  Arr eval = kNone;
};

// Checks the universal property against every object of C/Y.
bool pushforward_ump(const Cartesian& c, Arr f, Arr g, const PushforwardWitness& w, std::string* why = nullptr);
std::optional<PushforwardWitness> find_pushforward(const Cartesian& c, Arr f, Arr g);
bool is_exponentiable(const Cartesian& c, Arr f);

struct RMCat {
  Cartesian cart;
  std::vector<bool> representable;
  std::map<std::pair<Arr, Arr>, PushforwardWitness> pushforwards;

  const FinCat& cat() const { return *cart.cat; }
  const CatRef& cat_ref() const { return cart.cat; }
  Obj terminal() const { return cart.terminal; }
  std::vector<Arr> representables() const;
};

using RMCatRef = std::shared_ptr<const RMCat>;

// Verifies the axioms. Stored pushforward witnesses are checked; missing ones
// are found by search.
RMCat validate_rmcat(const CatRef& c, const std::vector<bool>& representable,
                     const std::map<std::pair<Arr, Arr>, PushforwardWitness>& given = {});

std::vector<bool> isomorphisms(const FinCat& c);
std::vector<bool> all_arrows(const FinCat& c);
// Least stable class containing the generators, to fixpoint. Throws
// LawError(NotExponentiable) for a generator without pushforwards.
std::vector<bool> generate_stable_class(const CatRef& c, const std::vector<Arr>& generators);
// Representables of a valid RMCat re-derived: every pullback of a
// representable along any arrow, over all limiting cones, is representable.
bool pullback_stable(const Cartesian& c, const std::vector<bool>& cls, std::string* why = nullptr);

struct SliceRM {
  RMCat rm;
  Functor projection;  // C/X -> C
  // Slice object of each arrow into X, by arrow index (kNone otherwise).
  std::vector<Obj> object_of_arrow;
};
SliceRM slice_rmcat(const RMCat& c, Obj x);

// Throws LawError(NotRMFunctor) naming the failing limit, arrow or pushforward.
void check_rm_functor(const RMCat& c, const RMCat& d, const Functor& f);
bool is_rm_functor(const RMCat& c, const RMCat& d, const Functor& f);

// Extension of F : C -> D along C -> C/X sending the generic section to s : 1 -> F X.
struct SectionExtension {
  SliceRM slice;
  Functor extension;  // C/X -> D
  size_t candidates = 0;
  bool unique_up_to_iso = false;
};
SectionExtension adjoin_section_check(const RMCat& c, Obj x, const RMCat& d, const Functor& f, Arr s);

// A set-valued functor on a finite RMCat.
struct Theory {
  RMCatRef T;
  std::vector<std::vector<std::string>> sets;
  std::vector<std::vector<int>> maps;  // per arrow f : A -> B, Θ(A) -> Θ(B)
};

Theory constant_theory(const RMCatRef& t);
// Θ(A) = Hom(x, A) with post-composition.
Theory hom_theory(const RMCatRef& t, Obj x);

// Category of elements: objects (A, a), arrows (f, a) : (A, a) -> (B, Θf(a)).
FinCat elements_category(const Theory& th);
bool elements_cofiltered(const Theory& th, std::string* why = nullptr);
bool preserves_designated_limits(const Theory& th, std::string* why = nullptr);
// Functorial and cartesian; both cartesianness checks must agree.
void validate_theory(const Theory& th);

// Fibrations over B with fibers of at most `bound` elements, one per
// isomorphism class, with all maps between them.
struct BoundedDFibRM {
  CatRef base;
  int bound = 0;
  std::vector<DFibRef> objects;
  std::vector<DFibMap> arrows;
  CatRef cat;
  std::vector<bool> representable;
};

BoundedDFibRM dfib_rmcat(const CatRef& base, int bound, size_t cap = 20000);
// Fibrations over base with fibers of at most `bound` elements, up to iso.
std::vector<DFibRef> all_dfibs(const CatRef& base, int bound, size_t cap = 20000);

struct AxiomReport {
  size_t checks = 0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};
// Identities and composites of representables are representable, pullbacks
// (computed exactly) of representables are representable, and pushforwards
// satisfy the universal property against every test object in the fragment.
AxiomReport validate_bounded(const BoundedDFibRM& m);

}  // namespace rmk::cat
