#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rmk/cat/dfib.hpp"
#include "rmk/cat/rmcat.hpp"

namespace rmk::cat {

// A model of T: a fibration over the base per object of T and a map per arrow.
struct Model {
  RMCatRef T;
  CatRef base;
  Obj terminal = 0;
  std::vector<DFibRef> obj;
  std::vector<DFibMap> arr;
  std::string name = "M";
};

using ModelRef = std::shared_ptr<const Model>;

// Fills in identities and composites of T that are not given. Throws
// LawError(Malformed) when some arrow stays undetermined.
std::vector<DFibMap> complete_arrows(const RMCat& t, const std::vector<DFibRef>& obj,
                                     std::vector<std::optional<DFibMap>> given);

// Terminal object, functoriality, preservation of the terminal object, the
// designated pullbacks, representables and pushforwards. Throws NoTerminal
// or NotRMFunctor naming the offending arrow or cone.
void check_model(const Model& m);
Model validate_model(const RMCatRef& t, const CatRef& base, std::vector<DFibRef> obj,
                     std::vector<DFibMap> arr, const std::string& name = "M");

// The Yoneda self-model A |-> T/A.
Model yoneda_model(const RMCatRef& t);

// --- Natural models ---------------------------------------------------------

struct CwfExtension {
  Elem type;  // in U
  Extension ext;
};

struct NaturalModel {
  CatRef base;
  Obj terminal = 0;
  DFibRef U;
  DFibRef E;
  DFibMap p;
  RightAdjoint ra;
  std::vector<CwfExtension> extensions;  // one per element of U
};

// Throws NoTerminal, or NotRepresentable naming a type without extension.
NaturalModel natural_model_check(const CatRef& base, const DFibRef& u, const DFibRef& e, const DFibMap& p);

// Fibers of U and E over the terminal object, with the typing map.
struct NaturalLanguage {
  std::vector<std::string> types;
  std::vector<std::string> terms;
  std::vector<int> type_of;
};
NaturalLanguage internal_language(const NaturalModel& nm);

// Elements of P_p^n(U) over the terminal object.
size_t polynomial_power_count(const NaturalModel& nm, int n);
// Telescopes (A1, ..., Ak) with A(i+1) a type over {A(i)}, from the terminal object.
size_t telescope_count(const NaturalModel& nm, int k);

// --- Contextual objects ------------------------------------------------------

// Least iso-closed set of base objects containing the terminal objects and
// closed under extension along the given representable maps.
std::vector<bool> contextual_closure(const CatRef& base, const std::vector<DFibMap>& reps);
std::vector<bool> contextual_closure(const Model& m);
std::vector<bool> contextual_closure(const NaturalModel& nm);
bool is_democratic(const Model& m);
bool is_democratic(const NaturalModel& nm);

// --- Morphisms ----------------------------------------------------------------

struct ModelMorphism {
  ModelRef src;
  ModelRef tgt;
  Functor base;
  std::vector<DFibMap> comp;  // per object of T, over base
};

// The arrow F{y} -> {F y} in the target base for representable u in the
// source and v in the target, or kNone if the comma has no such arrow.
Arr extension_comparison(const ModelMorphism& f, Arr t_arrow, Elem y);

// Throws NoTerminal, NotNatural or BCFails naming the T-arrow.
void check_morphism(const ModelMorphism& f);
bool is_morphism(const ModelMorphism& f);
ModelMorphism identity_morphism(const ModelRef& m);
ModelMorphism compose(const ModelMorphism& g, const ModelMorphism& f);

// sigma : F => G on bases; overlay existence is checked per object of T.
// Throws NotNatural or NoOverlay.
void check_2morphism(const ModelMorphism& f, const ModelMorphism& g, const NatTrans& sigma);
bool is_2morphism(const ModelMorphism& f, const ModelMorphism& g, const NatTrans& sigma);

struct Heart {
  ModelRef model;
  ModelMorphism inclusion;
};
Heart heart(const ModelRef& m);
NaturalModel heart(const NaturalModel& nm);

// Base: objects X of T with X -> 1 representable. Fibers: Hom_T(X, A).
Model bi_initial_model(const RMCatRef& t);

// Θ(A) = fiber of A over the terminal object.
Theory internal_language(const Model& m);

// --- Enumeration ----------------------------------------------------------------

struct Bounds {
  int max_objects = 3;
  int max_fiber = 3;
  size_t max_results = 100000;
};

// Every morphism src -> tgt. Throws Overflow beyond the bounds.
std::vector<ModelMorphism> enumerate_model_morphisms(const ModelRef& src, const ModelRef& tgt,
                                                     const Bounds& b = {});
std::vector<NatTrans> enumerate_2morphisms(const ModelMorphism& f, const ModelMorphism& g);

struct HomReport {
  size_t morphisms = 0;
  size_t max_2morphisms = 0;   // between any ordered pair
  bool all_invertible = true;  // every 2-morphism has an inverse 2-morphism
  bool contractible = false;   // nonempty, exactly one 2-morphism between any pair
};
HomReport hom_category(const ModelRef& src, const ModelRef& tgt, const Bounds& b = {});
bool hom_category_contractible(const ModelRef& src, const ModelRef& tgt, const Bounds& b = {});

// An isomorphism of models: base functor an isomorphism of categories and
// every component bijective.
std::optional<ModelMorphism> find_model_isomorphism(const ModelRef& a, const ModelRef& b);

}  // namespace rmk::cat
