#pragma once

#include <compare>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rmk/cat/fincat.hpp"

namespace rmk::cat {

class Rng;

// An element of a fibration: index `idx` in the fiber over `obj`.
struct Elem {
  Obj obj = 0;
  int idx = 0;
  friend auto operator<=>(const Elem&, const Elem&) = default;
};

// Discrete fibration in presheaf form: a fiber per base object and, for each
// base arrow f : a -> b, the restriction D(b) -> D(a), written e · f.
class DFib {
 public:
  DFib() = default;
  DFib(CatRef base, std::string name, std::vector<std::vector<std::string>> fibers,
       std::vector<std::vector<int>> restriction);

  const CatRef& base() const { return base_; }
  const std::string& name() const { return name_; }
  int fiber_size(Obj a) const { return static_cast<int>(fibers_[a].size()); }
  const std::vector<std::string>& fiber(Obj a) const { return fibers_[a]; }
  const std::string& element_name(Obj a, int i) const { return fibers_[a][i]; }
  std::optional<int> find_element(Obj a, const std::string& name) const;
  int act(int e, Arr f) const { return restriction_[f][e]; }
  const std::vector<int>& restriction(Arr f) const { return restriction_[f]; }
  const std::vector<std::vector<int>>& restrictions() const { return restriction_; }

  int total_size() const { return offsets_.empty() ? 0 : offsets_.back(); }
  int flat(Elem e) const { return offsets_[e.obj] + e.idx; }
  Elem unflat(int k) const;

 private:
  CatRef base_;
  std::string name_;
  std::vector<std::vector<std::string>> fibers_;
  std::vector<std::vector<int>> restriction_;
  std::vector<int> offsets_;  // size num_objects + 1
};

using DFibRef = std::shared_ptr<const DFib>;

// Restrictions along identities are identities and restriction is functorial.
void validate(const DFib& d);

DFib terminal_dfib(const CatRef& base);
DFib empty_dfib(const CatRef& base);

// Missing restrictions (absent or empty rows) are derived from composites of
// known ones; identities are filled in. Throws LawError(Malformed) when some
// arrow stays undetermined.
std::vector<std::vector<int>> complete_restrictions(const FinCat& base,
                                                    const std::vector<std::vector<std::string>>& fibers,
                                                    std::vector<std::vector<int>> partial);

// A map of fibrations over the base functor `base`. fn[a][i] is the image of
// element i over a, in the fiber of tgt over base(a).
struct DFibMap {
  DFibRef src;
  DFibRef tgt;
  Functor base;
  std::vector<std::vector<int>> fn;

  int operator()(Obj a, int i) const { return fn[a][i]; }
  Elem operator()(Elem e) const { return {base(e.obj), fn[e.obj][e.idx]}; }
};

// Map over the identity of the common base.
DFibMap make_map(DFibRef src, DFibRef tgt, std::vector<std::vector<int>> fn);
DFibMap identity_map(const DFibRef& d);
DFibMap compose(const DFibMap& g, const DFibMap& f);  // g∘f
bool operator==(const DFibMap& a, const DFibMap& b);
bool over_identity(const DFibMap& m);
void validate(const DFibMap& m);
bool is_iso(const DFibMap& m);

// The total category (category of elements) with its projection.
struct Total {
  CatRef cat;
  Functor proj;
  std::vector<int> offset;        // object of (a, i) is offset[a] + i
  std::vector<int> arrow_offset;  // lift of f at e in D(tgt f) is arrow_offset[f] + e
  std::vector<Elem> elements;     // by total object

  Obj object(Elem e) const { return offset[e.obj] + e.idx; }
  Elem element(Obj x) const { return elements[x]; }
  // The unique arrow e · f -> e over f.
  Arr lift(Arr f, int e) const { return arrow_offset[f] + e; }
};

Total total(const DFibRef& d);
// The functor between total categories induced by a map.
Functor total_functor(const DFibMap& m, const Total& src, const Total& tgt);

// Unique lifting for a functor between finite categories; throws
// LawError(NotDiscreteFibration) with the offending object and arrow.
void check_discrete_fibration(const Functor& p);
bool is_discrete_fibration(const Functor& p);
// Presheaf form of a discrete fibration given as a functor.
DFib fibration_of(const Functor& p, const std::string& name = "D");
// A map Z -> X of fibrations over B, read as a fibration over total(X).
struct OverTotal {
  DFib fib;
  std::vector<std::vector<int>> members;  // per total object: indices into Z's fiber
};
OverTotal over_total(const DFibMap& g, const Total& tx);
// E over total(Y), read as a fibration over the base of Y, with its map to Y.
struct Sigma {
  DFibRef obj;
  DFibMap to_base;                        // to Y
  std::vector<std::vector<std::pair<int, int>>> decode;  // per base object: (y, e)
};
Sigma sigma(const DFib& e, const DFibRef& y, const Total& ty);

// --- Yoneda -------------------------------------------------------------

DFib yoneda(const CatRef& b, Obj x);
// The element of D corresponding to a map from the slice over x.
int yoneda_element(const DFibMap& m, Obj x);
// The map from the slice over x sending id_x to element e of D(x).
DFibMap yoneda_map(const DFibRef& slice, const DFibRef& d, Obj x, int e);

struct YonedaReport {
  size_t maps = 0;
  size_t fiber = 0;
  bool bijective = false;
};
YonedaReport yoneda_bijection(const CatRef& b, Obj x, const DFibRef& d);

// --- Enumeration of maps over the identity --------------------------------

// allowed(a, i, v): may element i over a be sent to v?
using MapFilter = std::function<bool(Obj, int, int)>;
// Return false to stop the enumeration.
using MapVisitor = std::function<bool(const std::vector<std::vector<int>>&)>;

void for_each_map(const DFib& d, const DFib& e, const MapVisitor& visit, const MapFilter& allowed = {});
size_t count_maps(const DFib& d, const DFib& e, const MapFilter& allowed = {});
std::vector<DFibMap> all_maps(const DFibRef& d, const DFibRef& e, size_t cap = 1000000);
// Maps d -> e commuting with p : d -> y and q : e -> y.
size_t count_maps_over(const DFibMap& p, const DFibMap& q);
std::optional<DFibMap> random_map(Rng& rng, const DFibRef& d, const DFibRef& e, const MapFilter& allowed = {});
std::optional<DFibMap> find_isomorphism(const DFibRef& d, const DFibRef& e);

// --- Base change ----------------------------------------------------------

DFib base_change(const DFib& d, const Functor& f, const CatRef& new_base);
inline DFib base_change(const DFib& d, const Functor& f) { return base_change(d, f, f.src); }
// The square total(F*D) -> total(D) over F is a pullback of categories.
bool base_change_is_pullback(const DFib& d, const Functor& f, const DFib& fd);

// σ : F => G between functors B' -> B. sigma_star : G*D -> F*D is restriction
// along the components of σ.
struct Transport {
  DFibRef fd;
  DFibRef gd;
  DFibMap sigma_star;
  // Maps G*D -> F*D over B' admitting an overlay above σ, found by exhaustive search.
  size_t overlay_candidates = 0;
};
Transport transport_along_nat(const NatTrans& sigma, const DFibRef& d);

// --- Pullbacks of fibrations -----------------------------------------------

struct FibPullback {
  DFibRef obj;
  DFibMap p1;  // to f.src
  DFibMap p2;  // to g.src
};
// Fiberwise pullback of f : A -> C and g : B -> C over the identity.
FibPullback pullback(const DFibMap& f, const DFibMap& g);
FibPullback product(const DFibRef& a, const DFibRef& b);

// --- Representable maps --------------------------------------------------

// Right adjoint of u : X -> Y. For y over b, value is G(y) in X and counit
// the base arrow {y} -> b with y · counit = u(G y).
struct RightAdjoint {
  std::vector<std::vector<Elem>> value;
  std::vector<std::vector<Arr>> counit;
  Elem operator()(Elem y) const { return value[y.obj][y.idx]; }
};

// Searches each comma category (u ↓ y) for a terminal object, in declaration
// order. On failure, `failure` receives the first y without one.
std::optional<RightAdjoint> right_adjoint(const DFibMap& u, Elem* failure = nullptr);
bool is_representable(const DFibMap& u);
// Base arrow of the unit x -> G(u x).
Arr unit_arrow(const DFibMap& u, const RightAdjoint& ra, Elem x);
// The right adjoint as a functor total(Y) -> total(X).
Functor adjoint_functor(const DFibMap& u, const RightAdjoint& ra, const Total& tx, const Total& ty);
// Checks the adjunction bijection Hom(u x, y) ≅ Hom(x, G y) for all x, y.
bool verify_adjunction(const DFibMap& u, const RightAdjoint& ra);

// Context extension {y}: the object, the projection π and the generic element q.
struct Extension {
  Obj object = 0;
  Arr pi = 0;
  int q = 0;
};
Extension context_extension(const DFibMap& u, const RightAdjoint& ra, Elem y);
// The square (B/{y} -> X, π, y) is a pullback.
bool extension_is_pullback(const DFibMap& u, Elem y, const Extension& ext);

// Representable as a fibration: isomorphic to some slice. Returns the
// representing element.
std::optional<Elem> representing_element(const DFib& d);
// The unique map D -> 1 is representable.
bool terminal_map_representable(const DFibRef& d);

struct Pushforward {
  DFibRef obj;         // u_* Z
  DFibMap to_y;        // u_* Z -> Y
  FibPullback pulled;  // u^* u_* Z with p1 to X
  DFibMap eval;        // u^* u_* Z -> Z over X
  // Per element over b: (y in Y(b), z in Z over G(y)).
  std::vector<std::vector<std::pair<int, int>>> decode;
};
// u_* Z for g : Z -> X, computed as the base change of Z along G^u.
Pushforward pushforward(const DFibMap& u, const RightAdjoint& ra, const DFibMap& g);

// Both sides of the pushforward adjunction for a test object w : W -> Y.
struct UmpCounts {
  size_t lhs = 0;  // Hom over X (u^* W, Z)
  size_t rhs = 0;  // Hom over Y (W, u_* Z)
};
UmpCounts pushforward_ump(const DFibMap& u, const DFibMap& g, const Pushforward& pf, const DFibMap& w);

// P_u(A) = Y_! u_* X^* A. decode lists (y, a) per element.
struct Polynomial {
  DFibRef obj;
  std::vector<std::vector<std::pair<int, int>>> decode;
};
Polynomial polynomial(const DFibMap& u, const RightAdjoint& ra, const DFibRef& a);

// --- Beck–Chevalley --------------------------------------------------------

// top : X' -> X, left : X' -> Y', right : X -> Y, bottom : Y' -> Y.
struct Square {
  DFibMap top;
  DFibMap left;
  DFibMap right;
  DFibMap bottom;
};

bool commutes(const Square& s);
// Independent check: X'(b) -> X(b) ×_{Y(b)} Y'(b) is a bijection for all b.
bool is_pullback_square(const Square& s);
// The mate top∘G' => G∘bottom between functors total(Y') -> total(X).
// Throws LawError(MissingAdjoint) if a vertical map is not representable.
NatTrans canonical_mate(const Square& s);
bool beck_chevalley(const Square& s);

struct PullbackBC {
  bool is_pullback = false;
  bool bc = false;
  bool agree = false;
};
PullbackBC pullback_iff_bc(const Square& s);

}  // namespace rmk::cat
