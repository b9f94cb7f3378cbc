#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "semilift/dirichlet.hpp"
#include "semilift/local_factor.hpp"
#include "semilift/representation.hpp"

namespace semilift {

// ---------------------------------------------------------------------------
// Archimedean factor: a finite multiset of Gamma-shifts mu, one per
// Gamma_R(s + mu) factor. Shifts are rationals with denominator dividing 2;
// multiset equality is the only notion of equality.
// ---------------------------------------------------------------------------
struct ArchFactor {
    std::vector<Rat> shifts; // kept sorted

    static ArchFactor make(std::vector<Rat> shifts);
    // Multiset union.
    ArchFactor merged(const ArchFactor& o) const;
    // The multiset repeated k times.
    ArchFactor repeated(unsigned k) const;

    bool operator==(const ArchFactor& o) const = default;
    std::string to_string() const; // "arch(a, b, ...)" with exact rationals
    static ArchFactor parse(std::string_view text);
};

// ---------------------------------------------------------------------------
// Jordan type of the nilpotent monodromy operator at a place: a weakly
// decreasing partition with positive parts. rank() = sum (part - 1) is the
// number of inverse roots the operator removes from the local factor.
//
// Removal convention (fixed here once, used everywhere a factor is built
// from a place record): the factor drops the top rank() inverse roots in
// the canonical multiset order. Derived objects (twists, base changes)
// operate on the already-reduced factor; removal is never re-applied.
// ---------------------------------------------------------------------------
struct MonodromyType {
    std::vector<unsigned> partition; // weakly decreasing, parts >= 1

    static MonodromyType make(std::vector<unsigned> parts);
    static MonodromyType none() { return MonodromyType{}; }
    unsigned rank() const;  // sum (part - 1)
    unsigned boxes() const; // sum of parts
    bool operator==(const MonodromyType& o) const = default;
    std::string to_string() const; // "[2,1]" or "[]"
};

// ---------------------------------------------------------------------------
// Place record of a Galois-backed datum. q is the residue cardinality (a
// prime power p^f over the residue prime p); frobenius and inertia refer to
// element labels of the datum's group. The Frobenius must normalize the
// inertia subgroup.
// ---------------------------------------------------------------------------
struct GaloisPlace {
    std::string label;
    u64 q = 2;
    unsigned frobenius = 0;
    std::vector<unsigned> inertia; // sorted element labels, a subgroup
    MonodromyType monodromy;
};

// ---------------------------------------------------------------------------
// Splitting rule for the places not listed explicitly: for a prime l
// coprime to the rule modulus (and carrying no explicit record), the places
// above l are read off the residue l mod modulus. Each entry contributes
// `count` places of residue degree `degree` (q = l^degree) with the stated
// Frobenius element and trivial inertia.
//
// The table must have one (nonempty) entry list for every residue coprime
// to the modulus, and every prime dividing the modulus must carry explicit
// place records. Sum of degree*count is the same for every residue (the
// field degree).
// ---------------------------------------------------------------------------
struct FrobeniusRule {
    struct Entry {
        unsigned frobenius = 0;
        unsigned degree = 1;
        unsigned count = 1;
        bool operator==(const Entry& o) const = default;
    };
    u64 modulus = 1;
    std::map<u64, std::vector<Entry>> table;

    bool operator==(const FrobeniusRule& o) const = default;
};

// ---------------------------------------------------------------------------
// Galois-backed arithmetic L-data: a matrix representation of a finite
// group together with a finite table of distinguished places; all other
// places are implicitly unramified with Frobenius supplied by the rule.
// ---------------------------------------------------------------------------
class GaloisDatum {
public:
    static GaloisDatum make(std::string field_label, unsigned field_degree, Representation rho,
                            std::vector<GaloisPlace> places, std::optional<FrobeniusRule> rule,
                            ArchFactor arch);

    const std::string& field_label() const { return field_label_; }
    unsigned field_degree() const { return field_degree_; }
    const Representation& rho() const { return rho_; }
    const GroupPtr& group() const { return rho_.group(); }
    const std::vector<GaloisPlace>& places() const { return places_; }
    const std::optional<FrobeniusRule>& rule() const { return rule_; }
    const ArchFactor& arch() const { return arch_; }

    // The explicit record with the given label, if any.
    const GaloisPlace* find_place(const std::string& label) const;
    // Explicit record, or a record synthesized from the rule when the label
    // is the decimal form of a covered prime (or "prime.k" when several
    // places lie above it). Fails with DOMAIN when the place is unknown.
    GaloisPlace resolve_place(const std::string& label) const;
    // All places of residue cardinality <= bound, explicit and rule-backed,
    // sorted by (q, label).
    std::vector<GaloisPlace> places_up_to(u64 bound) const;

    // Replacement-field copy used by the restriction pushforward.
    GaloisDatum with(std::string field_label, unsigned field_degree,
                     std::vector<GaloisPlace> places, std::optional<FrobeniusRule> rule,
                     ArchFactor arch) const;
    GaloisDatum with_rho(Representation rho) const;

private:
    GaloisDatum(std::string field_label, unsigned field_degree, Representation rho,
                std::vector<GaloisPlace> places, std::optional<FrobeniusRule> rule,
                ArchFactor arch);

    std::string field_label_;
    unsigned field_degree_ = 1;
    Representation rho_;
    std::vector<GaloisPlace> places_;
    std::optional<FrobeniusRule> rule_;
    ArchFactor arch_;
};

// ---------------------------------------------------------------------------
// Formal automorphic L-data: per-place Satake data given directly as local
// factors, with a per-place semistability flag, an epsilon monomial and an
// archimedean factor. Implicit places are covered by a shape rule in the
// same style as FrobeniusRule, giving the unit parts and weights of the
// inverse roots by residue class.
// ---------------------------------------------------------------------------
struct SatakeShape {
    RootOfUnity unit;
    long twice_weight = 0;
    bool operator==(const SatakeShape& o) const = default;
};

struct FormalRule {
    struct Entry {
        std::vector<SatakeShape> roots;
        unsigned degree = 1;
        unsigned count = 1;
        bool operator==(const Entry& o) const = default;
    };
    u64 modulus = 1;
    std::map<u64, std::vector<Entry>> table;

    bool operator==(const FormalRule& o) const = default;
};

struct FormalPlace {
    std::string label;
    LocalFactor factor;
    bool semistable = true;
    bool operator==(const FormalPlace& o) const = default;
};

class FormalAutDatum {
public:
    static FormalAutDatum make(std::string field_label, unsigned field_degree,
                               std::vector<FormalPlace> places, std::optional<FormalRule> rule,
                               EpsilonDatum epsilon, ArchFactor arch);

    const std::string& field_label() const { return field_label_; }
    unsigned field_degree() const { return field_degree_; }
    const std::vector<FormalPlace>& places() const { return places_; }
    const std::optional<FormalRule>& rule() const { return rule_; }
    const EpsilonDatum& epsilon() const { return epsilon_; }
    const ArchFactor& arch() const { return arch_; }

    const FormalPlace* find_place(const std::string& label) const;
    // Explicit or rule-synthesized place; DOMAIN when unknown.
    FormalPlace resolve_place(const std::string& label) const;
    std::vector<FormalPlace> places_up_to(u64 bound) const;

    bool operator==(const FormalAutDatum& o) const = default;

private:
    FormalAutDatum(std::string field_label, unsigned field_degree,
                   std::vector<FormalPlace> places, std::optional<FormalRule> rule,
                   EpsilonDatum epsilon, ArchFactor arch);

    std::string field_label_;
    unsigned field_degree_ = 1;
    std::vector<FormalPlace> places_;
    std::optional<FormalRule> rule_;
    EpsilonDatum epsilon_;
    ArchFactor arch_;
};

// Arithmetic L-data: either Galois-backed or formal automorphic. Immutable;
// every operation below returns a new value.
using LData = std::variant<GaloisDatum, FormalAutDatum>;

const std::string& field_label(const LData& pi);
unsigned field_degree(const LData& pi);
const ArchFactor& arch_factor(const LData& pi);

// ---------------------------------------------------------------------------
// Cyclic prime-degree extension of the datum's field, cut by a Dirichlet
// character of that exact order (normalized to its primitive core). The
// splitting of a place is read off the character's value at the residue
// cardinality.
// ---------------------------------------------------------------------------
struct PlaceSplitting {
    unsigned count = 1;    // number of places above
    unsigned degree = 1;   // residue degree of each (over the base place)
    bool ramified = false; // true iff the extension ramifies there
    bool operator==(const PlaceSplitting& o) const = default;
};

class CyclicExtensionDatum {
public:
    static CyclicExtensionDatum make(std::string base_label, std::string ext_label,
                                     DirichletCharacter cutter);

    const std::string& base_label() const { return base_label_; }
    const std::string& ext_label() const { return ext_label_; }
    unsigned degree() const { return degree_; }
    const DirichletCharacter& cutter() const { return cutter_; }

    // Splitting of a place of residue cardinality q_v.
    PlaceSplitting splitting_at(u64 qv) const;
    // Value of the cutting character at an unramified place of residue
    // cardinality q_v (DOMAIN if the extension ramifies there).
    RootOfUnity value_at(u64 qv) const;
    // Value assigned to a Frobenius lift at a place where the extension
    // ramifies: the prime-to-p part of the cutting character evaluated at
    // the residue prime p.
    RootOfUnity ramified_frobenius_value(u64 qv) const;

private:
    std::string base_label_;
    std::string ext_label_;
    unsigned degree_ = 2;
    DirichletCharacter cutter_;
};

// Derived place descriptor shared by both datum kinds.
struct DerivedPlace {
    std::string label;  // base label, or "label.k" when the place splits
    u64 q = 2;          // residue cardinality in the extension
    unsigned degree = 1;
    bool ramified = false;
    bool operator==(const DerivedPlace& o) const = default;
};

// Labels of the places above a base place, with their residue data:
// completely split places keep q and get ".1"..".p" suffixes, an inert
// place keeps the label with q^p, a ramified place keeps both label and q.
std::vector<DerivedPlace> places_above(const CyclicExtensionDatum& e, const std::string& label,
                                       u64 qv);

// ---------------------------------------------------------------------------
// Inertia cut: an explicitly recorded order-p character of the inertia
// subgroup at one place, invariant under Frobenius conjugation, describing
// which index-p part of the inertia survives a ramified prime-degree base
// change. theta maps inertia element labels to exponents k (value =
// zeta_p^k); it must be a surjective homomorphism onto Z/p.
// ---------------------------------------------------------------------------
struct InertiaCut {
    std::map<unsigned, unsigned> theta;
};
using CutsTable = std::map<std::string, InertiaCut>; // keyed by place label

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Local factor of a Galois-backed datum: the inverse roots are the
// eigenvalue multiset of rho(frobenius) on the inertia-fixed subspace, all
// exact roots of unity of weight zero; a positive monodromy rank removes
// the top-rank sub-multiset as documented at MonodromyType.
LocalFactor artin_local_factor(const GaloisDatum& d, const std::string& place);
LocalFactor artin_local_factor(const GaloisDatum& d, const GaloisPlace& v);

// Kind-independent local factor lookup.
LocalFactor local_factor_at(const LData& pi, const std::string& place);
// All local factors with residue cardinality <= bound, sorted by (q, label).
struct PlaceFactor {
    std::string label;
    LocalFactor factor;
    bool semistable = true;
    bool operator==(const PlaceFactor& o) const = default;
};
std::vector<PlaceFactor> local_factors_up_to(const LData& pi, u64 bound);

// True iff the datum is semistable at the place: trivial inertia image for
// Galois-backed data (whatever the monodromy rank), the per-place flag for
// formal data. Rule-covered implicit places are always semistable.
bool semistable_at(const LData& pi, const std::string& place);
bool semistable_at(const GaloisDatum& d, const GaloisPlace& v);

// Twist by a Dirichlet character. Where the character is unramified each
// inverse root picks up the factor chi(q_v); where it ramifies the local
// factor becomes 1 (empty multiset) and the place is flagged
// non-semistable. Twisting by the trivial character returns the input
// unchanged. A nontrivially twisted Galois-backed datum is returned in
// formal form: the twisted object lives over a larger group, so only its
// local data survive in the model. Epsilon and archimedean data are
// carried verbatim.
LData twist_ldata(const LData& pi, const DirichletCharacter& chi);
FormalAutDatum twist_formal(const FormalAutDatum& d, const DirichletCharacter& chi);

// Contragredient: dual representation for Galois-backed data; for formal
// data every inverse root is inverted (unit inverted, weight negated)
// place-by-place and the epsilon monomial is inverted. An involution.
LData contragredient(const LData& pi);

// Restriction of a Galois-backed datum along a prime-degree cyclic
// extension cut by a character linearly disjoint from the datum's field:
// the group and representation are unchanged and the place table is pushed
// forward place-by-place (split places are copied, an inert place of
// splitting degree f gets frobenius^f and q^f, a ramified place keeps q
// and drops its inertia to the kernel of the recorded cut when one is
// supplied). Fails with DOMAIN when the cutting character is detectably
// cut by the datum's own field, or when the evidence cannot exclude it.
GaloisDatum restrict_datum(const GaloisDatum& d, const CyclicExtensionDatum& e,
                           const CutsTable& cuts = {});

// Cyclic prime-degree base change. Formal data follow the per-place
// trichotomy (split: copy; inert: regroup the product of the twisted
// factors as a polynomial in T^p, which always succeeds and is internally
// verified; ramified: the untwisted factor carried to the same q); the
// epsilon monomial and archimedean factor are raised to the p-th
// power/multiplicity. Galois-backed data are pushed through
// restrict_datum, and the result is checked against the product formula
// at every explicit place unramified in both the datum and the extension.
LData base_change(const LData& pi, const CyclicExtensionDatum& e, const CutsTable& cuts = {});

// Dirichlet coefficients of the Euler product over places of residue
// cardinality <= cutoff: entry n holds a_n for 1 <= n <= cutoff (entry 0
// is zero). The expansion of each local factor and the per-place
// convolution are exact; the parallel policy splits the convolution across
// threads and must agree with the serial path bit-for-bit.
std::vector<CycNum> partial_l_series(const LData& pi, u64 cutoff,
                                     ExecPolicy policy = default_policy());

// The tautological semistable lift: Frobenius eigenvalues become Satake
// parameters place-by-place, semistability flags are computed, the rule is
// translated entry-by-entry, the epsilon monomial defaults to the neutral
// one. Fails with DOMAIN if the datum is not semistable everywhere.
FormalAutDatum tautological_lift(const GaloisDatum& d);

// Nontrivial degree-one characters of the datum's group consistent with the
// cutting character on all available Frobenius evidence. With a rule the
// answer is exact (the matches are precisely the pullbacks); without one a
// match only means the evidence cannot distinguish the two.
std::vector<OneDimChar> pullback_candidates(const GaloisDatum& d, const DirichletCharacter& chi);

// The factor-table image of a group-backed datum: like tautological_lift but
// places where the datum is not semistable keep their (possibly smaller)
// invariant factor with the semistable flag cleared.
FormalAutDatum formal_image(const GaloisDatum& d);

// Deterministic multi-line rendering (places sorted by cardinality then
// label, then rule, epsilon and archimedean lines). Stable across runs;
// intended for certificates and diff-based comparisons.
std::string describe(const FormalAutDatum& d);

} // namespace semilift
