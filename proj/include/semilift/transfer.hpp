#pragma once

#include <set>
#include <string>
#include <vector>

#include "semilift/ldata.hpp"

namespace semilift {

// ---------------------------------------------------------------------------
// Growth bound on one local factor (factored Weil-number form).
//
// The reciprocal factor 1/prod(1 - alpha_i q^{-s}) has a pole on the line
// Re(s) = w_i/2 for each inverse root of weight w_i, so holomorphy on the
// closed half plane Re(s) >= 1/2 is exactly "every weight < 1". The
// comparison is exact on the stored doubled weights; the boundary weight
// w = 1 fails (its pole sits on the line itself).
// ---------------------------------------------------------------------------
bool js_check(const LocalFactor& f);

// Transport of the growth bound through one cyclic layer: for every
// explicit place v of the datum, if the base-changed factor at each place
// above v satisfies js_check, then so must every twist of the local factor
// at v by a power of the cutting character (their product is the
// base-changed factor, and local factors never vanish identically).
// Returns the conjunction of these implications over all explicit places.
bool js_propagate(const LData& pi, const CyclicExtensionDatum& e);

// Exact decision of "the functional-equation ratio of the two factors is
// entire and non-vanishing", granted the growth bounds on both factors and
// their duals plus a monomial epsilon ratio. In s, the zeros of
// prod(1 - alpha q^{-s}) form vertical lattices determined by alpha, and
// two inverse roots over the same q share a lattice exactly when they are
// equal; the ratio is therefore zero- and pole-free exactly when the
// inverse-root multisets coincide, which the canonical sorted form decides
// componentwise.
bool ratio_forces_equality(const LocalFactor& a, const LocalFactor& b);

// Archimedean comparison: a ratio of Gamma_R products is entire only when
// it is constant, and with matched leading normalization that happens
// exactly when the shift multisets agree. The caller certifies via
// `fe_consistent` that the two functional equations already share their
// shape away from the archimedean places; passing false is a domain error,
// not a "no".
bool arch_match(const ArchFactor& a, const ArchFactor& b, bool fe_consistent);

// ---------------------------------------------------------------------------
// A transfer pair: two local-data tables over the same field, compared
// place by place, with a finite per-side mask of labels whose factor is
// not known (their stored factors are placeholders). Epsilon and
// archimedean data ride on the tables themselves; the contragredient
// links required by the functional equation are derived tables (inverse
// units, negated weights, inverted epsilon root).
//
// Construction enforces weak compatibility: at every label known on both
// sides and marked semistable on both sides, the factors must already
// agree. Global rules must be carried by both tables or neither, and must
// agree outright (rule-implied places are known semistable data).
// ---------------------------------------------------------------------------
struct TransferPair {
    FormalAutDatum left;
    FormalAutDatum right;
    FormalAutDatum left_dual;
    FormalAutDatum right_dual;
    std::set<std::string> left_unknown;
    std::set<std::string> right_unknown;

    static TransferPair make(const LData& left, const LData& right,
                             std::set<std::string> left_unknown = {},
                             std::set<std::string> right_unknown = {});
};

struct PlaceVerdict {
    std::string label;
    bool known = false; // factor trusted on both sides
    bool equal = false; // factors coincide (only meaningful when known)
};

struct TransferReport {
    std::vector<PlaceVerdict> places; // sorted by (residue cardinality, label)
    bool epsilon_equal = false;
    bool arch_equal = false;
    bool strong = false; // every place known and equal, archimedean included
    std::string text;    // printable transcript, deterministic
};

// ---------------------------------------------------------------------------
// Single-place endgame of the ratio argument: `place` must be the only
// masked label on either side. Verifies, in order:
//   * every known factor and its dual satisfy js_check (else JSViolation),
//   * the archimedean shift multisets agree (else
//     InconsistentFunctionalEquation: the Gamma-factor ratio could not be
//     constant),
//   * the epsilon ratio, a monomial W' * Delta'^{1/2-s} by construction,
//     reduces to the constant 1 once all other places match (else
//     InconsistentFunctionalEquation),
//   * the forced factor is consistent with any factor already recorded at
//     the place (else ContradictoryData).
// Returns the known side's factor at the place, which the forcing argument
// pins as the unique completion. Completing an already-complete consistent
// pair returns the shared factor unchanged.
// ---------------------------------------------------------------------------
LocalFactor complete_missing_factor(const TransferPair& pair, const std::string& place);

// Per-place equality table plus epsilon and archimedean verdicts. `strong`
// requires every place (finite and archimedean) to be known and matching;
// the epsilon verdict is reported alongside because equal tables force
// equal epsilon data, and a transcript line calls out the inconsistency
// when that implication fails in the inputs.
TransferReport verify_strong_transfer(const TransferPair& pair);

} // namespace semilift
