#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semilift/grunwald_wang.hpp"
#include "semilift/ldata.hpp"

namespace semilift {

// Ordered measure of the distance from everywhere-semistable: the order of
// the group that must be trivialized locally, paired with the prime chosen
// to cut it. Comparison is by group order first, then by the prime.
struct RamModulus {
    unsigned group_order = 1;
    unsigned prime = 2;
    bool operator==(const RamModulus& o) const = default;
};
bool ram_less(const RamModulus& a, const RamModulus& b);

// The group a bad place needs trivialized (the inertia image modulo the
// kernel of the representation), together with every Frobenius-invariant
// prime-order cut of it, grouped by prime in increasing order. Cuts are
// expressed directly on the inertia labels of the place, ready to hand to
// restrict_datum; within one prime they are ordered by the underlying
// character enumeration, so the listing is deterministic.
struct LocalTrivializer {
    unsigned order = 1;
    unsigned least_prime = 2;
    std::vector<std::pair<unsigned, std::vector<InertiaCut>>> cuts;

    const std::vector<InertiaCut>& cuts_for(unsigned p) const;
};
LocalTrivializer minimal_local_trivializer(const GaloisDatum& d, const GaloisPlace& v);

// The maximum of the local moduli over all bad places, with the labels
// attaining it (sorted by cardinality then label). No modulus means the
// datum is semistable everywhere.
struct RamReport {
    std::optional<RamModulus> modulus;
    std::vector<std::string> worst;
};
RamReport ramification_modulus(const GaloisDatum& d);

// One constructed layer of the tower: the character, the extension it cuts,
// the recorded inertia cuts, the bookkeeping primes, and the restricted
// datum. The probe prime and the reserved primes are prescribed to split
// completely; the discriminator prime carries a prescribed full-order value
// so that distinct layers cut provably distinct fields.
struct ReductionStep {
    DirichletCharacter character;
    CyclicExtensionDatum extension;
    CutsTable cuts;
    u64 probe = 0;
    u64 v0 = 0;
    u64 w0 = 0;
    u64 discriminator = 0;
    std::vector<gw::LocalPrescription> prescriptions;
    GaloisDatum restricted;
};

struct StepOptions {
    u64 v0 = 0;                     // 0: smallest prime outside the support
    u64 discriminator = 0;          // 0: chosen by scanning the place table
    std::vector<u64> split_primes;  // extra primes forced completely split
};

// Builds the layer for one probe prime: assembles the local prescriptions
// (prime-order ramified at each worst place, trivial at the probe and the
// bookkeeping primes, full order at the discriminator), solves for the
// character, certifies linear disjointness (adding trivial separator
// prescriptions and re-solving when a degree-one pullback survives), and
// restricts. Errors: DOMAIN on a semistable input or an inadmissible probe,
// INFEASIBLE when no character exists, INTERNAL if the modulus fails to
// decrease strictly.
ReductionStep build_reduction_step(const GaloisDatum& d, u64 probe, const StepOptions& = {});

// An object over a prime-degree cyclic extension together with the datum of
// that extension; the cutter is what descends candidates are twisted by.
struct DescentObject {
    CyclicExtensionDatum extension;
    FormalAutDatum table;
};

struct DescentOutcome {
    FormalAutDatum descent;
    unsigned orbit_index = 0; // exponent of the first cutter applied to the seed
};

// Finds the unique twist of the seed by a power of the first object's
// cutter whose base change matches every object's table. Matching is exact
// place-by-place except where an extension ramifies at a place the
// candidate marks non-semistable (there the formal base-change clause
// cannot see the correlated drop, so the place is outside the contract).
// With three or more objects, the pairwise cross base changes are also
// compared as multisets. Errors: NODESCENT when nothing matches (including
// incompatible inputs), AMBIGUOUS when more than one twist matches.
DescentOutcome descend(const FormalAutDatum& seed, const std::vector<DescentObject>& objects);

// Callback supplying the semistable lift at the leaves; it must agree with
// the Artin factors at every place of its (everywhere-semistable) input and
// carry the neutral epsilon. The default is tautological_lift.
using Lifter = std::function<FormalAutDatum(const GaloisDatum&)>;

struct ReductionNode {
    std::string field_label;
    std::optional<RamModulus> modulus;
    std::vector<std::string> worst;
    std::vector<std::pair<u64, std::string>> failed_probes; // prime, reason
    std::vector<ReductionStep> steps;
    std::vector<std::unique_ptr<ReductionNode>> children; // one per step
    std::optional<FormalAutDatum> leaf_lift;
};

struct ReductionOptions {
    unsigned probe_budget = 3; // candidate probe primes tried per node
    unsigned branches = 2;     // independent layers required for descent
    u64 v0 = 0;                // 0: smallest prime outside the support
    bool cross_check_v0 = true; // re-derive with the next reserved prime
};

struct ReductionOutcome {
    std::unique_ptr<ReductionNode> certificate;
    FormalAutDatum lift;
    std::string certificate_text;
};

// The full driver: recurses through reduction layers until everything is
// semistable, lifts at the leaves, descends the branch lifts back down, and
// checks the descended lift against the Artin factors at every unramified
// place. The whole derivation is re-run with a different reserved prime and
// the two lifts are required to be identical. Deterministic: identical
// inputs produce byte-identical certificates. Errors: BUDGET when fewer
// than the required branches succeed, LIFTER when the callback's output
// fails its contract, plus anything propagated from the layer construction.
ReductionOutcome run_reduction(const GaloisDatum& d, const Lifter& lifter = tautological_lift,
                               const ReductionOptions& options = {});

std::string render_certificate(const ReductionNode& root, const FormalAutDatum& lift);

// Re-runs the derivation and compares the rendered certificate byte for
// byte against the recorded text.
bool replay_matches(const GaloisDatum& d, const std::string& recorded,
                    const Lifter& lifter = tautological_lift, const ReductionOptions& = {});

} // namespace semilift
