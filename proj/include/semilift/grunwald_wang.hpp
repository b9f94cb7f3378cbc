#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "semilift/cyclotomic.hpp"
#include "semilift/dirichlet.hpp"
#include "semilift/exec.hpp"

namespace semilift {
namespace gw {

// Required local behavior of a global character at one prime: either an
// unramified condition fixing chi(p), or a ramified condition fixing the
// full p-component (a primitive character of p-power modulus).
struct LocalPrescription {
    u64 p = 0;
    bool ramified = false;
    RootOfUnity value;                            // unramified: required chi(p)
    std::optional<DirichletCharacter> component;  // ramified: required p-part

    static LocalPrescription unramified(u64 p, RootOfUnity required_value);
    static LocalPrescription ramified_at(DirichletCharacter component);

    u64 order() const { return ramified ? component->order() : value.order; }
    bool matches(const DirichletCharacter& chi) const;

    bool operator==(const LocalPrescription& o) const {
        return p == o.p && ramified == o.ramified && value == o.value && component == o.component;
    }

    // "at 5 unram order 2 value -1" / "at 2 ram mod 8 values -1, 1"
    std::string to_string() const;
    static LocalPrescription parse(std::string_view text);
};

// Detection of the order-exactness obstruction at the prime 2: the check
// applies when 8 | m and 2 carries a prescription, and evaluates the
// product of the local characters at a0 = (1+i)^m = 2^{m/2}. The
// construction of an order-m character can proceed iff the product is 1.
struct SpecialCaseReport {
    bool is_special = false;
    CycNum a0_product = CycNum::one();
};
SpecialCaseReport special_case_check(const std::vector<LocalPrescription>& prescriptions, u64 m);

// Failure report: no character of order exactly m fits; when possible the
// solver constructs a character of order 2m matching every prescription.
struct Infeasible {
    std::string reason;
    std::optional<DirichletCharacter> order_doubled;
};

using Outcome = std::variant<DirichletCharacter, Infeasible>;

struct SolveOptions {
    u64 aux_bound = 100000; // largest auxiliary prime considered
    bool report_doubled = true;
};

// Constructs a Dirichlet character of order exactly m whose local component
// at every prescribed prime matches, is unramified outside the prescribed
// primes plus at most two auxiliary primes, and avoids ramification at the
// given primes. Deterministic: smallest admissible auxiliary primes, then
// the least exponent. Throws CONFLICT for duplicate primes and DOMAIN for
// structurally invalid input; arithmetic impossibility returns Infeasible.
Outcome solve(const std::vector<LocalPrescription>& prescriptions, u64 m,
              const std::vector<u64>& avoid = {}, const SolveOptions& options = {});

// Exhaustive enumeration oracle: every character of order exactly `order`
// and modulus <= max_modulus whose local data matches the prescriptions,
// sorted by (modulus, values). The parallel path scans moduli concurrently
// and returns the identical list.
std::vector<DirichletCharacter> brute_force_characters(
    u64 max_modulus, u64 order, const std::vector<LocalPrescription>& prescriptions,
    ExecPolicy policy = default_policy());

} // namespace gw
} // namespace semilift
