#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semilift/numtheory.hpp"
#include "semilift/rational.hpp"

namespace semilift {

// Element of the cyclotomic closure of Q in canonical form:
//   conductor m with m != 2 (mod 4), coefficients on the power basis
//   zeta_m^0 .. zeta_m^{phi(m)-1} after reduction mod the m-th cyclotomic
//   polynomial, with m minimal (no proper cyclotomic subfield contains the
//   element). Canonical vectors are unique, so equality is component-wise.
class CycNum {
public:
    CycNum() : conductor_(1), coeffs_{Rat(0)} {}

    static CycNum zero() { return CycNum(); }
    static CycNum one() { return from_rational(Rat(1)); }
    static CycNum from_rational(const Rat& r);
    // e^{2*pi*i*j/k}
    static CycNum root_of_unity(u64 k, long long j);
    // sum over i of coeffs[i] * zeta_m^i (any length <= m); normalizes.
    static CycNum from_exponents(u64 m, std::vector<Rat> coeffs);

    unsigned conductor() const { return conductor_; }
    const std::vector<Rat>& coeffs() const { return coeffs_; }

    bool is_zero() const;
    bool is_rational() const { return conductor_ == 1; }
    // Requires is_rational().
    Rat rational_value() const;

    CycNum operator-() const;
    CycNum operator+(const CycNum& o) const;
    CycNum operator-(const CycNum& o) const;
    CycNum operator*(const CycNum& o) const;
    CycNum operator/(const CycNum& o) const;
    CycNum inverse() const;
    CycNum pow(long long e) const;

    // Galois conjugation sigma_a : zeta_m -> zeta_m^a, gcd(a, m) = 1.
    CycNum galois(long long a) const;
    CycNum conj() const { return galois(-1); }

    // (k, j) with gcd(j, k) = 1 and this == e^{2*pi*i*j/k}, when on the
    // finite unit group of the field.
    std::optional<std::pair<u64, u64>> as_root_of_unity() const;

    bool operator==(const CycNum& o) const {
        return conductor_ == o.conductor_ && coeffs_ == o.coeffs_;
    }
    bool operator!=(const CycNum& o) const { return !(*this == o); }
    // Deterministic total order (conductor, then coefficient lexicographic).
    bool operator<(const CycNum& o) const;

    // Canonical encoding "cyc(m; c0,c1,...)" with rational entries.
    std::string to_string() const;
    // Accepts the canonical encoding or a bare rational literal.
    static CycNum parse(std::string_view text);

private:
    unsigned conductor_;
    std::vector<Rat> coeffs_; // size phi(conductor_)

    CycNum(unsigned m, std::vector<Rat> c) : conductor_(m), coeffs_(std::move(c)) {}
    static CycNum normalized(u64 m, std::vector<Rat> exponent_coeffs);
};

// sqrt(q) for a prime power q, as an exact cyclotomic number
// (zeta_8 + zeta_8^-1 for q = 2, quadratic Gauss sums for odd primes).
CycNum sqrt_prime_power(u64 q);

} // namespace semilift
