#pragma once

#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "semilift/cyclotomic.hpp"

namespace semilift {

// e^{2*pi*i*exp/order} with gcd(exp, order) = 1, so order is the exact
// multiplicative order.
struct RootOfUnity {
    u64 order = 1;
    u64 exp = 0;

    // e^{2*pi*i*num/den}
    static RootOfUnity make(long long num, u64 den);
    RootOfUnity operator*(const RootOfUnity& o) const;
    RootOfUnity pow(long long e) const;
    RootOfUnity inverse() const { return pow(-1); }
    CycNum to_cycnum() const {
        return CycNum::root_of_unity(order, static_cast<long long>(exp));
    }
    bool is_one() const { return order == 1; }

    bool operator==(const RootOfUnity& o) const = default;
    auto operator<=>(const RootOfUnity& o) const = default;

    std::string to_string() const; // "z(k,j)"
    // Accepts "z(k,j)", "1", "-1".
    static RootOfUnity parse(std::string_view text);
};

// Inverse root alpha = unit * q^{w/2}: exact Weil-number shape with unit
// part a root of unity, weight w a rational with denominator dividing 2
// (stored doubled), and base q a prime power.
struct InverseRoot {
    RootOfUnity unit;
    long twice_weight = 0;
    u64 base = 1;

    static InverseRoot make(RootOfUnity unit, const Rat& weight, u64 q);
    Rat weight() const { return rat(twice_weight, 2); }

    // Same-base product; weights add.
    InverseRoot operator*(const InverseRoot& o) const;
    // alpha^e over the same base; weight scales by e.
    InverseRoot pow(long long e) const;
    // alpha^p reinterpreted over base q^p; the weight is preserved.
    InverseRoot extension_power(unsigned p) const;
    InverseRoot inverse() const { return pow(-1); }
    // Exact value; requires an integer weight (q^{1/4} is not cyclotomic).
    CycNum to_cycnum() const;

    bool operator==(const InverseRoot& o) const = default;
    // Canonical multiset order: base, then weight, then unit.
    bool operator<(const InverseRoot& o) const {
        return std::tuple(base, twice_weight, unit) < std::tuple(o.base, o.twice_weight, o.unit);
    }

    std::string to_string() const; // "root(k,j; w; q)"
    static InverseRoot parse(std::string_view text);
};

using CycPoly = std::vector<CycNum>; // coefficients, index = degree in T

CycPoly poly_mul(const CycPoly& a, const CycPoly& b);
bool poly_equal(CycPoly a, CycPoly b);
CycNum poly_eval(const CycPoly& p, const CycNum& t);
std::string poly_to_string(const CycPoly& p);

// Local Euler factor at a place of residue cardinality q, stored as the
// multiset of inverse roots of prod_i (1 - alpha_i T), T = q^{-s}.
// The empty multiset is the constant factor 1.
class LocalFactor {
public:
    LocalFactor() = default;
    explicit LocalFactor(u64 q) : q_(q) {}
    LocalFactor(u64 q, std::vector<InverseRoot> roots);

    u64 q() const { return q_; }
    size_t degree() const { return roots_.size(); }
    const std::vector<InverseRoot>& roots() const { return roots_; }

    // Multiset union (direct sums multiply local factors).
    LocalFactor merged(const LocalFactor& o) const;
    // Multiply every inverse root by the given root of unity.
    LocalFactor twisted(const RootOfUnity& z) const;
    LocalFactor contragredient() const;
    // Roots alpha^p over base q^p (inert-place base change).
    LocalFactor extension_power(unsigned p) const;
    // Coefficients of prod (1 - alpha_i T), constant term 1.
    CycPoly expand() const;

    bool operator==(const LocalFactor& o) const = default;

    std::string to_string() const; // "{root(...), ...}" or "{}"
    static LocalFactor parse(std::string_view text, u64 q);

private:
    u64 q_ = 1;
    std::vector<InverseRoot> roots_; // kept sorted
};

// eps(s) = W * Delta^{1/2 - s} with W nonzero and Delta a positive rational.
struct EpsilonDatum {
    CycNum w = CycNum::one();
    Rat delta = Rat(1);

    static EpsilonDatum make(CycNum w, Rat delta);
    EpsilonDatum contragredient() const { return {w.inverse(), delta}; }
    bool operator==(const EpsilonDatum& o) const = default;
};

} // namespace semilift
