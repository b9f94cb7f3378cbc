#include <doctest.h>

#include <numeric>
#include <vector>

#include "semilift/cyclotomic.hpp"
#include "semilift/numtheory.hpp"

using namespace semilift;

namespace {

std::vector<CycNum> sample_elements() {
    std::vector<CycNum> v;
    v.push_back(CycNum::from_rational(rat(3, 2)));
    v.push_back(CycNum::from_rational(rat(-7)));
    v.push_back(CycNum::root_of_unity(3, 1));
    v.push_back(CycNum::root_of_unity(4, 1));
    v.push_back(CycNum::root_of_unity(12, 5));
    v.push_back(CycNum::root_of_unity(8, 3) + CycNum::from_rational(rat(1, 3)));
    v.push_back(sqrt_prime_power(5) - CycNum::root_of_unity(5, 2));
    v.push_back(CycNum::from_exponents(9, {rat(1), rat(0), rat(2), rat(-1)}));
    return v;
}

} // namespace

TEST_CASE("root of unity identities") {
    CycNum i = CycNum::root_of_unity(4, 1);
    CHECK(i * i == CycNum::from_rational(rat(-1)));
    CycNum z3 = CycNum::root_of_unity(3, 1);
    CHECK(CycNum::one() + z3 + z3 * z3 == CycNum::zero());
    CHECK(z3.pow(3) == CycNum::one());
}

TEST_CASE("canonical form minimizes the conductor") {
    CHECK(CycNum::root_of_unity(4, 1).pow(2).conductor() == 1);
    CHECK(CycNum::root_of_unity(6, 1).conductor() == 3);   // zeta_6 = -zeta_3^2
    CHECK(CycNum::root_of_unity(12, 2).conductor() == 3);  // zeta_12^2 = zeta_6
    CHECK(CycNum::root_of_unity(12, 3) == CycNum::root_of_unity(4, 1));
    // Embedding Q(zeta_3) into Q(zeta_12) is respected by equality.
    CHECK(CycNum::from_exponents(12, {rat(0), rat(0), rat(0), rat(0), rat(1)}) ==
          CycNum::root_of_unity(3, 1));
    // A sum that collapses to a rational: zeta_5 + zeta_5^2 + zeta_5^3 + zeta_5^4.
    CycNum s = CycNum::zero();
    for (int k = 1; k < 5; ++k) s = s + CycNum::root_of_unity(5, k);
    CHECK(s == CycNum::from_rational(rat(-1)));
    CHECK(s.conductor() == 1);
}

TEST_CASE("square roots of prime powers via Gauss sums") {
    // Oracle: squaring must land exactly on the rational q.
    for (u64 q : {2ull, 3ull, 4ull, 5ull, 7ull, 8ull, 9ull, 11ull, 13ull, 25ull, 27ull}) {
        CycNum r = sqrt_prime_power(q);
        CHECK(r * r == CycNum::from_rational(Rat(static_cast<unsigned long>(q))));
    }
    CycNum z8 = CycNum::root_of_unity(8, 1);
    CHECK((z8 + z8.inverse()) * (z8 + z8.inverse()) == CycNum::from_rational(rat(2)));
}

TEST_CASE("field axioms on sample elements") {
    auto xs = sample_elements();
    for (const auto& a : xs)
        for (const auto& b : xs) {
            CHECK(a + b == b + a);
            CHECK(a * b == b * a);
            for (const auto& c : xs) {
                CHECK((a + b) + c == a + (b + c));
                CHECK((a * b) * c == a * (b * c));
                CHECK(a * (b + c) == a * b + a * c);
            }
        }
    for (const auto& a : xs) {
        if (a.is_zero()) continue;
        CHECK(a * a.inverse() == CycNum::one());
    }
}

TEST_CASE("galois conjugation is multiplicative and fixes rationals") {
    auto xs = sample_elements();
    for (long long a : {5LL, 7LL, 11LL, -1LL}) {
        for (const auto& x : xs)
            for (const auto& y : xs) {
                if (std::gcd<long long>(a, x.conductor()) != 1) continue;
                if (std::gcd<long long>(a, y.conductor()) != 1) continue;
                CycNum xy = x * y;
                if (std::gcd<long long>(a, xy.conductor()) != 1) continue;
                CHECK(xy.galois(a) == x.galois(a) * y.galois(a));
            }
    }
    CHECK(CycNum::from_rational(rat(9, 4)).galois(-1) == CycNum::from_rational(rat(9, 4)));
    CHECK(CycNum::root_of_unity(5, 1).conj() == CycNum::root_of_unity(5, 4));
}

TEST_CASE("root of unity detection") {
    auto r = (CycNum::root_of_unity(3, 1) * CycNum::root_of_unity(4, 1)).as_root_of_unity();
    REQUIRE(r.has_value());
    CHECK(r->first == 12);
    CHECK(r->second == 7);
    CHECK(CycNum::one().as_root_of_unity() == std::make_pair<u64, u64>(1, 0));
    CHECK(CycNum::from_rational(rat(-1)).as_root_of_unity() == std::make_pair<u64, u64>(2, 1));
    CHECK_FALSE(sqrt_prime_power(2).as_root_of_unity().has_value());
    CHECK_FALSE(CycNum::zero().as_root_of_unity().has_value());
    CHECK_FALSE((CycNum::root_of_unity(5, 1) + CycNum::one()).as_root_of_unity().has_value());
    // 1 + zeta_3 happens to be zeta_6 and must be detected as such.
    auto s = (CycNum::root_of_unity(3, 1) + CycNum::one()).as_root_of_unity();
    REQUIRE(s.has_value());
    CHECK(s->first == 6);
    CHECK(s->second == 1);
}

TEST_CASE("encoding round trip") {
    for (const auto& x : sample_elements()) {
        CHECK(CycNum::parse(x.to_string()) == x);
    }
    CHECK(CycNum::parse("cyc(3; 1,1,1)") == CycNum::zero());
    CHECK(CycNum::parse("cyc(4; 0,1)") == CycNum::root_of_unity(4, 1));
    CHECK(CycNum::parse("-5/3") == CycNum::from_rational(rat(-5, 3)));
    CHECK_THROWS_AS(CycNum::parse("cyc(0; 1)"), Error);
    CHECK_THROWS_AS(CycNum::parse("cyc(4; 1,2,3,4,5)"), Error);
}

TEST_CASE("division errors") {
    CHECK_THROWS_AS(CycNum::one() / CycNum::zero(), Error);
    CHECK_THROWS_AS(CycNum::root_of_unity(7, 2).galois(7), Error);
}
