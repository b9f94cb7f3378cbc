#include "doctest.h"

#include <algorithm>
#include <vector>

#include "semilift/error.hpp"
#include "semilift/ldata.hpp"
#include "semilift/numtheory.hpp"

using namespace semilift;

namespace {

// ---- independent oracles (used by the derived-value checks below) --------

// Reversed characteristic polynomial of a 2x2 matrix by the direct trace /
// determinant formula (no recurrence).
CycPoly oracle_char_reverse_2x2(const CycMatrix& m) {
    REQUIRE(m.dim() == 2);
    CycNum tr = m.at(0, 0) + m.at(1, 1);
    CycNum det = m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(1, 0);
    return CycPoly{CycNum::one(), -tr, det};
}

// Naive Dirichlet convolution c[n] = sum_{d | n} a[d] b[n/d].
std::vector<CycNum> oracle_convolution(const std::vector<CycNum>& a, const std::vector<CycNum>& b) {
    REQUIRE(a.size() == b.size());
    std::vector<CycNum> c(a.size(), CycNum::zero());
    for (size_t d = 1; d < a.size(); ++d)
        for (size_t m = d; m < a.size(); m += d) c[m] = c[m] + a[d] * b[m / d];
    return c;
}

// ---- fixture builders -----------------------------------------------------

RootOfUnity ru(long long num, u64 den) { return RootOfUnity::make(num, den); }
InverseRoot ir0(RootOfUnity u, u64 q) { return InverseRoot::make(u, Rat(0), q); }
LocalFactor lf(u64 q, std::vector<RootOfUnity> units) {
    std::vector<InverseRoot> roots;
    for (const RootOfUnity& u : units) roots.push_back(ir0(u, q));
    return LocalFactor(q, std::move(roots));
}

ArchFactor arch0() { return ArchFactor::make({Rat(0)}); }

// Trivial one-dimensional datum covering every prime: the Dirichlet series
// of the expansion has every coefficient 1.
GaloisDatum zeta_datum() {
    auto g = FiniteGroup::from_table("C1", {{0}});
    auto gp = std::make_shared<const FiniteGroup>(std::move(g));
    Representation rho = to_representation(all_linear_characters(gp)[0], "one");
    FrobeniusRule rule;
    rule.modulus = 1;
    rule.table[0] = {FrobeniusRule::Entry{0, 1, 1}};
    return GaloisDatum::make("Q", 1, std::move(rho), {}, std::move(rule), arch0());
}

struct C2Fixture {
    GroupPtr group;
    Representation triv;
    Representation sign;
};

C2Fixture c2_fixture() {
    auto g = std::make_shared<const FiniteGroup>(FiniteGroup::cyclic(2));
    auto chars = all_linear_characters(g);
    REQUIRE(chars.size() == 2);
    REQUIRE(chars[0].is_trivial());
    return C2Fixture{g, to_representation(chars[0], "one"), to_representation(chars[1], "sgn")};
}

// Quadratic datum with splitting law mod 3 and a fully ramified place at 3.
GaloisDatum quad3_datum(Representation rho, const GroupPtr& g) {
    FrobeniusRule rule;
    rule.modulus = 3;
    rule.table[1] = {FrobeniusRule::Entry{g->identity(), 1, 1}};
    rule.table[2] = {FrobeniusRule::Entry{1, 1, 1}};
    std::vector<GaloisPlace> places{GaloisPlace{"3", 3, g->identity(), {0, 1}, MonodromyType::none()}};
    return GaloisDatum::make("Q", 1, std::move(rho), std::move(places), std::move(rule), arch0());
}

struct S3Fixture {
    GroupPtr group;
    unsigned rot = 0;  // an element of order 3
    unsigned flip = 0; // an element of order 2
    Representation std2;
};

S3Fixture s3_fixture() {
    auto g = std::make_shared<const FiniteGroup>(
        FiniteGroup::from_permutations("S3", 3, {{1, 0, 2}, {1, 2, 0}}));
    S3Fixture f{g, 0, 0, standard_representation(g)};
    for (unsigned x = 0; x < g->size(); ++x) {
        if (g->element_order(x) == 3 && f.rot == 0) f.rot = x;
        if (g->element_order(x) == 2 && f.flip == 0) f.flip = x;
    }
    REQUIRE(f.rot != 0);
    REQUIRE(f.flip != 0);
    REQUIRE(f.std2.dim() == 2);
    return f;
}

GaloisDatum s3_datum() {
    S3Fixture f = s3_fixture();
    const FiniteGroup& g = *f.group;
    std::vector<unsigned> flip_sub = g.closure({f.flip});
    std::vector<unsigned> rot_sub = g.closure({f.rot});
    std::vector<GaloisPlace> places{
        GaloisPlace{"v2", 2, f.rot, {}, MonodromyType::none()},
        GaloisPlace{"v5", 5, f.flip, {}, MonodromyType::none()},
        GaloisPlace{"v7", 7, g.identity(), flip_sub, MonodromyType::none()},
        GaloisPlace{"v11", 11, g.identity(), rot_sub, MonodromyType::none()},
        GaloisPlace{"st", 13, f.rot, {}, MonodromyType::make({2})},
    };
    return GaloisDatum::make("Q", 1, f.std2, std::move(places), std::nullopt, arch0());
}

// Order-3 datum with splitting law mod 7 and a fully ramified place at 7.
struct C3Fixture {
    GroupPtr group;
    OneDimChar psi; // psi(1) = zeta_3
    GaloisDatum datum;
};

C3Fixture c3_fixture() {
    auto g = std::make_shared<const FiniteGroup>(FiniteGroup::cyclic(3));
    auto chars = all_linear_characters(g);
    const OneDimChar* pick = nullptr;
    for (const OneDimChar& c : chars)
        if (c.value(1) == ru(1, 3)) pick = &c;
    REQUIRE(pick != nullptr);
    Representation rho = to_representation(*pick, "cubic");
    FrobeniusRule rule;
    rule.modulus = 7;
    // Index of r with respect to the generator 3 of the units mod 7, taken
    // mod 3: residues 1..6 map to 0, 2, 1, 1, 2, 0.
    unsigned idx[7] = {0, 0, 2, 1, 1, 2, 0};
    for (u64 r = 1; r <= 6; ++r) rule.table[r] = {FrobeniusRule::Entry{idx[r], 1, 1}};
    std::vector<GaloisPlace> places{GaloisPlace{"7", 7, 0, {0, 1, 2}, MonodromyType::none()}};
    GaloisDatum d = GaloisDatum::make("Q", 1, rho, std::move(places), std::move(rule), arch0());
    return C3Fixture{g, *pick, std::move(d)};
}

DirichletCharacter chi_quad(u64 modulus) {
    std::vector<RootOfUnity> values;
    for (const UnitGenerator& gen : unit_group_generators(modulus)) {
        (void)gen;
        values.push_back(ru(1, 2));
    }
    return DirichletCharacter::from_values(modulus, std::move(values));
}

DirichletCharacter chi7_cubic() { return DirichletCharacter::from_values(7, {ru(1, 3)}); }

FormalAutDatum formal_fixture() {
    std::vector<FormalPlace> places{
        FormalPlace{"a2", lf(2, {ru(1, 8)}), true},
        FormalPlace{"a3", lf(3, {ru(1, 2)}), true},
        FormalPlace{"a5", lf(5, {ru(0, 1), ru(1, 2)}), true},
        FormalPlace{"a19", lf(19, {ru(1, 8)}), true},
    };
    EpsilonDatum eps{CycNum::root_of_unity(8, 1), Rat(3)};
    return FormalAutDatum::make("Q", 1, std::move(places), std::nullopt, eps,
                                ArchFactor::make({Rat(0), Rat(1)}));
}

std::string error_code(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

} // namespace

TEST_CASE("archimedean factors sort, merge and round-trip through text") {
    ArchFactor a = ArchFactor::make({Rat(1), Rat(0), rat(1, 2)});
    CHECK(a.shifts == std::vector<Rat>{Rat(0), rat(1, 2), Rat(1)});
    CHECK(a.merged(a).shifts.size() == 6);
    CHECK(a.repeated(2) == a.merged(a));
    CHECK(ArchFactor::parse(a.to_string()) == a);
    CHECK(ArchFactor::parse("arch()") == ArchFactor::make({}));
    CHECK(error_code([] { ArchFactor::make({rat(1, 3)}); }) == "DOMAIN");
    CHECK(error_code([] { ArchFactor::parse("gamma(1)"); }) == "PARSE_ERROR");
}

TEST_CASE("monodromy partitions validate and count removed roots") {
    MonodromyType m = MonodromyType::make({2, 1});
    CHECK(m.rank() == 1);
    CHECK(m.boxes() == 3);
    CHECK(m.to_string() == "[2,1]");
    CHECK(MonodromyType::make({3}).rank() == 2);
    CHECK(MonodromyType::none().rank() == 0);
    CHECK(error_code([] { MonodromyType::make({1, 2}); }) == "DOMAIN");
    CHECK(error_code([] { MonodromyType::make({0}); }) == "DOMAIN");
}

TEST_CASE("one-dimensional local factors: trivial, sign, and dead inertia") {
    GaloisDatum zeta = zeta_datum();
    LocalFactor z2 = artin_local_factor(zeta, "2");
    CHECK(z2.degree() == 1);
    CHECK(z2.roots()[0] == ir0(ru(0, 1), 2));
    CHECK(poly_equal(z2.expand(), CycPoly{CycNum::one(), -CycNum::one()}));

    C2Fixture c2 = c2_fixture();
    GaloisDatum quad = quad3_datum(c2.sign, c2.group);
    LocalFactor q2 = artin_local_factor(quad, "2");
    CHECK(q2.roots()[0] == ir0(ru(1, 2), 2));
    CHECK(poly_equal(q2.expand(), CycPoly{CycNum::one(), CycNum::one()}));
    CHECK(artin_local_factor(quad, "7") == lf(7, {ru(0, 1)}));

    LocalFactor q3 = artin_local_factor(quad, "3");
    CHECK(q3.degree() == 0);
    CHECK(poly_equal(q3.expand(), CycPoly{CycNum::one()}));
}

TEST_CASE("two-dimensional factor matches the characteristic polynomial oracle") {
    S3Fixture f = s3_fixture();
    GaloisDatum d = s3_datum();
    LocalFactor v2 = artin_local_factor(d, "v2");
    CHECK(v2 == lf(2, {ru(1, 3), ru(2, 3)}));
    CHECK(poly_equal(v2.expand(), oracle_char_reverse_2x2(f.std2.image(f.rot))));
    CHECK(poly_equal(v2.expand(), CycPoly{CycNum::one(), CycNum::one(), CycNum::one()}));

    LocalFactor v5 = artin_local_factor(d, "v5");
    CHECK(poly_equal(v5.expand(), oracle_char_reverse_2x2(f.std2.image(f.flip))));
    CHECK(v5 == lf(5, {ru(0, 1), ru(1, 2)}));

    // Invariants under a reflection: one dimension survives; under the full
    // rotation subgroup: nothing survives.
    CHECK(artin_local_factor(d, "v7") == lf(7, {ru(0, 1)}));
    CHECK(artin_local_factor(d, "v11").degree() == 0);
}

TEST_CASE("monodromy removes the top of the root multiset") {
    GaloisDatum d = s3_datum();
    LocalFactor st = artin_local_factor(d, "st");
    CHECK(st == lf(13, {ru(1, 3)}));

    S3Fixture f = s3_fixture();
    Representation sgn = to_representation(all_linear_characters(f.group)[1], "sgn");
    std::vector<GaloisPlace> places{GaloisPlace{"w", 2, f.rot, {}, MonodromyType::make({3})}};
    GaloisDatum d2 = GaloisDatum::make("Q", 1, f.std2.direct_sum(sgn), std::move(places),
                                       std::nullopt, arch0());
    // Eigenvalues {1, z3, z3^2}; a rank-two partition strips the top two.
    CHECK(artin_local_factor(d2, "w") == lf(2, {ru(0, 1)}));

    std::vector<GaloisPlace> bad{GaloisPlace{"w", 2, f.group->identity(),
                                             f.group->closure({f.rot}), MonodromyType::make({2})}};
    GaloisDatum d3 = GaloisDatum::make("Q", 1, f.std2, std::move(bad), std::nullopt, arch0());
    CHECK(error_code([&] { artin_local_factor(d3, "w"); }) == "DOMAIN");
}

TEST_CASE("semistability is trivial inertia image, monodromy aside") {
    GaloisDatum d = s3_datum();
    LData ld = d;
    CHECK(semistable_at(ld, "v5"));
    CHECK(semistable_at(ld, "st")); // monodromy-bearing yet semistable
    CHECK_FALSE(semistable_at(ld, "v7"));
    CHECK_FALSE(semistable_at(ld, "v11"));
    CHECK(error_code([&] { semistable_at(ld, "17"); }) == "DOMAIN");

    C2Fixture c2 = c2_fixture();
    LData quad = quad3_datum(c2.sign, c2.group);
    CHECK_FALSE(semistable_at(quad, "3"));
    CHECK(semistable_at(quad, "13"));
    // A trivial representation does not see its inertia subgroup.
    LData tq = quad3_datum(c2.triv, c2.group);
    CHECK(semistable_at(tq, "3"));
}

TEST_CASE("datum validation rejects malformed tables") {
    S3Fixture f = s3_fixture();
    auto mk = [&](std::vector<GaloisPlace> places) {
        GaloisDatum::make("Q", 1, f.std2, std::move(places), std::nullopt, arch0());
    };
    CHECK(error_code([&] {
              mk({GaloisPlace{"a", 2, 0, {}, {}}, GaloisPlace{"a", 3, 0, {}, {}}});
          }) == "DOMAIN");
    CHECK(error_code([&] { mk({GaloisPlace{"a", 6, 0, {}, {}}}); }) == "DOMAIN");
    CHECK(error_code([&] { mk({GaloisPlace{"a", 2, 99, {}, {}}}); }) == "DOMAIN");
    CHECK(error_code([&] { mk({GaloisPlace{"a", 2, 0, {f.flip}, {}}}); }) == "DOMAIN");
    // A reflection subgroup is not normalized by a rotation.
    CHECK(error_code([&] {
              mk({GaloisPlace{"a", 2, f.rot, f.group->closure({f.flip}), {}}});
          }) == "DOMAIN");
    CHECK(error_code([&] { mk({GaloisPlace{"a", 2, 0, {}, MonodromyType::make({2, 1})}}); }) ==
          "DOMAIN");

    C2Fixture c2 = c2_fixture();
    FrobeniusRule rule;
    rule.modulus = 3;
    rule.table[1] = {FrobeniusRule::Entry{0, 1, 1}};
    CHECK(error_code([&] {
              GaloisDatum::make("Q", 1, c2.sign, {}, rule, arch0());
          }) == "DOMAIN"); // missing residue 2
    rule.table[2] = {FrobeniusRule::Entry{1, 1, 1}};
    CHECK(error_code([&] {
              GaloisDatum::make("Q", 1, c2.sign, {}, rule, arch0());
          }) == "DOMAIN"); // ramified prime 3 lacks an explicit place
    rule.table[2] = {FrobeniusRule::Entry{1, 2, 1}};
    CHECK(error_code([&] {
              GaloisDatum::make("Q", 1, c2.sign,
                                {GaloisPlace{"3", 3, 0, {0, 1}, {}}}, rule, arch0());
          }) == "DOMAIN"); // degree sum exceeds the field degree
}

TEST_CASE("place resolution covers rule-backed primes deterministically") {
    C2Fixture c2 = c2_fixture();
    GaloisDatum quad = quad3_datum(c2.sign, c2.group);
    std::vector<GaloisPlace> up = quad.places_up_to(13);
    std::vector<std::string> labels;
    for (const GaloisPlace& v : up) labels.push_back(v.label);
    CHECK(labels == std::vector<std::string>{"2", "3", "5", "7", "11", "13"});
    CHECK(quad.resolve_place("5").frobenius == 1);
    CHECK(quad.resolve_place("7").frobenius == 0);
    CHECK(error_code([&] { quad.resolve_place("4"); }) == "DOMAIN");
    CHECK(error_code([&] { quad.resolve_place("2.1"); }) == "DOMAIN");
    CHECK(error_code([&] { quad.resolve_place("nowhere"); }) == "DOMAIN");
}

TEST_CASE("twisting by the trivial character is the identity") {
    LData s3 = s3_datum();
    LData t = twist_ldata(s3, DirichletCharacter::trivial());
    CHECK(std::holds_alternative<GaloisDatum>(t));
    for (const char* place : {"v2", "v5", "v7", "v11", "st"})
        CHECK(local_factor_at(t, place) == local_factor_at(s3, place));

    FormalAutDatum f = formal_fixture();
    CHECK(twist_formal(f, DirichletCharacter::trivial()) == f);
}

TEST_CASE("twisting multiplies roots by the character value and kills ramified places") {
    FormalAutDatum f = formal_fixture();
    DirichletCharacter chi5 = chi_quad(5);
    FormalAutDatum t = twist_formal(f, chi5);
    CHECK(t.resolve_place("a2").factor == lf(2, {ru(5, 8)}));       // zeta_8 * (-1)
    CHECK(t.resolve_place("a3").factor == lf(3, {ru(0, 1)}));       // -1 * (-1)
    CHECK(t.resolve_place("a19").factor == lf(19, {ru(1, 8)}));     // chi(19) = 1
    CHECK(t.resolve_place("a5").factor == LocalFactor(5));          // ramified: empty
    CHECK_FALSE(t.resolve_place("a5").semistable);
    CHECK(t.epsilon() == f.epsilon());
    CHECK(t.arch() == f.arch());
}

TEST_CASE("twisting a group-backed datum matches the representation-level twist") {
    C3Fixture c3 = c3_fixture();
    DirichletCharacter chi = chi7_cubic();
    LData t = twist_ldata(LData(c3.datum), chi);
    CHECK(std::holds_alternative<FormalAutDatum>(t));
    GaloisDatum intrinsic = c3.datum.with_rho(c3.datum.rho().twisted(c3.psi));
    for (u64 p : {2, 3, 5, 11, 13, 17}) {
        std::string label = std::to_string(p);
        CHECK(local_factor_at(t, label) == artin_local_factor(intrinsic, label));
    }
    // At the place where the twisting character ramifies, the factor table
    // stores 1 while the intrinsic computation sees the enlarged kernel; the
    // agreement contract is scoped to unramified places.
    CHECK(local_factor_at(t, "7") == LocalFactor(7));
}

TEST_CASE("contragredient inverts every root and is an involution") {
    C3Fixture c3 = c3_fixture();
    LData d = c3.datum;
    CHECK(artin_local_factor(c3.datum, "3") == lf(3, {ru(1, 3)}));
    LData dual = contragredient(d);
    CHECK(local_factor_at(dual, "3") == lf(3, {ru(2, 3)}));
    LData twice = contragredient(dual);
    for (u64 p : {2, 3, 5, 11, 13})
        CHECK(local_factor_at(twice, std::to_string(p)) ==
              local_factor_at(d, std::to_string(p)));

    FormalAutDatum f = formal_fixture();
    LData fd = f;
    LData fdual = contragredient(fd);
    CHECK(local_factor_at(fdual, "a2") == lf(2, {ru(7, 8)}));
    CHECK(std::get<FormalAutDatum>(fdual).epsilon().w == CycNum::root_of_unity(8, -1));
    CHECK(std::get<FormalAutDatum>(contragredient(fdual)) == f);
}

TEST_CASE("a real-valued character makes the datum self-dual") {
    S3Fixture f = s3_fixture();
    for (const CycNum& c : f.std2.character()) CHECK(c.conj() == c);
    LData d = s3_datum();
    LData dual = contragredient(d);
    for (const char* place : {"v2", "v5", "v7", "v11", "st"})
        CHECK(local_factor_at(dual, place) == local_factor_at(d, place));
}

TEST_CASE("contragredient commutes with twisting") {
    FormalAutDatum f = formal_fixture();
    DirichletCharacter chi = chi7_cubic();
    FormalAutDatum lhs = std::get<FormalAutDatum>(contragredient(LData(twist_formal(f, chi))));
    FormalAutDatum rhs =
        twist_formal(std::get<FormalAutDatum>(contragredient(LData(f))), chi.pow(-1));
    CHECK(lhs == rhs);
}

TEST_CASE("derived places follow the splitting trichotomy") {
    CyclicExtensionDatum e5 = CyclicExtensionDatum::make("Q", "K5", chi_quad(5));
    CHECK(e5.degree() == 2);

    auto split = places_above(e5, "v", 11); // chi(11) = 1
    REQUIRE(split.size() == 2);
    CHECK(split[0] == DerivedPlace{"v.1", 11, 1, false});
    CHECK(split[1] == DerivedPlace{"v.2", 11, 1, false});

    auto inert = places_above(e5, "v", 2); // chi(2) = -1
    REQUIRE(inert.size() == 1);
    CHECK(inert[0] == DerivedPlace{"v", 4, 2, false});

    CHECK(e5.cutter().conductor() % 5 == 0); // independent ramification witness
    auto ram = places_above(e5, "v", 5);
    REQUIRE(ram.size() == 1);
    CHECK(ram[0] == DerivedPlace{"v", 5, 1, true});

    // A degree-two place with trivial character value splits completely.
    auto high = places_above(e5, "w", 4);
    CHECK(high.size() == 2);
    CHECK(high[0].q == 4);

    CyclicExtensionDatum e7 = CyclicExtensionDatum::make("Q", "K7", chi7_cubic());
    CHECK(places_above(e7, "v", 13).size() == 3); // 13 = 3^3 mod 7: split
    auto i7 = places_above(e7, "v", 2);
    REQUIRE(i7.size() == 1);
    CHECK(i7[0].q == 8);

    CHECK(error_code([] {
              CyclicExtensionDatum::make("Q", "K", DirichletCharacter::trivial());
          }) == "DOMAIN");
}

TEST_CASE("formal base change copies, regroups and carries factors") {
    FormalAutDatum f = formal_fixture();
    CyclicExtensionDatum e5 = CyclicExtensionDatum::make("Q", "K5", chi_quad(5));
    FormalAutDatum bc = std::get<FormalAutDatum>(base_change(LData(f), e5));

    CHECK(bc.field_label() == "K5");
    CHECK(bc.field_degree() == 2);

    // chi(19) = 1: verbatim copies.
    CHECK(bc.resolve_place("a19.1").factor == lf(19, {ru(1, 8)}));
    CHECK(bc.resolve_place("a19.2").factor == lf(19, {ru(1, 8)}));

    // chi(2) = -1: (1 - aT)(1 + aT) = 1 - a^2 T^2, so in the extension
    // variable U = T^2 the derived factor expands to 1 - a^2 U.
    LocalFactor a2 = bc.resolve_place("a2").factor;
    CHECK(a2 == lf(4, {ru(1, 4)}));
    CycPoly product = poly_mul(lf(2, {ru(1, 8)}).expand(), lf(2, {ru(5, 8)}).expand());
    CycPoly ext = a2.expand();
    REQUIRE(ext.size() == 2);
    CycPoly spread{ext[0], CycNum::zero(), ext[1]};
    CHECK(poly_equal(product, spread));

    // Ramified at 5: untwisted factor carried to the same residue field.
    CHECK(bc.resolve_place("a5").factor == f.resolve_place("a5").factor);

    // Epsilon and archimedean data gain multiplicity p.
    CHECK(bc.epsilon().w == f.epsilon().w.pow(2));
    CHECK(bc.epsilon().delta == Rat(9));
    CHECK(bc.arch() == f.arch().repeated(2));

    // Degree-three regrouping: (1-aT)(1-z3 aT)(1-z3^2 aT) = 1 - a^3 T^3,
    // i.e. 1 - a^3 U in the extension variable U = T^3.
    CyclicExtensionDatum e7 = CyclicExtensionDatum::make("Q", "K7", chi7_cubic());
    FormalAutDatum bc7 = std::get<FormalAutDatum>(base_change(LData(f), e7));
    LocalFactor b2 = bc7.resolve_place("a2").factor;
    CHECK(b2 == lf(8, {ru(3, 8)}));
    CycPoly prod3 = poly_mul(poly_mul(lf(2, {ru(1, 8)}).expand(), lf(2, {ru(19, 24)}).expand()),
                             lf(2, {ru(11, 24)}).expand());
    CycPoly ext3 = b2.expand();
    REQUIRE(ext3.size() == 2);
    CycPoly spread3{ext3[0], CycNum::zero(), CycNum::zero(), ext3[1]};
    CHECK(poly_equal(prod3, spread3));
}

TEST_CASE("group-backed base change pushes the place table forward") {
    GaloisDatum d = s3_datum();
    S3Fixture f = s3_fixture();
    CyclicExtensionDatum e5 = CyclicExtensionDatum::make("Q", "K5", chi_quad(5));
    GaloisDatum r = std::get<GaloisDatum>(base_change(LData(d), e5));

    CHECK(r.field_label() == "K5");
    CHECK(r.field_degree() == 2);
    CHECK(r.arch() == d.arch().repeated(2));

    const FiniteGroup& g = *f.group;
    GaloisPlace v2 = r.resolve_place("v2"); // inert
    CHECK(v2.q == 4);
    CHECK(v2.frobenius == g.mul(f.rot, f.rot));
    CHECK(artin_local_factor(r, v2) == lf(4, {ru(1, 3), ru(2, 3)}));

    GaloisPlace v5 = r.resolve_place("v5"); // ramified in the extension
    CHECK(v5.q == 5);
    CHECK(v5.frobenius == f.flip);
    CHECK(artin_local_factor(r, v5) == lf(5, {ru(0, 1), ru(1, 2)}));

    CHECK(r.resolve_place("v11.1").q == 11); // split
    CHECK(r.resolve_place("v11.2").inertia == g.closure({f.rot}));

    GaloisPlace st = r.resolve_place("st"); // inert with monodromy carried
    CHECK(st.q == 169);
    CHECK(st.monodromy == MonodromyType::make({2}));
    CHECK(artin_local_factor(r, st) == lf(169, {ru(1, 3)}));
}

TEST_CASE("restriction and formal base change agree on semistable data") {
    S3Fixture f = s3_fixture();
    std::vector<GaloisPlace> places{
        GaloisPlace{"v2", 2, f.rot, {}, MonodromyType::none()},
        GaloisPlace{"v5", 5, f.flip, {}, MonodromyType::none()},
    };
    GaloisDatum d = GaloisDatum::make("Q", 1, f.std2, std::move(places), std::nullopt, arch0());
    CyclicExtensionDatum e7 = CyclicExtensionDatum::make("Q", "K7", chi7_cubic());
    FormalAutDatum via_galois = tautological_lift(std::get<GaloisDatum>(base_change(LData(d), e7)));
    FormalAutDatum via_formal =
        std::get<FormalAutDatum>(base_change(LData(tautological_lift(d)), e7));
    CHECK(via_galois == via_formal);
}

TEST_CASE("restriction refuses characters cut by the datum's own field") {
    C2Fixture c2 = c2_fixture();
    GaloisDatum quad = quad3_datum(c2.sign, c2.group);
    CyclicExtensionDatum e3 = CyclicExtensionDatum::make("Q", "K3", chi_quad(3));
    CHECK(pullback_candidates(quad, chi_quad(3)).size() == 1);
    CHECK(error_code([&] { restrict_datum(quad, e3); }) == "DOMAIN");

    // Without a rule the evidence can be too thin to certify disjointness.
    S3Fixture f = s3_fixture();
    GaloisDatum thin = GaloisDatum::make(
        "Q", 1, f.std2, {GaloisPlace{"v5", 5, f.flip, {}, MonodromyType::none()}}, std::nullopt,
        arch0());
    CyclicExtensionDatum e13 = CyclicExtensionDatum::make("Q", "K13", chi_quad(13));
    CHECK(error_code([&] { restrict_datum(thin, e13); }) == "DOMAIN");
    // The order-three place distinguishes the sign character from the cutter.
    GaloisDatum rich = GaloisDatum::make(
        "Q", 1, f.std2,
        {GaloisPlace{"v2", 2, f.rot, {}, MonodromyType::none()},
         GaloisPlace{"v5", 5, f.flip, {}, MonodromyType::none()}},
        std::nullopt, arch0());
    CHECK(pullback_candidates(rich, chi_quad(13)).empty());
    CHECK(restrict_datum(rich, e13).field_label() == "K13");
}

TEST_CASE("a recorded inertia cut drops the ramified place to semistable") {
    C2Fixture c2 = c2_fixture();
    GaloisDatum quad = quad3_datum(c2.sign, c2.group);
    DirichletCharacter chi12 = chi_quad(12);
    CHECK(chi12.order() == 2);
    CyclicExtensionDatum e12 = CyclicExtensionDatum::make("Q", "K12", chi12);
    CHECK(pullback_candidates(quad, chi12).empty());

    CutsTable cuts;
    cuts["3"] = InertiaCut{{{0, 0}, {1, 1}}};
    GaloisDatum r = restrict_datum(quad, e12, cuts);

    GaloisPlace w3 = r.resolve_place("3");
    CHECK(w3.q == 3);
    CHECK(w3.inertia == std::vector<unsigned>{0});
    CHECK(w3.frobenius == 1); // adjusted into the kernel of the local character
    CHECK(semistable_at(LData(r), "3"));
    CHECK(artin_local_factor(r, "3") == lf(3, {ru(1, 2)}));

    // The other ramified prime of the cutting character gains an explicit
    // record synthesized from the rule, with data carried verbatim.
    GaloisPlace w2 = r.resolve_place("2");
    CHECK(w2.q == 2);
    CHECK(w2.frobenius == 1);
    CHECK(semistable_at(LData(r), "2"));

    // Without the cut the inertia is carried whole.
    GaloisDatum r0 = restrict_datum(quad, e12);
    CHECK(r0.resolve_place("3").inertia == std::vector<unsigned>{0, 1});
    CHECK_FALSE(semistable_at(LData(r0), "3"));

    // Malformed cuts are rejected.
    CutsTable bad1;
    bad1["3"] = InertiaCut{{{0, 0}, {1, 0}}}; // not surjective
    CHECK(error_code([&] { restrict_datum(quad, e12, bad1); }) == "DOMAIN");
    CutsTable bad2;
    bad2["3"] = InertiaCut{{{0, 1}, {1, 0}}}; // not a homomorphism
    CHECK(error_code([&] { restrict_datum(quad, e12, bad2); }) == "DOMAIN");
    CutsTable bad3;
    bad3["3"] = InertiaCut{{{1, 1}}}; // missing the identity
    CHECK(error_code([&] { restrict_datum(quad, e12, bad3); }) == "DOMAIN");
}

TEST_CASE("twisting by the cutting character dies under base change") {
    FormalAutDatum f = formal_fixture();
    CyclicExtensionDatum e5 = CyclicExtensionDatum::make("Q", "K5", chi_quad(5));
    LData lhs = base_change(twist_ldata(LData(f), chi_quad(5)), e5);
    LData rhs = base_change(LData(f), e5);
    for (const char* place : {"a2", "a3", "a19.1", "a19.2"})
        CHECK(local_factor_at(lhs, place) == local_factor_at(rhs, place));
    // At the ramified place the factor table cannot restore the twist, so
    // the twisted side carries the empty factor there.
    CHECK(local_factor_at(lhs, "a5") == LocalFactor(5));
    CHECK(local_factor_at(rhs, "a5") == f.resolve_place("a5").factor);

    CyclicExtensionDatum e7 = CyclicExtensionDatum::make("Q", "K7", chi7_cubic());
    for (long long j : {1, 2}) {
        LData l = base_change(twist_ldata(LData(f), chi7_cubic().pow(j)), e7);
        LData r = base_change(LData(f), e7);
        for (const char* place : {"a2", "a3", "a5", "a19"})
            CHECK(local_factor_at(l, place) == local_factor_at(r, place));
    }

    // The same holds along the group-backed route at places unramified on
    // both sides with no monodromy; top-rank removal does not commute with
    // root powering, so monodromy-bearing places are outside the contract.
    GaloisDatum s3 = s3_datum();
    LData gl = base_change(twist_ldata(LData(s3), chi_quad(5)), e5);
    LData gr = base_change(LData(s3), e5);
    for (const char* place : {"v2", "v11.1", "v11.2"})
        CHECK(local_factor_at(gl, place) == local_factor_at(gr, place));
}

TEST_CASE("series of the trivial datum is identically one") {
    LData zeta = zeta_datum();
    std::vector<CycNum> a = partial_l_series(zeta, 10);
    REQUIRE(a.size() == 11);
    for (size_t n = 1; n <= 10; ++n) CHECK(a[n] == CycNum::one());
    CHECK(partial_l_series(zeta, 1).size() == 2);
    CHECK(partial_l_series(zeta, 0).size() == 1);
}

TEST_CASE("series of a quadratic datum gives the character values") {
    C2Fixture c2 = c2_fixture();
    LData quad = quad3_datum(c2.sign, c2.group);
    DirichletCharacter chi3 = chi_quad(3);
    std::vector<CycNum> a = partial_l_series(quad, 25);
    for (u64 n = 1; n <= 25; ++n) {
        auto v = chi3.eval(n);
        CHECK(a[n] == (v ? v->to_cycnum() : CycNum::zero()));
    }
}

TEST_CASE("direct sums expand to the convolution of the series") {
    C2Fixture c2 = c2_fixture();
    GaloisDatum d1 = quad3_datum(c2.triv, c2.group);
    GaloisDatum d2 = quad3_datum(c2.sign, c2.group);
    GaloisDatum dsum = quad3_datum(c2.triv.direct_sum(c2.sign), c2.group);
    const u64 X = 40;
    std::vector<CycNum> a1 = partial_l_series(LData(d1), X);
    std::vector<CycNum> a2 = partial_l_series(LData(d2), X);
    std::vector<CycNum> sum = partial_l_series(LData(dsum), X);
    std::vector<CycNum> conv = oracle_convolution(a1, a2);
    for (u64 n = 1; n <= X; ++n) CHECK(sum[n] == conv[n]);
}

TEST_CASE("local factors are additive across direct sums") {
    C2Fixture c2 = c2_fixture();
    GaloisDatum d1 = quad3_datum(c2.triv, c2.group);
    GaloisDatum d2 = quad3_datum(c2.sign, c2.group);
    GaloisDatum dsum = quad3_datum(c2.triv.direct_sum(c2.sign), c2.group);
    for (const GaloisPlace& v : dsum.places_up_to(13))
        CHECK(artin_local_factor(dsum, v) ==
              artin_local_factor(d1, v.label).merged(artin_local_factor(d2, v.label)));

    S3Fixture f = s3_fixture();
    Representation sgn = to_representation(all_linear_characters(f.group)[1], "sgn");
    GaloisDatum a = s3_datum();
    std::vector<GaloisPlace> places(a.places().begin(), a.places().end() - 1); // monodromy-free
    GaloisDatum b = GaloisDatum::make("Q", 1, sgn, places, std::nullopt, arch0());
    GaloisDatum ab =
        GaloisDatum::make("Q", 1, f.std2.direct_sum(sgn), places, std::nullopt, arch0());
    for (const GaloisPlace& v : places)
        CHECK(artin_local_factor(ab, v) ==
              artin_local_factor(a, v.label).merged(artin_local_factor(b, v.label)));
}

TEST_CASE("series kernels agree across execution policies") {
    C2Fixture c2 = c2_fixture();
    LData dsum = quad3_datum(c2.triv.direct_sum(c2.sign), c2.group);
    CHECK(partial_l_series(dsum, 60, ExecPolicy::Serial) ==
          partial_l_series(dsum, 60, ExecPolicy::Parallel));
    C3Fixture c3 = c3_fixture();
    CHECK(partial_l_series(LData(c3.datum), 50, ExecPolicy::Serial) ==
          partial_l_series(LData(c3.datum), 50, ExecPolicy::Parallel));
}

TEST_CASE("the tautological lift preserves factors, flags and series") {
    S3Fixture f = s3_fixture();
    std::vector<GaloisPlace> places{
        GaloisPlace{"v2", 2, f.rot, {}, MonodromyType::none()},
        GaloisPlace{"v5", 5, f.flip, {}, MonodromyType::none()},
    };
    GaloisDatum d = GaloisDatum::make("Q", 1, f.std2, std::move(places), std::nullopt, arch0());
    FormalAutDatum lift = tautological_lift(d);
    CHECK(lift.resolve_place("v2").factor == artin_local_factor(d, "v2"));
    CHECK(lift.resolve_place("v2").semistable);
    CHECK(lift.epsilon() == EpsilonDatum{});

    GaloisDatum zeta = zeta_datum();
    FormalAutDatum zlift = tautological_lift(zeta);
    CHECK(partial_l_series(LData(zlift), 12) == partial_l_series(LData(zeta), 12));

    C2Fixture c2 = c2_fixture();
    GaloisDatum quad = quad3_datum(c2.sign, c2.group);
    CHECK(error_code([&] { tautological_lift(quad); }) == "DOMAIN");
}
