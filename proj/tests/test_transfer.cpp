#include <cmath>
#include <complex>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "semilift/transfer.hpp"

using namespace semilift;

namespace {

RootOfUnity ru(long long n, u64 d) { return RootOfUnity::make(n, d); }

InverseRoot wroot(RootOfUnity unit, int twice_weight, u64 q) {
    return InverseRoot::make(unit, rat(twice_weight, 2), q);
}

LocalFactor lf(u64 q, std::vector<InverseRoot> roots) { return LocalFactor(q, std::move(roots)); }

std::string error_code(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

// ---------------------------------------------------------------------------
// Numeric oracle for the forcing predicate, deliberately independent of the
// exact cyclotomic route: the ratio of the two expanded factors (functions
// of s through T = q^{-s}) is entire and non-vanishing exactly when their
// zero multisets in the T-plane coincide; compute the zeros 1/alpha over
// complex doubles and match them within a separation margin.
// ---------------------------------------------------------------------------
std::vector<std::complex<double>> zero_multiset(const LocalFactor& f) {
    std::vector<std::complex<double>> zs;
    for (const InverseRoot& r : f.roots()) {
        double mag = std::pow(static_cast<double>(r.base),
                              static_cast<double>(r.twice_weight) / 4.0);
        double ang = 2.0 * M_PI * static_cast<double>(r.unit.exp) /
                     static_cast<double>(r.unit.order);
        zs.push_back(1.0 / std::polar(mag, ang));
    }
    std::sort(zs.begin(), zs.end(), [](std::complex<double> a, std::complex<double> b) {
        if (std::abs(a.real() - b.real()) > 1e-6) return a.real() < b.real();
        return a.imag() < b.imag() - 1e-6;
    });
    return zs;
}

bool oracle_ratio_entire_nonvanishing(const LocalFactor& a, const LocalFactor& b) {
    auto za = zero_multiset(a);
    auto zb = zero_multiset(b);
    if (za.size() != zb.size()) return false;
    for (size_t i = 0; i < za.size(); ++i)
        if (std::abs(za[i] - zb[i]) > 1e-9) return false;
    return true;
}

// Numeric weight of an inverse root from its complex magnitude, for
// cross-checking the exact growth-bound arithmetic.
double numeric_weight(const InverseRoot& r) {
    double mag = std::pow(static_cast<double>(r.base),
                          static_cast<double>(r.twice_weight) / 4.0);
    return 2.0 * std::log(mag) / std::log(static_cast<double>(r.base));
}

ArchFactor arch01() { return ArchFactor::make({rat(0, 1), rat(1, 2)}); }

EpsilonDatum eps8(long long dnum = 35) {
    return EpsilonDatum::make(CycNum::root_of_unity(8, 1), rat(dnum, 1));
}

// A complete, consistent table over a post-tower field: unitary factors at
// four finite places, one of them marked non-semistable.
FormalAutDatum side_table() {
    std::vector<FormalPlace> places{
        FormalPlace{"2", lf(2, {wroot(ru(1, 8), 0, 2)}), true},
        FormalPlace{"3", lf(3, {wroot(ru(1, 2), 0, 3)}), true},
        FormalPlace{"5", lf(5, {wroot(ru(1, 4), 0, 5), wroot(ru(3, 4), 0, 5)}), true},
        FormalPlace{"7", lf(7, {}), false},
    };
    return FormalAutDatum::make("L", 2, std::move(places), std::nullopt, eps8(), arch01());
}

FormalAutDatum with_factor(const FormalAutDatum& t, const std::string& label, LocalFactor f,
                           bool semistable) {
    std::vector<FormalPlace> ps = t.places();
    bool hit = false;
    for (FormalPlace& v : ps)
        if (v.label == label) {
            v.factor = std::move(f);
            v.semistable = semistable;
            hit = true;
            break;
        }
    REQUIRE(hit);
    return FormalAutDatum::make(t.field_label(), t.field_degree(), std::move(ps), t.rule(),
                                t.epsilon(), t.arch());
}

FormalAutDatum with_epsilon(const FormalAutDatum& t, EpsilonDatum e) {
    return FormalAutDatum::make(t.field_label(), t.field_degree(), t.places(), t.rule(),
                                std::move(e), t.arch());
}

FormalAutDatum with_arch(const FormalAutDatum& t, ArchFactor a) {
    return FormalAutDatum::make(t.field_label(), t.field_degree(), t.places(), t.rule(),
                                t.epsilon(), std::move(a));
}

DirichletCharacter chi_quad(u64 m) {
    std::vector<UnitGenerator> gens = unit_group_generators(m);
    std::vector<RootOfUnity> values;
    for (const UnitGenerator& g : gens) {
        (void)g;
        values.push_back(ru(1, 2));
    }
    return DirichletCharacter::from_values(m, values);
}

} // namespace

TEST_CASE("the growth bound is an exact weight comparison") {
    CHECK(js_check(lf(5, {wroot(ru(1, 4), 0, 5)})));
    CHECK(js_check(lf(5, {wroot(ru(1, 2), 1, 5)})));
    CHECK(!js_check(lf(5, {wroot(ru(0, 1), 2, 5)})));
    CHECK(!js_check(lf(5, {wroot(ru(1, 4), 0, 5), wroot(ru(0, 1), 3, 5)})));
    CHECK(js_check(lf(5, {})));

    // The edge sits exactly at weight one; the numeric magnitudes agree.
    CHECK(numeric_weight(wroot(ru(0, 1), 2, 5)) == doctest::Approx(1.0));
    CHECK(numeric_weight(wroot(ru(1, 2), 1, 5)) == doctest::Approx(0.5));
}

TEST_CASE("the growth bound ignores unit twists and transports through powers") {
    std::vector<LocalFactor> samples{
        lf(7, {wroot(ru(1, 4), 0, 7)}),
        lf(7, {wroot(ru(1, 2), 1, 7), wroot(ru(0, 1), 0, 7)}),
        lf(7, {wroot(ru(0, 1), 2, 7)}),
        lf(7, {wroot(ru(1, 3), -1, 7)}),
    };
    for (const LocalFactor& f : samples) {
        for (RootOfUnity z : {ru(1, 2), ru(1, 3), ru(1, 8)})
            CHECK(js_check(f) == js_check(f.twisted(z)));
        for (unsigned p : {2u, 3u}) CHECK(js_check(f) == js_check(f.extension_power(p)));
    }
}

TEST_CASE("the forcing predicate matches the numeric zero-set oracle exhaustively") {
    // Every multiset of size <= 3 drawn from six root prototypes (three
    // units, two weights), over a fixed residue field.
    std::vector<InverseRoot> protos;
    for (RootOfUnity u : {ru(0, 1), ru(1, 2), ru(1, 4)})
        for (int tw : {0, 1}) protos.push_back(wroot(u, tw, 5));

    std::vector<LocalFactor> configs;
    configs.push_back(lf(5, {}));
    for (size_t i = 0; i < protos.size(); ++i) {
        configs.push_back(lf(5, {protos[i]}));
        for (size_t j = i; j < protos.size(); ++j) {
            configs.push_back(lf(5, {protos[i], protos[j]}));
            for (size_t k = j; k < protos.size(); ++k)
                configs.push_back(lf(5, {protos[i], protos[j], protos[k]}));
        }
    }
    REQUIRE(configs.size() == 1 + 6 + 21 + 56);

    size_t forced = 0;
    for (const LocalFactor& a : configs)
        for (const LocalFactor& b : configs) {
            bool exact = ratio_forces_equality(a, b);
            CHECK(exact == oracle_ratio_entire_nonvanishing(a, b));
            if (exact) ++forced;
        }
    CHECK(forced == configs.size()); // exactly the diagonal
}

TEST_CASE("bound transport through a cyclic layer holds place by place") {
    std::vector<FormalPlace> places{
        FormalPlace{"3", lf(3, {wroot(ru(1, 2), 0, 3)}), true},
        FormalPlace{"7", lf(7, {wroot(ru(0, 1), 2, 7)}), true}, // fails the bound
        FormalPlace{"11", lf(11, {wroot(ru(1, 4), 1, 11)}), true},
        FormalPlace{"5", lf(5, {wroot(ru(0, 1), 0, 5)}), true}, // layer ramifies here
    };
    FormalAutDatum pi = FormalAutDatum::make("F", 1, std::move(places), std::nullopt,
                                             EpsilonDatum{}, ArchFactor::make({rat(0, 1)}));
    CyclicExtensionDatum e = CyclicExtensionDatum::make("F", "F.a", chi_quad(5));

    CHECK(js_propagate(LData(pi), e));

    // Longhand per-place oracle: the implication "layer factor bounded =>
    // every twisted base factor bounded" computed through the public
    // base-change and twist routes, with numeric weights.
    FormalAutDatum bc = std::get<FormalAutDatum>(base_change(LData(pi), e));
    bool longhand = true;
    for (const FormalPlace& v : pi.places()) {
        bool layer_ok = true;
        for (const DerivedPlace& w : places_above(e, v.label, v.factor.q()))
            for (const InverseRoot& r : bc.resolve_place(w.label).factor.roots())
                if (numeric_weight(r) >= 1.0 - 1e-9) layer_ok = false;
        if (!layer_ok) continue;
        if (e.splitting_at(v.factor.q()).ramified) continue;
        RootOfUnity z = e.value_at(v.factor.q());
        for (unsigned j = 0; j < e.degree(); ++j)
            for (const InverseRoot& r : v.factor.twisted(z.pow(j)).roots())
                if (numeric_weight(r) >= 1.0 - 1e-9) longhand = false;
    }
    CHECK(longhand == js_propagate(LData(pi), e));

    // The weight-one place fails on both routes consistently: the layer
    // factor above it is unbounded exactly because the base factor is.
    PlaceSplitting sp = e.splitting_at(7);
    CHECK(!sp.ramified);
    for (const DerivedPlace& w : places_above(e, "7", 7))
        CHECK(!js_check(bc.resolve_place(w.label).factor));
}

TEST_CASE("archimedean matching is exact multiset equality") {
    CHECK(arch_match(ArchFactor::make({rat(0, 1), rat(1, 1)}),
                     ArchFactor::make({rat(1, 1), rat(0, 1)}), true));
    CHECK(!arch_match(ArchFactor::make({rat(0, 1)}), ArchFactor::make({rat(1, 1)}), true));
    CHECK(error_code([&] {
              arch_match(ArchFactor::make({rat(0, 1)}), ArchFactor::make({rat(0, 1)}), false);
          }) == "DOMAIN");
}

TEST_CASE("transfer pairs validate their shape and weak compatibility") {
    FormalAutDatum t = side_table();
    CHECK_NOTHROW(TransferPair::make(LData(t), LData(t)));

    // Different field.
    FormalAutDatum other =
        FormalAutDatum::make("M", 2, t.places(), std::nullopt, eps8(), arch01());
    CHECK(error_code([&] { TransferPair::make(LData(t), LData(other)); }) == "DOMAIN");

    // Mask naming an absent place.
    CHECK(error_code([&] { TransferPair::make(LData(t), LData(t), {"99"}); }) == "DOMAIN");

    // Disagreement at a place semistable on both sides is not a weak
    // transfer at all.
    FormalAutDatum bad = with_factor(t, "3", lf(3, {wroot(ru(0, 1), 0, 3)}), true);
    CHECK(error_code([&] { TransferPair::make(LData(t), LData(bad)); }) == "DOMAIN");

    // The same disagreement behind an unknown mask is fine.
    CHECK_NOTHROW(TransferPair::make(LData(t), LData(bad), {}, {"3"}));

    // Mismatched place lists.
    std::vector<FormalPlace> fewer = t.places();
    fewer.pop_back();
    FormalAutDatum shorter =
        FormalAutDatum::make("L", 2, std::move(fewer), std::nullopt, eps8(), arch01());
    CHECK(error_code([&] { TransferPair::make(LData(t), LData(shorter)); }) == "DOMAIN");
}

TEST_CASE("a deleted factor is recovered exactly and idempotently") {
    FormalAutDatum known = side_table();
    LocalFactor expected = known.resolve_place("5").factor;
    FormalAutDatum masked = with_factor(known, "5", lf(5, {}), true);

    TransferPair pair = TransferPair::make(LData(known), LData(masked), {}, {"5"});
    LocalFactor completed = complete_missing_factor(pair, "5");
    CHECK(completed == expected);

    // Writing the completion back yields a strong transfer, and completing
    // again changes nothing.
    FormalAutDatum repaired = with_factor(masked, "5", completed, true);
    TransferPair done = TransferPair::make(LData(known), LData(repaired));
    CHECK(complete_missing_factor(done, "5") == expected);
    TransferReport rep = verify_strong_transfer(done);
    CHECK(rep.strong);
    CHECK(rep.epsilon_equal);
    CHECK(rep.arch_equal);
}

TEST_CASE("completion demands a single isolated place with one known side") {
    FormalAutDatum t = side_table();
    FormalAutDatum masked = with_factor(t, "5", lf(5, {}), true);

    TransferPair two = TransferPair::make(LData(t), LData(masked), {"3"}, {"5"});
    CHECK(error_code([&] { complete_missing_factor(two, "5"); }) == "DOMAIN");

    TransferPair both = TransferPair::make(LData(masked), LData(masked), {"5"}, {"5"});
    CHECK(error_code([&] { complete_missing_factor(both, "5"); }) == "DOMAIN");

    TransferPair fine = TransferPair::make(LData(t), LData(masked), {}, {"5"});
    CHECK(error_code([&] { complete_missing_factor(fine, "2"); }) == "DOMAIN");
}

TEST_CASE("perturbed functional-equation data are rejected, not absorbed") {
    FormalAutDatum known = side_table();
    FormalAutDatum masked = with_factor(known, "5", lf(5, {}), true);

    // Conductor magnitude off by a factor.
    TransferPair bad_delta = TransferPair::make(
        LData(known), LData(with_epsilon(masked, eps8(70))), {}, {"5"});
    CHECK(error_code([&] { complete_missing_factor(bad_delta, "5"); }) ==
          "InconsistentFunctionalEquation");

    // Root number rotated.
    TransferPair bad_w = TransferPair::make(
        LData(known),
        LData(with_epsilon(masked, EpsilonDatum::make(CycNum::root_of_unity(8, 3), rat(35, 1)))),
        {}, {"5"});
    CHECK(error_code([&] { complete_missing_factor(bad_w, "5"); }) ==
          "InconsistentFunctionalEquation");

    // Archimedean shifts disagree: the Gamma-factor ratio is not constant.
    TransferPair bad_arch = TransferPair::make(
        LData(known), LData(with_arch(masked, ArchFactor::make({rat(0, 1), rat(1, 1)}))), {},
        {"5"});
    CHECK(error_code([&] { complete_missing_factor(bad_arch, "5"); }) ==
          "InconsistentFunctionalEquation");
}

TEST_CASE("growth-bound violations on known factors are flagged by side") {
    FormalAutDatum known = side_table();
    FormalAutDatum masked = with_factor(known, "5", lf(5, {}), true);

    // A weight-one root on the known side.
    FormalAutDatum heavy = with_factor(known, "3", lf(3, {wroot(ru(0, 1), 2, 3)}), false);
    TransferPair p1 =
        TransferPair::make(LData(heavy), LData(with_factor(masked, "3", lf(3, {}), false)),
                           {}, {"3", "5"});
    CHECK(error_code([&] { complete_missing_factor(p1, "5"); }) == "DOMAIN"); // two unknowns

    TransferPair p2 = TransferPair::make(
        LData(heavy),
        LData(with_factor(with_factor(masked, "3", lf(3, {wroot(ru(0, 1), 2, 3)}), false), "5",
                          lf(5, {}), true)),
        {}, {"5"});
    CHECK(error_code([&] { complete_missing_factor(p2, "5"); }) == "JSViolation");

    // A weight minus-one root passes the bound itself but its dual fails.
    FormalAutDatum light = with_factor(known, "3", lf(3, {wroot(ru(0, 1), -2, 3)}), false);
    TransferPair p3 = TransferPair::make(
        LData(light),
        LData(with_factor(with_factor(masked, "3", lf(3, {wroot(ru(0, 1), -2, 3)}), false), "5",
                          lf(5, {}), true)),
        {}, {"5"});
    CHECK(js_check(light.resolve_place("3").factor));
    CHECK(error_code([&] { complete_missing_factor(p3, "5"); }) == "JSViolation");
}

TEST_CASE("recorded factors that contradict the forcing are an error") {
    FormalAutDatum t = side_table();
    // Both sides known at the non-semistable place, but different.
    FormalAutDatum differs = with_factor(t, "7", lf(7, {wroot(ru(1, 2), 0, 7)}), false);
    TransferPair pair = TransferPair::make(LData(t), LData(differs));
    CHECK(error_code([&] { complete_missing_factor(pair, "7"); }) == "ContradictoryData");
}

TEST_CASE("the per-place report pinpoints mismatches and certifies strength") {
    FormalAutDatum t = side_table();

    TransferReport same = verify_strong_transfer(TransferPair::make(LData(t), LData(t)));
    CHECK(same.strong);
    CHECK(same.epsilon_equal);
    for (const PlaceVerdict& v : same.places) {
        CHECK(v.known);
        CHECK(v.equal);
    }
    CHECK(same.text.find("verdict: strong") != std::string::npos);

    // One mismatched non-semistable place: still a weak transfer, reported.
    FormalAutDatum differs = with_factor(t, "7", lf(7, {wroot(ru(1, 2), 0, 7)}), false);
    TransferReport weak = verify_strong_transfer(TransferPair::make(LData(t), LData(differs)));
    CHECK(!weak.strong);
    bool pinned = false;
    for (const PlaceVerdict& v : weak.places)
        if (v.label == "7") {
            CHECK(v.known);
            CHECK(!v.equal);
            pinned = true;
        } else {
            CHECK(v.equal);
        }
    CHECK(pinned);
    CHECK(weak.text.find("place 7: differ") != std::string::npos);

    // A masked place can never certify strength.
    TransferReport masked =
        verify_strong_transfer(TransferPair::make(LData(t), LData(t), {}, {"5"}));
    CHECK(!masked.strong);

    // Reports are deterministic.
    CHECK(verify_strong_transfer(TransferPair::make(LData(t), LData(t))).text == same.text);
}

TEST_CASE("strong verdicts keep the epsilon consequence visible") {
    FormalAutDatum t = side_table();
    FormalAutDatum rotated =
        with_epsilon(t, EpsilonDatum::make(CycNum::root_of_unity(8, 3), rat(35, 1)));
    TransferReport rep = verify_strong_transfer(TransferPair::make(LData(t), LData(rotated)));
    CHECK(rep.strong); // the place table alone decides strength
    CHECK(!rep.epsilon_equal);
    CHECK(rep.text.find("epsilon") != std::string::npos);
    CHECK(rep.text.find("disagree") != std::string::npos);
}
