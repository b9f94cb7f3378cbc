#include "semilift/transfer.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "semilift/error.hpp"

namespace semilift {

namespace {

FormalAutDatum formal_view(const LData& pi) {
    if (const auto* g = std::get_if<GaloisDatum>(&pi)) return formal_image(*g);
    return std::get<FormalAutDatum>(pi);
}

std::map<std::string, const FormalPlace*> place_index(const FormalAutDatum& t) {
    std::map<std::string, const FormalPlace*> m;
    for (const FormalPlace& v : t.places()) m[v.label] = &v;
    return m;
}

FormalAutDatum dual_table(const FormalAutDatum& t) {
    return std::get<FormalAutDatum>(contragredient(LData(t)));
}

} // namespace

bool js_check(const LocalFactor& f) {
    for (const InverseRoot& r : f.roots())
        if (r.twice_weight >= 2) return false;
    return true;
}

bool js_propagate(const LData& pi, const CyclicExtensionDatum& e) {
    FormalAutDatum base = formal_view(pi);
    FormalAutDatum layer = std::get<FormalAutDatum>(base_change(pi, e));
    bool all = true;
    for (const FormalPlace& v : base.places()) {
        bool layer_bounded = true;
        for (const DerivedPlace& w : places_above(e, v.label, v.factor.q()))
            if (!js_check(layer.resolve_place(w.label).factor)) layer_bounded = false;
        if (!layer_bounded) continue; // hypothesis fails, implication is vacuous
        if (e.splitting_at(v.factor.q()).ramified) continue; // twisted factors vanish
        RootOfUnity z = e.value_at(v.factor.q());
        for (unsigned j = 0; j < e.degree(); ++j)
            if (!js_check(v.factor.twisted(z.pow(j)))) all = false;
    }
    return all;
}

bool ratio_forces_equality(const LocalFactor& a, const LocalFactor& b) {
    if (a.q() != b.q()) fail("DOMAIN", "factors under comparison live over one residue field");
    // roots() is kept in the canonical sorted order, so vector equality is
    // multiset equality.
    return a.roots() == b.roots();
}

bool arch_match(const ArchFactor& a, const ArchFactor& b, bool fe_consistent) {
    if (!fe_consistent)
        fail("DOMAIN", "archimedean comparison needs matching functional-equation shapes");
    return a == b;
}

TransferPair TransferPair::make(const LData& left, const LData& right,
                                std::set<std::string> left_unknown,
                                std::set<std::string> right_unknown) {
    FormalAutDatum l = formal_view(left);
    FormalAutDatum r = formal_view(right);
    if (l.field_label() != r.field_label() || l.field_degree() != r.field_degree())
        fail("DOMAIN", "transfer sides live over different fields: " + l.field_label() +
                           " versus " + r.field_label());

    auto lm = place_index(l);
    auto rm = place_index(r);
    if (lm.size() != rm.size())
        fail("DOMAIN", "transfer sides list different numbers of places");
    for (const auto& [label, lv] : lm) {
        auto it = rm.find(label);
        if (it == rm.end()) fail("DOMAIN", "place " + label + " is listed on one side only");
        if (lv->factor.q() != it->second->factor.q())
            fail("DOMAIN", "place " + label + " has mismatched residue cardinalities");
    }
    for (const std::string& m : left_unknown)
        if (!lm.count(m)) fail("DOMAIN", "unknown mask names an absent place: " + m);
    for (const std::string& m : right_unknown)
        if (!rm.count(m)) fail("DOMAIN", "unknown mask names an absent place: " + m);

    if (l.rule().has_value() != r.rule().has_value())
        fail("DOMAIN", "a global unramified rule is carried by one side only");
    if (l.rule() && !(*l.rule() == *r.rule()))
        fail("DOMAIN", "the global unramified rules disagree");

    // Weak compatibility: wherever both sides are known and semistable,
    // the factors must already coincide.
    for (const auto& [label, lv] : lm) {
        if (left_unknown.count(label) || right_unknown.count(label)) continue;
        const FormalPlace* rv = rm.at(label);
        if (lv->semistable && rv->semistable && !(lv->factor == rv->factor))
            fail("DOMAIN", "weak compatibility fails at semistable place " + label);
    }

    FormalAutDatum ld = dual_table(l);
    FormalAutDatum rd = dual_table(r);
    return TransferPair{std::move(l), std::move(r), std::move(ld), std::move(rd),
                        std::move(left_unknown), std::move(right_unknown)};
}

LocalFactor complete_missing_factor(const TransferPair& pair, const std::string& place) {
    for (const std::string& m : pair.left_unknown)
        if (m != place) fail("DOMAIN", "another place is still unknown: " + m);
    for (const std::string& m : pair.right_unknown)
        if (m != place) fail("DOMAIN", "another place is still unknown: " + m);

    const FormalPlace* lv = pair.left.find_place(place);
    const FormalPlace* rv = pair.right.find_place(place);
    if (!lv || !rv) fail("DOMAIN", "no explicit place with label " + place);

    bool left_known = !pair.left_unknown.count(place);
    bool right_known = !pair.right_unknown.count(place);
    if (!left_known && !right_known)
        fail("DOMAIN", "neither side knows the factor at " + place);

    // Growth bounds on every trusted factor and its dual. Without them the
    // ratio argument has no half plane to start from.
    auto check_bounds = [&](const FormalAutDatum& table, const FormalAutDatum& dual,
                            const std::set<std::string>& mask, const char* side) {
        for (const FormalPlace& v : table.places()) {
            if (mask.count(v.label)) continue;
            if (!js_check(v.factor))
                fail("JSViolation", std::string(side) + " factor at place " + v.label +
                                        " exceeds the growth bound");
            if (!js_check(dual.resolve_place(v.label).factor))
                fail("JSViolation", std::string(side) + " dual factor at place " + v.label +
                                        " exceeds the growth bound");
        }
    };
    check_bounds(pair.left, pair.left_dual, pair.left_unknown, "left");
    check_bounds(pair.right, pair.right_dual, pair.right_unknown, "right");

    // With every other factor matching, the remaining ratio identity reads
    // (eps ratio) * L(place) / L'(place) with both sides entire and
    // non-vanishing, hence constant; a non-constant Gamma-factor ratio or a
    // non-trivial epsilon monomial contradicts that.
    if (!arch_match(pair.left.arch(), pair.right.arch(), true))
        fail("InconsistentFunctionalEquation",
             "archimedean shift multisets differ, so the Gamma-factor ratio is not constant");
    if (!(pair.left.epsilon().delta == pair.right.epsilon().delta))
        fail("InconsistentFunctionalEquation",
             "epsilon conductor magnitudes differ, leaving a non-constant monomial");
    if (!(pair.left.epsilon().w == pair.right.epsilon().w))
        fail("InconsistentFunctionalEquation",
             "epsilon root numbers differ, leaving a non-trivial constant");

    const LocalFactor& forced = left_known ? lv->factor : rv->factor;
    if (left_known && right_known && !ratio_forces_equality(lv->factor, rv->factor))
        fail("ContradictoryData", "the recorded factors at place " + place +
                                      " cannot satisfy one functional equation");
    return forced;
}

TransferReport verify_strong_transfer(const TransferPair& pair) {
    std::vector<const FormalPlace*> order;
    for (const FormalPlace& v : pair.left.places()) order.push_back(&v);
    std::sort(order.begin(), order.end(), [](const FormalPlace* a, const FormalPlace* b) {
        return std::tuple(a->factor.q(), a->label) < std::tuple(b->factor.q(), b->label);
    });

    TransferReport rep;
    bool all_places = true;
    auto rm = place_index(pair.right);
    for (const FormalPlace* lv : order) {
        const FormalPlace* rv = rm.at(lv->label);
        PlaceVerdict v;
        v.label = lv->label;
        v.known = !pair.left_unknown.count(lv->label) && !pair.right_unknown.count(lv->label);
        v.equal = v.known && lv->factor == rv->factor;
        if (!v.known || !v.equal) all_places = false;
        rep.places.push_back(std::move(v));
    }
    rep.epsilon_equal = pair.left.epsilon() == pair.right.epsilon();
    rep.arch_equal = pair.left.arch() == pair.right.arch();
    rep.strong = all_places && rep.arch_equal;

    std::ostringstream out;
    out << "transfer comparison over " << pair.left.field_label() << " (degree "
        << pair.left.field_degree() << ")\n";
    for (const PlaceVerdict& v : rep.places)
        out << "  place " << v.label << ": "
            << (!v.known ? "unknown" : v.equal ? "match" : "differ") << "\n";
    out << "  archimedean: " << (rep.arch_equal ? "match" : "differ") << "\n";
    out << "  epsilon: " << (rep.epsilon_equal ? "match" : "differ") << "\n";
    out << "  verdict: " << (rep.strong ? "strong" : "weak-only") << "\n";
    if (rep.strong && !rep.epsilon_equal)
        out << "  note: equal local factors everywhere force equal epsilon data, but the "
               "recorded epsilon data disagree\n";
    rep.text = out.str();
    return rep;
}

} // namespace semilift
