#include "semilift/ldata.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>
#include <tuple>

#include "semilift/error.hpp"
#include "semilift/numtheory.hpp"

namespace semilift {

namespace {

u64 checked_pow_u64(u64 base, unsigned e, const char* what) {
    u64 out = 1;
    for (unsigned i = 0; i < e; ++i) {
        if (base != 0 && out > ~u64{0} / base) fail("DOMAIN", std::string(what) + ": overflow");
        out *= base;
    }
    return out;
}

unsigned group_pow(const FiniteGroup& g, unsigned a, u64 e) {
    unsigned out = g.identity();
    for (u64 i = 0; i < e; ++i) out = g.mul(out, a);
    return out;
}

Rat rat_pow(const Rat& r, unsigned e) {
    Rat out(1);
    for (unsigned i = 0; i < e; ++i) out *= r;
    return out;
}

std::vector<u64> coprime_residues(u64 m) {
    if (m == 1) return {0};
    std::vector<u64> out;
    for (u64 r = 1; r < m; ++r)
        if (std::gcd(r, m) == 1) out.push_back(r);
    return out;
}

// Labels of k places above a base place: the base label itself when k = 1,
// else "label.1".."label.k".
std::vector<std::string> derived_labels(const std::string& base, unsigned k) {
    if (k == 1) return {base};
    std::vector<std::string> out;
    out.reserve(k);
    for (unsigned i = 1; i <= k; ++i) out.push_back(base + "." + std::to_string(i));
    return out;
}

// Implicit places are addressed by the decimal prime, with a ".k" suffix
// when several places lie above it.
std::optional<std::pair<u64, unsigned>> parse_prime_label(const std::string& label) {
    if (label.empty() || !std::isdigit(static_cast<unsigned char>(label[0]))) return std::nullopt;
    size_t dot = label.find('.');
    std::string head = label.substr(0, dot);
    u64 p = 0;
    for (char c : head) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        if (p > (~u64{0} - 9) / 10) return std::nullopt;
        p = p * 10 + static_cast<u64>(c - '0');
    }
    unsigned idx = 0;
    if (dot != std::string::npos) {
        std::string tail = label.substr(dot + 1);
        if (tail.empty()) return std::nullopt;
        for (char c : tail) {
            if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
            idx = idx * 10 + static_cast<unsigned>(c - '0');
        }
        if (idx == 0) return std::nullopt;
    }
    if (!is_prime(p)) return std::nullopt;
    return std::make_pair(p, idx);
}

// Spread a polynomial in T to the same polynomial read in T^k.
CycPoly poly_inflate(const CycPoly& p, unsigned k) {
    if (p.empty()) return p;
    CycPoly out((p.size() - 1) * k + 1, CycNum::zero());
    for (size_t i = 0; i < p.size(); ++i) out[i * k] = p[i];
    return out;
}

bool sorted_unique(const std::vector<unsigned>& v) {
    for (size_t i = 1; i < v.size(); ++i)
        if (v[i - 1] >= v[i]) return false;
    return true;
}

} // namespace

// ---------------------------------------------------------------------------
// ArchFactor
// ---------------------------------------------------------------------------

ArchFactor ArchFactor::make(std::vector<Rat> shifts) {
    for (const Rat& s : shifts)
        if (s.get_den() != 1 && s.get_den() != 2)
            fail("DOMAIN", "archimedean shift denominator must divide 2: " + semilift::to_string(s));
    std::sort(shifts.begin(), shifts.end());
    return ArchFactor{std::move(shifts)};
}

ArchFactor ArchFactor::merged(const ArchFactor& o) const {
    std::vector<Rat> all = shifts;
    all.insert(all.end(), o.shifts.begin(), o.shifts.end());
    std::sort(all.begin(), all.end());
    return ArchFactor{std::move(all)};
}

ArchFactor ArchFactor::repeated(unsigned k) const {
    std::vector<Rat> all;
    all.reserve(shifts.size() * k);
    for (const Rat& s : shifts)
        for (unsigned i = 0; i < k; ++i) all.push_back(s);
    std::sort(all.begin(), all.end());
    return ArchFactor{std::move(all)};
}

std::string ArchFactor::to_string() const {
    std::string out = "arch(";
    for (size_t i = 0; i < shifts.size(); ++i) {
        if (i) out += ", ";
        out += semilift::to_string(shifts[i]);
    }
    return out + ")";
}

ArchFactor ArchFactor::parse(std::string_view text) {
    auto strip = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    std::string_view s = strip(text);
    if (s.substr(0, 5) != "arch(" || s.empty() || s.back() != ')')
        fail("PARSE_ERROR", "expected arch(...): " + std::string(text));
    s = strip(s.substr(5, s.size() - 6));
    std::vector<Rat> shifts;
    while (!s.empty()) {
        size_t comma = s.find(',');
        std::string_view piece = strip(s.substr(0, comma));
        if (piece.empty()) fail("PARSE_ERROR", "empty archimedean shift in: " + std::string(text));
        shifts.push_back(parse_rational(piece));
        if (comma == std::string_view::npos) break;
        s = s.substr(comma + 1);
    }
    return make(std::move(shifts));
}

// ---------------------------------------------------------------------------
// MonodromyType
// ---------------------------------------------------------------------------

MonodromyType MonodromyType::make(std::vector<unsigned> parts) {
    for (size_t i = 0; i < parts.size(); ++i) {
        if (parts[i] == 0) fail("DOMAIN", "monodromy partition parts must be positive");
        if (i && parts[i] > parts[i - 1])
            fail("DOMAIN", "monodromy partition must be weakly decreasing");
    }
    return MonodromyType{std::move(parts)};
}

unsigned MonodromyType::rank() const {
    unsigned r = 0;
    for (unsigned p : partition) r += p - 1;
    return r;
}

unsigned MonodromyType::boxes() const {
    unsigned b = 0;
    for (unsigned p : partition) b += p;
    return b;
}

std::string MonodromyType::to_string() const {
    std::string out = "[";
    for (size_t i = 0; i < partition.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(partition[i]);
    }
    return out + "]";
}

// ---------------------------------------------------------------------------
// GaloisDatum
// ---------------------------------------------------------------------------

GaloisDatum::GaloisDatum(std::string field_label, unsigned field_degree, Representation rho,
                         std::vector<GaloisPlace> places, std::optional<FrobeniusRule> rule,
                         ArchFactor arch)
    : field_label_(std::move(field_label)),
      field_degree_(field_degree),
      rho_(std::move(rho)),
      places_(std::move(places)),
      rule_(std::move(rule)),
      arch_(std::move(arch)) {}

GaloisDatum GaloisDatum::make(std::string field_label, unsigned field_degree, Representation rho,
                              std::vector<GaloisPlace> places, std::optional<FrobeniusRule> rule,
                              ArchFactor arch) {
    if (field_label.empty()) fail("DOMAIN", "field label must be nonempty");
    if (field_degree == 0) fail("DOMAIN", "field degree must be positive");
    const FiniteGroup& g = *rho.group();

    std::set<std::string> labels;
    std::set<u64> explicit_primes;
    for (GaloisPlace& v : places) {
        if (v.label.empty()) fail("DOMAIN", "place label must be nonempty");
        if (!labels.insert(v.label).second) fail("DOMAIN", "duplicate place label: " + v.label);
        u64 p = prime_power_base(v.q);
        if (p == 0 || v.q < 2)
            fail("DOMAIN", "residue cardinality must be a prime power: place " + v.label);
        explicit_primes.insert(p);
        if (v.frobenius >= g.size()) fail("DOMAIN", "frobenius out of range: place " + v.label);
        if (v.inertia.empty()) v.inertia = {g.identity()};
        if (!sorted_unique(v.inertia))
            fail("DOMAIN", "inertia elements must be sorted and distinct: place " + v.label);
        for (unsigned x : v.inertia)
            if (x >= g.size()) fail("DOMAIN", "inertia element out of range: place " + v.label);
        if (!g.is_subgroup(v.inertia))
            fail("DOMAIN", "inertia is not a subgroup: place " + v.label);
        for (unsigned x : v.inertia) {
            unsigned c = g.conjugate(v.frobenius, x);
            if (!std::binary_search(v.inertia.begin(), v.inertia.end(), c))
                fail("DOMAIN", "frobenius does not normalize inertia: place " + v.label);
        }
        if (v.monodromy.boxes() > rho.dim())
            fail("DOMAIN", "monodromy partition exceeds the dimension: place " + v.label);
    }

    if (rule) {
        if (rule->modulus == 0) fail("DOMAIN", "rule modulus must be positive");
        std::vector<u64> residues = coprime_residues(rule->modulus);
        if (rule->table.size() != residues.size())
            fail("DOMAIN", "rule table must cover exactly the residues coprime to the modulus");
        for (u64 r : residues) {
            auto it = rule->table.find(r);
            if (it == rule->table.end())
                fail("DOMAIN", "rule table is missing residue " + std::to_string(r));
            if (it->second.empty())
                fail("DOMAIN", "rule entries must be nonempty at residue " + std::to_string(r));
            u64 total = 0;
            for (const FrobeniusRule::Entry& e : it->second) {
                if (e.frobenius >= g.size()) fail("DOMAIN", "rule frobenius out of range");
                if (e.degree == 0 || e.count == 0) fail("DOMAIN", "rule degree and count must be positive");
                total += static_cast<u64>(e.degree) * e.count;
            }
            if (total != field_degree)
                fail("DOMAIN", "rule place degrees at residue " + std::to_string(r) +
                                   " must sum to the field degree");
        }
        for (auto [p, k] : factor(rule->modulus))
            if (!explicit_primes.count(p))
                fail("DOMAIN", "prime " + std::to_string(p) +
                                   " divides the rule modulus but has no explicit place records");
    }

    return GaloisDatum(std::move(field_label), field_degree, std::move(rho), std::move(places),
                       std::move(rule), std::move(arch));
}

GaloisDatum GaloisDatum::with(std::string field_label, unsigned field_degree,
                              std::vector<GaloisPlace> places, std::optional<FrobeniusRule> rule,
                              ArchFactor arch) const {
    return make(std::move(field_label), field_degree, rho_, std::move(places), std::move(rule),
                std::move(arch));
}

GaloisDatum GaloisDatum::with_rho(Representation rho) const {
    return make(field_label_, field_degree_, std::move(rho), places_, rule_, arch_);
}

const GaloisPlace* GaloisDatum::find_place(const std::string& label) const {
    for (const GaloisPlace& v : places_)
        if (v.label == label) return &v;
    return nullptr;
}

namespace {

bool prime_has_explicit_galois(const std::vector<GaloisPlace>& places, u64 p) {
    for (const GaloisPlace& v : places)
        if (prime_power_base(v.q) == p) return true;
    return false;
}

std::vector<GaloisPlace> synth_galois_places(const FrobeniusRule& rule, const GroupPtr& g, u64 p) {
    const auto& entries = rule.table.at(p % rule.modulus);
    unsigned total = 0;
    for (const auto& e : entries) total += e.count;
    std::vector<std::string> names = derived_labels(std::to_string(p), total);
    std::vector<GaloisPlace> out;
    size_t i = 0;
    for (const auto& e : entries)
        for (unsigned c = 0; c < e.count; ++c)
            out.push_back(GaloisPlace{names[i++],
                                      checked_pow_u64(p, e.degree, "rule residue cardinality"),
                                      e.frobenius,
                                      {g->identity()},
                                      MonodromyType::none()});
    return out;
}

} // namespace

GaloisPlace GaloisDatum::resolve_place(const std::string& label) const {
    if (const GaloisPlace* v = find_place(label)) return *v;
    auto parsed = parse_prime_label(label);
    if (parsed && rule_ && std::gcd(parsed->first, rule_->modulus) == 1 &&
        !prime_has_explicit_galois(places_, parsed->first)) {
        std::vector<GaloisPlace> synth = synth_galois_places(*rule_, group(), parsed->first);
        for (const GaloisPlace& v : synth)
            if (v.label == label) return v;
    }
    fail("DOMAIN", "unknown place: " + label);
}

std::vector<GaloisPlace> GaloisDatum::places_up_to(u64 bound) const {
    std::vector<GaloisPlace> out;
    for (const GaloisPlace& v : places_)
        if (v.q <= bound) out.push_back(v);
    if (rule_) {
        for (u64 p : primes_up_to(bound)) {
            if (std::gcd(p, rule_->modulus) != 1 || prime_has_explicit_galois(places_, p)) continue;
            for (GaloisPlace& v : synth_galois_places(*rule_, group(), p))
                if (v.q <= bound) out.push_back(std::move(v));
        }
    }
    std::sort(out.begin(), out.end(), [](const GaloisPlace& a, const GaloisPlace& b) {
        return std::tie(a.q, a.label) < std::tie(b.q, b.label);
    });
    return out;
}

// ---------------------------------------------------------------------------
// FormalAutDatum
// ---------------------------------------------------------------------------

FormalAutDatum::FormalAutDatum(std::string field_label, unsigned field_degree,
                               std::vector<FormalPlace> places, std::optional<FormalRule> rule,
                               EpsilonDatum epsilon, ArchFactor arch)
    : field_label_(std::move(field_label)),
      field_degree_(field_degree),
      places_(std::move(places)),
      rule_(std::move(rule)),
      epsilon_(std::move(epsilon)),
      arch_(std::move(arch)) {}

FormalAutDatum FormalAutDatum::make(std::string field_label, unsigned field_degree,
                                    std::vector<FormalPlace> places, std::optional<FormalRule> rule,
                                    EpsilonDatum epsilon, ArchFactor arch) {
    if (field_label.empty()) fail("DOMAIN", "field label must be nonempty");
    if (field_degree == 0) fail("DOMAIN", "field degree must be positive");
    std::set<std::string> labels;
    std::set<u64> explicit_primes;
    for (const FormalPlace& v : places) {
        if (v.label.empty()) fail("DOMAIN", "place label must be nonempty");
        if (!labels.insert(v.label).second) fail("DOMAIN", "duplicate place label: " + v.label);
        u64 p = prime_power_base(v.factor.q());
        if (p == 0 || v.factor.q() < 2)
            fail("DOMAIN", "residue cardinality must be a prime power: place " + v.label);
        explicit_primes.insert(p);
    }
    if (rule) {
        if (rule->modulus == 0) fail("DOMAIN", "rule modulus must be positive");
        std::vector<u64> residues = coprime_residues(rule->modulus);
        if (rule->table.size() != residues.size())
            fail("DOMAIN", "rule table must cover exactly the residues coprime to the modulus");
        for (u64 r : residues) {
            auto it = rule->table.find(r);
            if (it == rule->table.end())
                fail("DOMAIN", "rule table is missing residue " + std::to_string(r));
            if (it->second.empty())
                fail("DOMAIN", "rule entries must be nonempty at residue " + std::to_string(r));
            u64 total = 0;
            for (const FormalRule::Entry& e : it->second) {
                if (e.degree == 0 || e.count == 0)
                    fail("DOMAIN", "rule degree and count must be positive");
                total += static_cast<u64>(e.degree) * e.count;
            }
            if (total != field_degree)
                fail("DOMAIN", "rule place degrees at residue " + std::to_string(r) +
                                   " must sum to the field degree");
        }
        for (auto [p, k] : factor(rule->modulus))
            if (!explicit_primes.count(p))
                fail("DOMAIN", "prime " + std::to_string(p) +
                                   " divides the rule modulus but has no explicit place records");
    }
    return FormalAutDatum(std::move(field_label), field_degree, std::move(places), std::move(rule),
                          std::move(epsilon), std::move(arch));
}

const FormalPlace* FormalAutDatum::find_place(const std::string& label) const {
    for (const FormalPlace& v : places_)
        if (v.label == label) return &v;
    return nullptr;
}

namespace {

bool prime_has_explicit_formal(const std::vector<FormalPlace>& places, u64 p) {
    for (const FormalPlace& v : places)
        if (prime_power_base(v.factor.q()) == p) return true;
    return false;
}

LocalFactor shapes_to_factor(const std::vector<SatakeShape>& shapes, u64 q) {
    std::vector<InverseRoot> roots;
    roots.reserve(shapes.size());
    for (const SatakeShape& s : shapes)
        roots.push_back(InverseRoot::make(s.unit, rat(s.twice_weight, 2), q));
    return LocalFactor(q, std::move(roots));
}

std::vector<FormalPlace> synth_formal_places(const FormalRule& rule, u64 p) {
    const auto& entries = rule.table.at(p % rule.modulus);
    unsigned total = 0;
    for (const auto& e : entries) total += e.count;
    std::vector<std::string> names = derived_labels(std::to_string(p), total);
    std::vector<FormalPlace> out;
    size_t i = 0;
    for (const auto& e : entries) {
        u64 q = checked_pow_u64(p, e.degree, "rule residue cardinality");
        for (unsigned c = 0; c < e.count; ++c)
            out.push_back(FormalPlace{names[i++], shapes_to_factor(e.roots, q), true});
    }
    return out;
}

} // namespace

FormalPlace FormalAutDatum::resolve_place(const std::string& label) const {
    if (const FormalPlace* v = find_place(label)) return *v;
    auto parsed = parse_prime_label(label);
    if (parsed && rule_ && std::gcd(parsed->first, rule_->modulus) == 1 &&
        !prime_has_explicit_formal(places_, parsed->first)) {
        std::vector<FormalPlace> synth = synth_formal_places(*rule_, parsed->first);
        for (const FormalPlace& v : synth)
            if (v.label == label) return v;
    }
    fail("DOMAIN", "unknown place: " + label);
}

std::vector<FormalPlace> FormalAutDatum::places_up_to(u64 bound) const {
    std::vector<FormalPlace> out;
    for (const FormalPlace& v : places_)
        if (v.factor.q() <= bound) out.push_back(v);
    if (rule_) {
        for (u64 p : primes_up_to(bound)) {
            if (std::gcd(p, rule_->modulus) != 1 || prime_has_explicit_formal(places_, p)) continue;
            for (FormalPlace& v : synth_formal_places(*rule_, p))
                if (v.factor.q() <= bound) out.push_back(std::move(v));
        }
    }
    std::sort(out.begin(), out.end(), [](const FormalPlace& a, const FormalPlace& b) {
        return std::make_tuple(a.factor.q(), std::cref(a.label)) <
               std::make_tuple(b.factor.q(), std::cref(b.label));
    });
    return out;
}

// ---------------------------------------------------------------------------
// LData helpers
// ---------------------------------------------------------------------------

const std::string& field_label(const LData& pi) {
    return std::visit([](const auto& d) -> const std::string& { return d.field_label(); }, pi);
}

unsigned field_degree(const LData& pi) {
    return std::visit([](const auto& d) { return d.field_degree(); }, pi);
}

const ArchFactor& arch_factor(const LData& pi) {
    return std::visit([](const auto& d) -> const ArchFactor& { return d.arch(); }, pi);
}

// ---------------------------------------------------------------------------
// CyclicExtensionDatum
// ---------------------------------------------------------------------------

CyclicExtensionDatum CyclicExtensionDatum::make(std::string base_label, std::string ext_label,
                                                DirichletCharacter cutter) {
    if (base_label.empty() || ext_label.empty()) fail("DOMAIN", "field labels must be nonempty");
    if (base_label == ext_label) fail("DOMAIN", "extension label must differ from the base label");
    DirichletCharacter primitive = cutter.primitive_core();
    u64 order = primitive.order();
    if (order < 2 || order > 0xffffffffull || !is_prime(order))
        fail("DOMAIN", "cutting character order must be prime, got " + std::to_string(order));
    CyclicExtensionDatum out;
    out.base_label_ = std::move(base_label);
    out.ext_label_ = std::move(ext_label);
    out.degree_ = static_cast<unsigned>(order);
    out.cutter_ = std::move(primitive);
    return out;
}

PlaceSplitting CyclicExtensionDatum::splitting_at(u64 qv) const {
    u64 p = prime_power_base(qv);
    if (p == 0 || qv < 2) fail("DOMAIN", "residue cardinality must be a prime power");
    if (cutter_.modulus() % p == 0) return PlaceSplitting{1, 1, true};
    RootOfUnity val = *cutter_.eval(qv);
    auto f = static_cast<unsigned>(val.order);
    check(degree_ % f == 0, "cutting character value order must divide the degree");
    return PlaceSplitting{degree_ / f, f, false};
}

RootOfUnity CyclicExtensionDatum::value_at(u64 qv) const {
    u64 p = prime_power_base(qv);
    if (p == 0 || cutter_.modulus() % p == 0)
        fail("DOMAIN", "extension ramifies at residue cardinality " + std::to_string(qv));
    return *cutter_.eval(qv);
}

RootOfUnity CyclicExtensionDatum::ramified_frobenius_value(u64 qv) const {
    u64 p = prime_power_base(qv);
    if (p == 0 || cutter_.modulus() % p != 0)
        fail("DOMAIN", "extension is unramified at residue cardinality " + std::to_string(qv));
    RootOfUnity out{1, 0};
    for (auto [l, k] : factor(cutter_.modulus())) {
        if (l == p) continue;
        out = out * *cutter_.p_component(l).eval(p);
    }
    return out;
}

std::vector<DerivedPlace> places_above(const CyclicExtensionDatum& e, const std::string& label,
                                       u64 qv) {
    PlaceSplitting s = e.splitting_at(qv);
    u64 qw = s.ramified ? qv : checked_pow_u64(qv, s.degree, "derived residue cardinality");
    std::vector<DerivedPlace> out;
    for (const std::string& name : derived_labels(label, s.count))
        out.push_back(DerivedPlace{name, qw, s.degree, s.ramified});
    return out;
}

// ---------------------------------------------------------------------------
// Local factors and semistability
// ---------------------------------------------------------------------------

LocalFactor artin_local_factor(const GaloisDatum& d, const GaloisPlace& v) {
    CycPoly poly = d.rho().invariant_frobenius_poly(v.inertia, v.frobenius);
    u64 bound = d.group()->element_order(v.frobenius);
    std::vector<RootOfUnity> units = unit_inverse_roots(poly, bound);
    std::vector<InverseRoot> roots;
    roots.reserve(units.size());
    for (const RootOfUnity& z : units) roots.push_back(InverseRoot::make(z, Rat(0), v.q));
    std::sort(roots.begin(), roots.end());
    unsigned r = v.monodromy.rank();
    if (r > 0) {
        if (r > roots.size())
            fail("DOMAIN", "monodromy rank exceeds the local factor degree: place " + v.label);
        roots.resize(roots.size() - r);
    }
    return LocalFactor(v.q, std::move(roots));
}

LocalFactor artin_local_factor(const GaloisDatum& d, const std::string& place) {
    return artin_local_factor(d, d.resolve_place(place));
}

LocalFactor local_factor_at(const LData& pi, const std::string& place) {
    if (const auto* g = std::get_if<GaloisDatum>(&pi)) return artin_local_factor(*g, place);
    return std::get<FormalAutDatum>(pi).resolve_place(place).factor;
}

bool semistable_at(const GaloisDatum& d, const GaloisPlace& v) {
    const FiniteGroup& g = *d.group();
    CycMatrix id = CycMatrix::identity(d.rho().dim());
    for (unsigned x : v.inertia) {
        if (x == g.identity()) continue;
        if (!(d.rho().image(x) == id)) return false;
    }
    return true;
}

bool semistable_at(const LData& pi, const std::string& place) {
    if (const auto* g = std::get_if<GaloisDatum>(&pi))
        return semistable_at(*g, g->resolve_place(place));
    return std::get<FormalAutDatum>(pi).resolve_place(place).semistable;
}

std::vector<PlaceFactor> local_factors_up_to(const LData& pi, u64 bound) {
    std::vector<PlaceFactor> out;
    if (const auto* g = std::get_if<GaloisDatum>(&pi)) {
        for (const GaloisPlace& v : g->places_up_to(bound))
            out.push_back(PlaceFactor{v.label, artin_local_factor(*g, v), semistable_at(*g, v)});
    } else {
        for (const FormalPlace& v : std::get<FormalAutDatum>(pi).places_up_to(bound))
            out.push_back(PlaceFactor{v.label, v.factor, v.semistable});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Twisting
// ---------------------------------------------------------------------------

namespace {

// Places to add explicitly because the twisting or cutting character
// ramifies at their primes while the datum covers them only by rule.
std::vector<u64> newly_ramified_primes(u64 chi_modulus, u64 rule_modulus,
                                       const std::set<u64>& explicit_primes) {
    std::vector<u64> out;
    for (auto [p, k] : factor(chi_modulus))
        if (std::gcd(p, rule_modulus) == 1 && !explicit_primes.count(p)) out.push_back(p);
    return out;
}

std::set<u64> galois_explicit_primes(const GaloisDatum& d) {
    std::set<u64> out;
    for (const GaloisPlace& v : d.places()) out.insert(prime_power_base(v.q));
    return out;
}

std::set<u64> formal_explicit_primes(const FormalAutDatum& d) {
    std::set<u64> out;
    for (const FormalPlace& v : d.places()) out.insert(prime_power_base(v.factor.q()));
    return out;
}

std::optional<FormalRule> twist_formal_rule(const std::optional<FormalRule>& rule,
                                            const DirichletCharacter& chi) {
    if (!rule) return std::nullopt;
    FormalRule out;
    out.modulus = std::lcm(rule->modulus, chi.modulus());
    for (u64 r : coprime_residues(out.modulus)) {
        std::vector<FormalRule::Entry> entries;
        for (const FormalRule::Entry& e : rule->table.at(r % rule->modulus)) {
            RootOfUnity val = chi.eval(r)->pow(e.degree);
            FormalRule::Entry ne;
            ne.degree = e.degree;
            ne.count = e.count;
            for (const SatakeShape& s : e.roots)
                ne.roots.push_back(SatakeShape{s.unit * val, s.twice_weight});
            entries.push_back(std::move(ne));
        }
        out.table[r] = std::move(entries);
    }
    return out;
}

} // namespace

FormalAutDatum twist_formal(const FormalAutDatum& d, const DirichletCharacter& chi) {
    if (chi.order() == 1) return d;
    u64 n = chi.modulus();
    std::vector<FormalPlace> places;
    for (const FormalPlace& v : d.places()) {
        u64 p = prime_power_base(v.factor.q());
        if (n % p == 0) {
            places.push_back(FormalPlace{v.label, LocalFactor(v.factor.q()), false});
        } else {
            places.push_back(
                FormalPlace{v.label, v.factor.twisted(*chi.eval(v.factor.q())), v.semistable});
        }
    }
    u64 rule_mod = d.rule() ? d.rule()->modulus : 1;
    if (d.rule()) {
        for (u64 p : newly_ramified_primes(n, rule_mod, formal_explicit_primes(d)))
            for (const FormalPlace& v : synth_formal_places(*d.rule(), p))
                places.push_back(FormalPlace{v.label, LocalFactor(v.factor.q()), false});
    }
    return FormalAutDatum::make(d.field_label(), d.field_degree(), std::move(places),
                                twist_formal_rule(d.rule(), chi), d.epsilon(), d.arch());
}

namespace {

std::vector<SatakeShape> frobenius_shapes(const GaloisDatum& d, unsigned g) {
    CycPoly poly = d.rho().image(g).char_reverse();
    std::vector<RootOfUnity> units = unit_inverse_roots(poly, d.group()->element_order(g));
    std::vector<SatakeShape> out;
    out.reserve(units.size());
    for (const RootOfUnity& z : units) out.push_back(SatakeShape{z, 0});
    return out;
}

std::optional<FormalRule> galois_rule_to_formal(const GaloisDatum& d) {
    if (!d.rule()) return std::nullopt;
    FormalRule out;
    out.modulus = d.rule()->modulus;
    for (const auto& [r, entries] : d.rule()->table) {
        std::vector<FormalRule::Entry> ne;
        for (const FrobeniusRule::Entry& e : entries)
            ne.push_back(FormalRule::Entry{frobenius_shapes(d, e.frobenius), e.degree, e.count});
        out.table[r] = std::move(ne);
    }
    return out;
}

// Formal image of a Galois-backed datum with the neutral epsilon monomial.
FormalAutDatum formalize(const GaloisDatum& d, bool require_semistable) {
    std::vector<FormalPlace> places;
    for (const GaloisPlace& v : d.places()) {
        bool ss = semistable_at(d, v);
        if (require_semistable && !ss)
            fail("DOMAIN", "datum is not semistable at place " + v.label);
        places.push_back(FormalPlace{v.label, artin_local_factor(d, v), ss});
    }
    return FormalAutDatum::make(d.field_label(), d.field_degree(), std::move(places),
                                galois_rule_to_formal(d), EpsilonDatum{}, d.arch());
}

} // namespace

FormalAutDatum tautological_lift(const GaloisDatum& d) { return formalize(d, true); }

FormalAutDatum formal_image(const GaloisDatum& d) { return formalize(d, false); }

std::string describe(const FormalAutDatum& d) {
    std::string out = "formal " + d.field_label() + " degree " + std::to_string(d.field_degree()) + "\n";
    std::vector<const FormalPlace*> sorted;
    for (const FormalPlace& v : d.places()) sorted.push_back(&v);
    std::sort(sorted.begin(), sorted.end(), [](const FormalPlace* a, const FormalPlace* b) {
        return std::make_tuple(a->factor.q(), std::cref(a->label)) <
               std::make_tuple(b->factor.q(), std::cref(b->label));
    });
    for (const FormalPlace* v : sorted)
        out += "  place " + v->label + " q=" + std::to_string(v->factor.q()) +
               (v->semistable ? " semistable " : " ramified ") + v->factor.to_string() + "\n";
    if (d.rule()) {
        out += "  rule mod " + std::to_string(d.rule()->modulus) + "\n";
        for (const auto& [r, entries] : d.rule()->table) {
            out += "    " + std::to_string(r) + " ->";
            for (const FormalRule::Entry& e : entries) {
                out += " {";
                for (size_t i = 0; i < e.roots.size(); ++i)
                    out += (i ? "," : "") + e.roots[i].unit.to_string() + "^w" +
                           std::to_string(e.roots[i].twice_weight);
                out += "; deg " + std::to_string(e.degree) + " x" + std::to_string(e.count) + "}";
            }
            out += "\n";
        }
    }
    out += "  epsilon W=" + d.epsilon().w.to_string() + " delta=" + to_string(d.epsilon().delta) +
           "\n";
    out += "  " + d.arch().to_string() + "\n";
    return out;
}

LData twist_ldata(const LData& pi, const DirichletCharacter& chi) {
    if (chi.order() == 1) return pi;
    if (const auto* g = std::get_if<GaloisDatum>(&pi)) return twist_formal(formalize(*g, false), chi);
    return twist_formal(std::get<FormalAutDatum>(pi), chi);
}

// ---------------------------------------------------------------------------
// Contragredient
// ---------------------------------------------------------------------------

LData contragredient(const LData& pi) {
    if (const auto* g = std::get_if<GaloisDatum>(&pi)) return g->with_rho(g->rho().dual());
    const auto& d = std::get<FormalAutDatum>(pi);
    std::vector<FormalPlace> places;
    for (const FormalPlace& v : d.places())
        places.push_back(FormalPlace{v.label, v.factor.contragredient(), v.semistable});
    std::optional<FormalRule> rule;
    if (d.rule()) {
        FormalRule nr;
        nr.modulus = d.rule()->modulus;
        for (const auto& [r, entries] : d.rule()->table) {
            std::vector<FormalRule::Entry> ne;
            for (const FormalRule::Entry& e : entries) {
                FormalRule::Entry x;
                x.degree = e.degree;
                x.count = e.count;
                for (const SatakeShape& s : e.roots)
                    x.roots.push_back(SatakeShape{s.unit.inverse(), -s.twice_weight});
                ne.push_back(std::move(x));
            }
            nr.table[r] = std::move(ne);
        }
        rule = std::move(nr);
    }
    return FormalAutDatum::make(d.field_label(), d.field_degree(), std::move(places),
                                std::move(rule), d.epsilon().contragredient(), d.arch());
}

// ---------------------------------------------------------------------------
// Pullback detection
// ---------------------------------------------------------------------------

std::vector<OneDimChar> pullback_candidates(const GaloisDatum& d, const DirichletCharacter& chi) {
    std::vector<OneDimChar> out;
    if (chi.order() == 1) return out;
    for (const OneDimChar& psi : all_linear_characters(d.group())) {
        if (psi.is_trivial() || psi.order() != chi.order()) continue;
        bool ok = true;
        if (d.rule()) {
            u64 l = std::lcm(d.rule()->modulus, chi.modulus());
            for (u64 r : coprime_residues(l)) {
                for (const FrobeniusRule::Entry& e : d.rule()->table.at(r % d.rule()->modulus)) {
                    if (psi.value(e.frobenius) != chi.eval(r)->pow(e.degree)) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) break;
            }
        } else {
            const FiniteGroup& g = *d.group();
            for (const GaloisPlace& v : d.places()) {
                bool unramified = v.inertia.size() == 1 && v.inertia[0] == g.identity();
                if (!unramified) continue;
                if (chi.modulus() % prime_power_base(v.q) == 0) continue;
                if (psi.value(v.frobenius) != *chi.eval(v.q)) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) out.push_back(psi);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Restriction along a cyclic prime-degree extension
// ---------------------------------------------------------------------------

namespace {

void validate_cut(const FiniteGroup& g, const GaloisPlace& v, const InertiaCut& cut, unsigned p) {
    if (cut.theta.size() != v.inertia.size())
        fail("DOMAIN", "inertia cut must assign a value to every inertia element: place " + v.label);
    for (unsigned x : v.inertia) {
        auto it = cut.theta.find(x);
        if (it == cut.theta.end())
            fail("DOMAIN", "inertia cut is missing element " + std::to_string(x) + ": place " +
                               v.label);
        if (it->second >= p) fail("DOMAIN", "inertia cut value out of range: place " + v.label);
    }
    bool onto = false;
    for (unsigned x : v.inertia) {
        unsigned tx = cut.theta.at(x);
        if (tx != 0) onto = true;
        for (unsigned y : v.inertia)
            if (cut.theta.at(g.mul(x, y)) != (tx + cut.theta.at(y)) % p)
                fail("DOMAIN", "inertia cut is not a homomorphism: place " + v.label);
        if (cut.theta.at(g.conjugate(v.frobenius, x)) != tx)
            fail("DOMAIN", "inertia cut is not frobenius-invariant: place " + v.label);
    }
    if (!onto) fail("DOMAIN", "inertia cut must be surjective: place " + v.label);
}

// Pushforward of one explicit place along the extension; the cut, when
// present, prescribes the surviving index-p part of the inertia.
std::vector<GaloisPlace> push_place(const GaloisDatum& d, const CyclicExtensionDatum& e,
                                    const GaloisPlace& v, const InertiaCut* cut) {
    const FiniteGroup& g = *d.group();
    unsigned p = e.degree();
    PlaceSplitting s = e.splitting_at(v.q);
    std::vector<GaloisPlace> out;
    if (s.ramified) {
        std::vector<unsigned> inertia = v.inertia;
        unsigned frob = v.frobenius;
        bool inertia_trivial = v.inertia.size() == 1 && v.inertia[0] == g.identity();
        if (cut && !inertia_trivial) {
            validate_cut(g, v, *cut, p);
            inertia.clear();
            for (unsigned x : v.inertia)
                if (cut->theta.at(x) == 0) inertia.push_back(x);
            RootOfUnity t = e.ramified_frobenius_value(v.q);
            unsigned k0 = static_cast<unsigned>(t.exp * (p / t.order)) % p;
            if (k0 != 0) {
                unsigned want = p - k0;
                unsigned tau = 0;
                bool found = false;
                for (unsigned x : v.inertia)
                    if (cut->theta.at(x) == want) {
                        tau = x;
                        found = true;
                        break;
                    }
                check(found, "surjective inertia cut must attain every value");
                frob = g.mul(v.frobenius, tau);
            }
        }
        out.push_back(GaloisPlace{v.label, v.q, frob, std::move(inertia), v.monodromy});
    } else if (s.degree == 1) {
        for (const std::string& name : derived_labels(v.label, s.count))
            out.push_back(GaloisPlace{name, v.q, v.frobenius, v.inertia, v.monodromy});
    } else {
        out.push_back(GaloisPlace{v.label,
                                  checked_pow_u64(v.q, s.degree, "derived residue cardinality"),
                                  group_pow(g, v.frobenius, s.degree), v.inertia, v.monodromy});
    }
    return out;
}

std::optional<FrobeniusRule> restrict_rule(const GaloisDatum& d, const CyclicExtensionDatum& e) {
    if (!d.rule()) return std::nullopt;
    const FiniteGroup& g = *d.group();
    FrobeniusRule out;
    out.modulus = std::lcm(d.rule()->modulus, e.cutter().modulus());
    for (u64 r : coprime_residues(out.modulus)) {
        std::vector<FrobeniusRule::Entry> entries;
        for (const FrobeniusRule::Entry& base : d.rule()->table.at(r % d.rule()->modulus)) {
            RootOfUnity val = e.cutter().eval(r)->pow(base.degree);
            auto f = static_cast<unsigned>(val.order);
            entries.push_back(FrobeniusRule::Entry{group_pow(g, base.frobenius, f),
                                                   base.degree * f, base.count * (e.degree() / f)});
        }
        out.table[r] = std::move(entries);
    }
    return out;
}

} // namespace

GaloisDatum restrict_datum(const GaloisDatum& d, const CyclicExtensionDatum& e,
                           const CutsTable& cuts) {
    if (e.base_label() != d.field_label())
        fail("DOMAIN", "datum over " + d.field_label() + " cannot restrict along an extension of " +
                           e.base_label());
    std::vector<OneDimChar> cands = pullback_candidates(d, e.cutter());
    if (!cands.empty()) {
        if (d.rule())
            fail("DOMAIN", "the cutting character is cut by the datum's own field");
        fail("DOMAIN",
             "the place evidence cannot certify linear disjointness of the cutting character");
    }
    std::vector<GaloisPlace> places;
    for (const GaloisPlace& v : d.places()) {
        auto it = cuts.find(v.label);
        for (GaloisPlace& w : push_place(d, e, v, it == cuts.end() ? nullptr : &it->second))
            places.push_back(std::move(w));
    }
    if (d.rule()) {
        for (u64 p : newly_ramified_primes(e.cutter().modulus(), d.rule()->modulus,
                                           galois_explicit_primes(d)))
            for (GaloisPlace& v : synth_galois_places(*d.rule(), d.group(), p))
                places.push_back(std::move(v)); // ramified in the extension, data unchanged
    }
    return d.with(e.ext_label(), d.field_degree() * e.degree(), std::move(places),
                  restrict_rule(d, e), d.arch().repeated(e.degree()));
}

// ---------------------------------------------------------------------------
// Base change
// ---------------------------------------------------------------------------

namespace {

// Product of the factor's twists by all powers of the cutting character
// value, expanded in the base variable.
CycPoly twisted_product_poly(const LocalFactor& f, const RootOfUnity& val, unsigned p) {
    CycPoly prod{CycNum::one()};
    for (unsigned j = 0; j < p; ++j)
        prod = poly_mul(prod, f.twisted(val.pow(j)).expand());
    return prod;
}

LocalFactor inert_base_change(const LocalFactor& f, const CyclicExtensionDatum& e, u64 qv) {
    unsigned p = e.degree();
    LocalFactor out = f.extension_power(p);
    check(poly_equal(twisted_product_poly(f, e.value_at(qv), p), poly_inflate(out.expand(), p)),
          "inert base-change product must regroup in the extension variable");
    return out;
}

FormalAutDatum base_change_formal(const FormalAutDatum& d, const CyclicExtensionDatum& e) {
    unsigned p = e.degree();
    std::vector<FormalPlace> places;
    auto push_formal = [&](const FormalPlace& v) {
        PlaceSplitting s = e.splitting_at(v.factor.q());
        if (s.ramified) {
            places.push_back(v);
        } else if (s.degree == 1) {
            for (const std::string& name : derived_labels(v.label, s.count))
                places.push_back(FormalPlace{name, v.factor, v.semistable});
        } else {
            places.push_back(
                FormalPlace{v.label, inert_base_change(v.factor, e, v.factor.q()), v.semistable});
        }
    };
    for (const FormalPlace& v : d.places()) push_formal(v);
    if (d.rule()) {
        for (u64 q : newly_ramified_primes(e.cutter().modulus(), d.rule()->modulus,
                                           formal_explicit_primes(d)))
            for (const FormalPlace& v : synth_formal_places(*d.rule(), q)) push_formal(v);
    }
    std::optional<FormalRule> rule;
    if (d.rule()) {
        FormalRule nr;
        nr.modulus = std::lcm(d.rule()->modulus, e.cutter().modulus());
        for (u64 r : coprime_residues(nr.modulus)) {
            std::vector<FormalRule::Entry> entries;
            for (const FormalRule::Entry& base : d.rule()->table.at(r % d.rule()->modulus)) {
                RootOfUnity val = e.cutter().eval(r)->pow(base.degree);
                auto f = static_cast<unsigned>(val.order);
                FormalRule::Entry ne;
                ne.degree = base.degree * f;
                ne.count = base.count * (p / f);
                for (const SatakeShape& s : base.roots)
                    ne.roots.push_back(SatakeShape{s.unit.pow(f), s.twice_weight});
                entries.push_back(std::move(ne));
            }
            nr.table[r] = std::move(entries);
        }
        rule = std::move(nr);
    }
    EpsilonDatum eps{d.epsilon().w.pow(p), rat_pow(d.epsilon().delta, p)};
    return FormalAutDatum::make(e.ext_label(), d.field_degree() * p, std::move(places),
                                std::move(rule), std::move(eps), d.arch().repeated(p));
}

// The restriction path must reproduce the twisted-product path at every
// explicit place that is unramified on both sides.
void check_galois_base_change(const GaloisDatum& d, const GaloisDatum& restricted,
                              const CyclicExtensionDatum& e) {
    const FiniteGroup& g = *d.group();
    for (const GaloisPlace& v : d.places()) {
        bool unramified = v.inertia.size() == 1 && v.inertia[0] == g.identity() &&
                          v.monodromy.rank() == 0;
        if (!unramified) continue;
        PlaceSplitting s = e.splitting_at(v.q);
        if (s.ramified) continue;
        CycPoly prod = twisted_product_poly(artin_local_factor(d, v), e.value_at(v.q), e.degree());
        CycPoly restr{CycNum::one()};
        for (const std::string& name : derived_labels(v.label, s.count)) {
            LocalFactor fw = artin_local_factor(restricted, restricted.resolve_place(name));
            restr = poly_mul(restr, poly_inflate(fw.expand(), s.degree));
        }
        check(poly_equal(prod, restr),
              "restriction and twisted-product base change disagree at place " + v.label);
    }
}

} // namespace

LData base_change(const LData& pi, const CyclicExtensionDatum& e, const CutsTable& cuts) {
    if (field_label(pi) != e.base_label())
        fail("DOMAIN", "datum over " + field_label(pi) + " cannot base-change along an extension of " +
                           e.base_label());
    if (const auto* g = std::get_if<GaloisDatum>(&pi)) {
        GaloisDatum restricted = restrict_datum(*g, e, cuts);
        check_galois_base_change(*g, restricted, e);
        return restricted;
    }
    return base_change_formal(std::get<FormalAutDatum>(pi), e);
}

// ---------------------------------------------------------------------------
// Partial Dirichlet series
// ---------------------------------------------------------------------------

std::vector<CycNum> partial_l_series(const LData& pi, u64 cutoff, ExecPolicy policy) {
    std::vector<CycNum> a(cutoff + 1, CycNum::zero());
    if (cutoff >= 1) a[1] = CycNum::one();
    for (const PlaceFactor& pf : local_factors_up_to(pi, cutoff)) {
        u64 q = pf.factor.q();
        std::vector<u64> qpow{1};
        while (qpow.back() <= cutoff / q) qpow.push_back(qpow.back() * q);
        size_t jmax = qpow.size() - 1;
        if (jmax == 0) continue;

        CycPoly c = pf.factor.expand();
        std::vector<CycNum> b(jmax + 1, CycNum::zero());
        b[0] = CycNum::one();
        for (size_t j = 1; j <= jmax; ++j) {
            CycNum s = CycNum::zero();
            for (size_t k = 1; k < c.size() && k <= j; ++k) s = s + c[k] * b[j - k];
            b[j] = -s;
        }

        std::vector<CycNum> next(cutoff + 1, CycNum::zero());
        auto fold = [&](u64 m) {
            CycNum s = CycNum::zero();
            for (size_t j = 0; j <= jmax && qpow[j] <= m; ++j)
                if (m % qpow[j] == 0) s = s + b[j] * a[m / qpow[j]];
            next[m] = s;
        };
        if (policy == ExecPolicy::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
            for (long long m = 1; m <= static_cast<long long>(cutoff); ++m)
                fold(static_cast<u64>(m));
        } else {
            for (u64 m = 1; m <= cutoff; ++m) fold(m);
        }
        a.swap(next);
    }
    return a;
}

} // namespace semilift
