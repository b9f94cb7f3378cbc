#include "semilift/reduction.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "semilift/error.hpp"
#include "semilift/numtheory.hpp"
#include "semilift/representation.hpp"

namespace semilift {

bool ram_less(const RamModulus& a, const RamModulus& b) {
    return std::tie(a.group_order, a.prime) < std::tie(b.group_order, b.prime);
}

const std::vector<InertiaCut>& LocalTrivializer::cuts_for(unsigned p) const {
    for (const auto& [prime, list] : cuts)
        if (prime == p) return list;
    fail("DOMAIN", "no invariant cut of order " + std::to_string(p));
}

namespace {

// ---------------------------------------------------------------------------
// Local trivializers
// ---------------------------------------------------------------------------

void check_solvable(std::shared_ptr<const FiniteGroup> g, const std::string& where) {
    while (g->size() > 1) {
        std::vector<unsigned> c = g->commutator_subgroup();
        if (c.size() == g->size())
            fail("DOMAIN", "inertia image is not solvable at " + where);
        g = g->subgroup(c).group;
    }
}

unsigned root_exponent(const RootOfUnity& v, unsigned p) {
    if (v.order == 1) return 0;
    return static_cast<unsigned>(v.exp * (p / v.order) % p);
}

} // namespace

LocalTrivializer minimal_local_trivializer(const GaloisDatum& d, const GaloisPlace& v) {
    if (semistable_at(d, v)) fail("DOMAIN", "place " + v.label + " is semistable");
    const FiniteGroup& g = *d.group();
    const CycMatrix id = CycMatrix::identity(d.rho().dim());

    std::vector<unsigned> kernel_sub; // labels within the inertia subgroup
    for (size_t i = 0; i < v.inertia.size(); ++i)
        if (d.rho().image(v.inertia[i]) == id) kernel_sub.push_back(static_cast<unsigned>(i));
    FiniteGroup::Subgroup inertia = g.subgroup(v.inertia);
    FiniteGroup::Quotient image = inertia.group->quotient(kernel_sub);
    check_solvable(image.group, v.label);

    LocalTrivializer out;
    out.order = image.group->size();

    // The index of each inertia label within the subgroup listing.
    std::map<unsigned, unsigned> position;
    for (size_t i = 0; i < v.inertia.size(); ++i)
        position[v.inertia[i]] = static_cast<unsigned>(i);

    for (const auto& [p, mult] : factor(out.order)) {
        (void)mult;
        std::vector<InertiaCut> list;
        for (const OneDimChar& chi : all_linear_characters(image.group)) {
            if (chi.order() != p) continue;
            InertiaCut cut;
            for (unsigned x : v.inertia)
                cut.theta[x] =
                    root_exponent(chi.value(image.proj[position[x]]), static_cast<unsigned>(p));
            bool invariant = true;
            for (unsigned x : v.inertia)
                if (cut.theta[g.conjugate(v.frobenius, x)] != cut.theta[x]) {
                    invariant = false;
                    break;
                }
            if (invariant) list.push_back(std::move(cut));
        }
        if (!list.empty()) out.cuts.emplace_back(static_cast<unsigned>(p), std::move(list));
    }
    if (out.cuts.empty())
        fail("DOMAIN", "no Frobenius-invariant prime-order cut at place " + v.label);
    out.least_prime = out.cuts.front().first;
    return out;
}

RamReport ramification_modulus(const GaloisDatum& d) {
    RamReport out;
    std::vector<std::pair<std::pair<u64, std::string>, RamModulus>> bad;
    for (const GaloisPlace& v : d.places()) {
        if (semistable_at(d, v)) continue;
        LocalTrivializer t = minimal_local_trivializer(d, v);
        bad.push_back({{v.q, v.label}, RamModulus{t.order, t.least_prime}});
    }
    if (bad.empty()) return out;
    RamModulus best = bad.front().second;
    for (const auto& [key, m] : bad)
        if (ram_less(best, m)) best = m;
    out.modulus = best;
    std::sort(bad.begin(), bad.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [key, m] : bad)
        if (m == best) out.worst.push_back(key.second);
    return out;
}

namespace {

// ---------------------------------------------------------------------------
// Prime bookkeeping
// ---------------------------------------------------------------------------

std::set<u64> support_primes(const GaloisDatum& d) {
    std::set<u64> out;
    for (const GaloisPlace& v : d.places()) out.insert(prime_power_base(v.q));
    if (d.rule())
        for (const auto& [p, e] : factor(d.rule()->modulus)) {
            (void)e;
            out.insert(p);
        }
    return out;
}

u64 next_prime_where(u64 start, const std::function<bool(u64)>& ok) {
    for (u64 n = start;; ++n)
        if (is_prime(n) && ok(n)) return n;
}

// The smallest primitive character of p-power modulus and order exactly p:
// generator exponents are scanned lexicographically over minimal moduli.
DirichletCharacter canonical_ramified_component(u64 ell, u64 p) {
    for (u64 modulus = ell;; modulus *= ell) {
        check(modulus <= (u64(1) << 40), "ramified component modulus overflow");
        if (totient(modulus) % p != 0) continue;
        std::vector<UnitGenerator> gens = unit_group_generators(modulus);
        std::vector<u64> exps(gens.size(), 0);
        while (true) {
            size_t i = gens.size();
            while (i > 0 && exps[i - 1] + 1 == p) exps[--i] = 0;
            if (i == 0) break;
            ++exps[i - 1];
            std::vector<RootOfUnity> values;
            for (u64 e : exps) values.push_back(RootOfUnity::make(static_cast<long long>(e), p));
            DirichletCharacter chi = DirichletCharacter::from_values(modulus, values);
            if (chi.order() == p && chi.is_primitive()) return chi;
        }
    }
}

bool rotation_stable(const LocalFactor& f, unsigned p) {
    return f == f.twisted(RootOfUnity::make(1, p));
}

// Unramified monodromy-free places whose factor visibly changes under a
// twist of order p, listed by ascending residue prime (one per prime).
std::vector<std::pair<u64, GaloisPlace>> scan_discriminators(const GaloisDatum& d, unsigned p,
                                                             const std::set<u64>& exclude,
                                                             size_t count, u64 bound) {
    std::vector<std::pair<u64, GaloisPlace>> out;
    std::set<u64> seen;
    for (const GaloisPlace& v : d.places_up_to(bound)) {
        if (out.size() >= count) break;
        u64 ell = prime_power_base(v.q);
        if (exclude.count(ell) || seen.count(ell)) continue;
        if (!v.inertia.empty() &&
            !(v.inertia.size() == 1 && v.inertia[0] == d.group()->identity()))
            continue;
        if (v.monodromy.rank() != 0) continue;
        unsigned f = 0;
        for (u64 q = ell; q <= v.q; q *= ell) ++f;
        if (f % p == 0) continue;
        LocalFactor factor = artin_local_factor(d, v);
        if (factor.degree() == 0 || rotation_stable(factor, p)) continue;
        seen.insert(ell);
        out.push_back({ell, v});
    }
    return out;
}

// The first resolvable unramified place at which every nontrivial self-twist
// character of the datum takes a value of full order.
u64 find_self_twist_separator(const GaloisDatum& d, const std::vector<OneDimChar>& twists,
                              const std::set<u64>& exclude, u64 bound) {
    for (const GaloisPlace& v : d.places_up_to(bound)) {
        u64 ell = prime_power_base(v.q);
        if (exclude.count(ell)) continue;
        if (!semistable_at(d, v)) continue;
        bool full = true;
        for (const OneDimChar& psi : twists)
            if (psi.value(v.frobenius).order != psi.order()) {
                full = false;
                break;
            }
        if (full) return ell;
    }
    fail("DOMAIN", "no place separates the self-twist characters of " + d.field_label());
}

std::vector<OneDimChar> nontrivial_self_twists(const Representation& rho) {
    std::vector<OneDimChar> out;
    for (const OneDimChar& psi : self_twist_characters(rho))
        if (!psi.is_trivial()) out.push_back(psi);
    return out;
}

// A prime at which the pullback of psi provably differs from the value 1,
// so prescribing chi to be trivial there separates chi from the pullback.
std::optional<u64> find_pullback_separator(const GaloisDatum& d, const OneDimChar& psi,
                                           const std::set<u64>& used, u64 bound) {
    if (d.rule()) {
        for (u64 r = 2; r <= bound; ++r) {
            if (!is_prime(r) || used.count(r)) continue;
            if (std::gcd(r, d.rule()->modulus) != 1) continue;
            const auto& entries = d.rule()->table.at(r % d.rule()->modulus);
            bool all_nontrivial = true;
            for (const auto& e : entries)
                if (psi.value(e.frobenius).is_one()) {
                    all_nontrivial = false;
                    break;
                }
            if (all_nontrivial) return r;
        }
        return std::nullopt;
    }
    for (const GaloisPlace& v : d.places()) {
        u64 ell = prime_power_base(v.q);
        if (used.count(ell) || !semistable_at(d, v)) continue;
        if (!psi.value(v.frobenius).is_one()) return ell;
    }
    return std::nullopt;
}

} // namespace

ReductionStep build_reduction_step(const GaloisDatum& d, u64 probe, const StepOptions& opts) {
    RamReport rep = ramification_modulus(d);
    if (!rep.modulus) fail("DOMAIN", "datum is semistable everywhere; nothing to reduce");
    const unsigned p = rep.modulus->prime;
    const std::set<u64> support = support_primes(d);

    std::set<u64> worst_primes;
    std::vector<GaloisPlace> worst_places;
    for (const std::string& label : rep.worst) {
        GaloisPlace v = d.resolve_place(label);
        worst_primes.insert(prime_power_base(v.q));
        worst_places.push_back(std::move(v));
    }

    if (!is_prime(probe)) fail("DOMAIN", "probe must be prime");
    if (support.count(probe)) fail("DOMAIN", "probe prime meets the datum support");

    std::set<u64> taken = support;
    taken.insert(probe);
    for (u64 s : opts.split_primes) taken.insert(s);

    u64 v0 = opts.v0 ? opts.v0 : next_prime_where(2, [&](u64 n) { return !taken.count(n); });
    if (taken.count(v0)) fail("DOMAIN", "reserved prime collides with the construction");
    taken.insert(v0);

    // Only primes whose character value is pinned elsewhere are barred from
    // the scans below; other support primes host usable places.
    std::set<u64> pinned = worst_primes;
    pinned.insert(v0);
    pinned.insert(probe);
    for (u64 s : opts.split_primes) pinned.insert(s);

    u64 discriminator = opts.discriminator;
    if (!discriminator) {
        auto found = scan_discriminators(d, p, pinned, 1, 20000);
        if (found.empty()) fail("DOMAIN", "no discriminating place available");
        discriminator = found.front().first;
    }
    pinned.insert(discriminator);
    taken.insert(discriminator);

    std::vector<OneDimChar> twists = nontrivial_self_twists(d.rho());
    u64 w0 = twists.empty() ? next_prime_where(2, [&](u64 n) { return !taken.count(n); })
                            : find_self_twist_separator(d, twists, pinned, 20000);
    taken.insert(w0);

    CutsTable cuts;
    for (const std::string& label : rep.worst) {
        GaloisPlace v = d.resolve_place(label);
        cuts[label] = minimal_local_trivializer(d, v).cuts_for(p).front();
    }

    std::vector<gw::LocalPrescription> want;
    for (u64 ell : worst_primes)
        want.push_back(gw::LocalPrescription::ramified_at(canonical_ramified_component(ell, p)));
    std::set<u64> split{probe, w0};
    for (u64 s : opts.split_primes) split.insert(s);
    for (u64 s : split)
        want.push_back(gw::LocalPrescription::unramified(s, RootOfUnity::make(0, 1)));
    want.push_back(gw::LocalPrescription::unramified(discriminator, RootOfUnity::make(1, p)));
    std::sort(want.begin(), want.end(),
              [](const gw::LocalPrescription& a, const gw::LocalPrescription& b) { return a.p < b.p; });

    // Auxiliary primes must stay clear of the datum's places so the step
    // character creates new ramification only at fresh primes; primes that
    // already carry a prescription are constrained explicitly and may not
    // also be listed as forbidden.
    std::set<u64> prescribed;
    for (const gw::LocalPrescription& pr : want) prescribed.insert(pr.p);
    std::vector<u64> avoid{v0};
    for (u64 s : support)
        if (!worst_primes.count(s) && !prescribed.count(s)) avoid.push_back(s);
    std::sort(avoid.begin(), avoid.end());

    auto solve_now = [&]() -> DirichletCharacter {
        gw::Outcome outcome = gw::solve(want, p, avoid);
        if (auto* inf = std::get_if<gw::Infeasible>(&outcome))
            fail("INFEASIBLE", "no suitable character: " + inf->reason);
        DirichletCharacter chi = std::get<DirichletCharacter>(outcome);
        check(chi.order() == p, "solver character has the wrong order");
        for (const gw::LocalPrescription& pr : want)
            check(pr.matches(chi), "solver character violates a prescription");
        return chi;
    };

    DirichletCharacter chi = solve_now();
    size_t distinct_linear = all_linear_characters(d.group()).size();
    for (size_t round = 0; round <= distinct_linear; ++round) {
        std::vector<OneDimChar> survivors = pullback_candidates(d, chi);
        if (survivors.empty()) break;
        if (round == distinct_linear)
            fail("DOMAIN", "cannot separate the character from a degree-one pullback");
        std::set<u64> used = taken;
        for (const gw::LocalPrescription& pr : want) used.insert(pr.p);
        for (u64 a : avoid) used.insert(a);
        auto sep = find_pullback_separator(d, survivors.front(), used, 20000);
        if (!sep) fail("DOMAIN", "cannot separate the character from a degree-one pullback");
        want.push_back(gw::LocalPrescription::unramified(*sep, RootOfUnity::make(0, 1)));
        std::sort(want.begin(), want.end(), [](const gw::LocalPrescription& a,
                                               const gw::LocalPrescription& b) { return a.p < b.p; });
        chi = solve_now();
    }

    CyclicExtensionDatum ext = CyclicExtensionDatum::make(
        d.field_label(), d.field_label() + ".w" + std::to_string(probe), chi);
    GaloisDatum restricted = restrict_datum(d, ext, cuts);

    RamReport after = ramification_modulus(restricted);
    check(!after.modulus || ram_less(*after.modulus, *rep.modulus),
          "reduction step failed to shrink the ramification modulus");
    return ReductionStep{std::move(chi),  std::move(ext), std::move(cuts),
                         probe,           v0,             w0,
                         discriminator,   std::move(want), std::move(restricted)};
}

// ---------------------------------------------------------------------------
// Descent
// ---------------------------------------------------------------------------

namespace {

// Place-by-place agreement of a candidate's base change with a branch
// table. Places where the extension ramifies and either side is flagged
// non-semistable are outside the contract (the formal ramified clause
// cannot see a correlated inertia drop); everything else is exact.
bool tables_agree(const FormalAutDatum& bc, const FormalAutDatum& obj,
                  const CyclicExtensionDatum& ext) {
    if (bc.field_label() != obj.field_label() || bc.field_degree() != obj.field_degree())
        return false;
    if (!(bc.arch() == obj.arch()) || !(bc.epsilon() == obj.epsilon())) return false;
    if (bc.rule().has_value() != obj.rule().has_value()) return false;
    if (bc.rule() && !(*bc.rule() == *obj.rule())) return false;

    std::map<std::string, const FormalPlace*> left, right;
    for (const FormalPlace& v : bc.places()) left[v.label] = &v;
    for (const FormalPlace& v : obj.places()) right[v.label] = &v;
    if (left.size() != right.size()) return false;
    for (const auto& [label, a] : left) {
        auto it = right.find(label);
        if (it == right.end()) return false;
        const FormalPlace* b = it->second;
        if (a->factor.q() != b->factor.q()) return false;
        if (ext.splitting_at(a->factor.q()).ramified && (!a->semistable || !b->semistable))
            continue;
        if (!(a->factor == b->factor) || a->semistable != b->semistable) return false;
    }
    return true;
}

// Multiset signature of the semistable part of a table, for comparing the
// two routes to a compositum (labels differ between routes). Places whose
// base prime divides `skip_modulus` are left out: those primes ramify in
// one of the two cyclic layers, so the routes list them asymmetrically.
std::vector<std::string> cross_signature(const FormalAutDatum& t, u64 skip_modulus) {
    std::vector<std::string> sig;
    for (const FormalPlace& v : t.places()) {
        if (!v.semistable) continue;
        if (skip_modulus % prime_power_base(v.factor.q()) == 0) continue;
        sig.push_back(std::to_string(v.factor.q()) + "|" + v.factor.to_string());
    }
    std::sort(sig.begin(), sig.end());
    return sig;
}

// Copy of a table with any global rule removed; the pairwise compositum
// comparison works place-by-place, and composing two branch rules would
// materialize a table at the product of their moduli.
FormalAutDatum drop_rule(const FormalAutDatum& t) {
    return FormalAutDatum::make(t.field_label(), t.field_degree(), t.places(), std::nullopt,
                                t.epsilon(), t.arch());
}

std::string compositum_label(const std::string& a, const std::string& b) {
    return a < b ? "comp(" + a + "," + b + ")" : "comp(" + b + "," + a + ")";
}

} // namespace

DescentOutcome descend(const FormalAutDatum& seed, const std::vector<DescentObject>& objects) {
    if (objects.size() < 2) fail("DOMAIN", "descent needs at least two branch objects");
    for (const DescentObject& o : objects)
        if (o.extension.base_label() != seed.field_label())
            fail("DOMAIN", "branch extension is not over the seed's field");

    const DirichletCharacter& chi1 = objects.front().extension.cutter();
    const unsigned p1 = objects.front().extension.degree();

    std::vector<std::pair<unsigned, FormalAutDatum>> matches;
    for (unsigned j = 0; j < p1; ++j) {
        FormalAutDatum cand = std::get<FormalAutDatum>(
            twist_ldata(LData(seed), chi1.pow(static_cast<long long>(j))));
        bool ok = true;
        for (const DescentObject& o : objects) {
            // Rule presence and modulus must line up before anything else;
            // checking them first avoids materializing a composed table at
            // lcm(candidate modulus, cutter modulus), which is enormous
            // exactly when the moduli cannot agree.
            if (cand.rule().has_value() != o.table.rule().has_value()) {
                ok = false;
                break;
            }
            if (cand.rule() && std::lcm(cand.rule()->modulus, o.extension.cutter().modulus()) !=
                                   o.table.rule()->modulus) {
                ok = false;
                break;
            }
            FormalAutDatum bc = std::get<FormalAutDatum>(base_change(LData(cand), o.extension));
            if (!tables_agree(bc, o.table, o.extension)) {
                ok = false;
                break;
            }
        }
        if (ok) matches.push_back({j, std::move(cand)});
    }

    if (objects.size() > 2) {
        for (size_t i = 0; i < objects.size(); ++i) {
            for (size_t j = i + 1; j < objects.size(); ++j) {
                const DescentObject& a = objects[i];
                const DescentObject& b = objects[j];
                std::string label =
                    compositum_label(a.extension.ext_label(), b.extension.ext_label());
                CyclicExtensionDatum up_a = CyclicExtensionDatum::make(
                    a.extension.ext_label(), label, b.extension.cutter());
                CyclicExtensionDatum up_b = CyclicExtensionDatum::make(
                    b.extension.ext_label(), label, a.extension.cutter());
                u64 skip = std::lcm(a.extension.cutter().modulus(),
                                    b.extension.cutter().modulus());
                auto via_a = cross_signature(
                    std::get<FormalAutDatum>(base_change(LData(drop_rule(a.table)), up_a)), skip);
                auto via_b = cross_signature(
                    std::get<FormalAutDatum>(base_change(LData(drop_rule(b.table)), up_b)), skip);
                if (via_a != via_b)
                    fail("NODESCENT", "branch tables disagree over " + label);
            }
        }
    }

    if (matches.empty()) fail("NODESCENT", "no twist of the seed matches every branch table");
    if (matches.size() > 1)
        fail("AMBIGUOUS", "multiple twists of the seed match; the branch fields cannot be "
                          "linearly disjoint");
    return DescentOutcome{std::move(matches.front().second), matches.front().first};
}

// ---------------------------------------------------------------------------
// The driver
// ---------------------------------------------------------------------------

namespace {

void verify_leaf_lift(const GaloisDatum& d, const FormalAutDatum& lift) {
    if (!(lift == formal_image(d)))
        fail("LIFTER", "lift disagrees with the datum at a semistable place of " +
                           d.field_label());
}

FormalAutDatum run_core(const GaloisDatum& d, const Lifter& lifter, const ReductionOptions& opts,
                        u64 v0, ReductionNode& node, unsigned depth) {
    check(depth < 32, "reduction recursion exceeded the structural bound");
    RamReport rep = ramification_modulus(d);
    node.field_label = d.field_label();
    node.modulus = rep.modulus;
    node.worst = rep.worst;

    if (!rep.modulus) {
        FormalAutDatum lift = lifter(d);
        verify_leaf_lift(d, lift);
        node.leaf_lift = lift;
        return lift;
    }

    const unsigned p = rep.modulus->prime;
    std::set<u64> support = support_primes(d);
    std::set<u64> worst_primes;
    for (const std::string& label : rep.worst)
        worst_primes.insert(prime_power_base(d.resolve_place(label).q));

    std::vector<u64> probes;
    {
        u64 n = 2;
        while (probes.size() < opts.probe_budget) {
            n = next_prime_where(n, [&](u64 m) { return !support.count(m) && m != v0; });
            probes.push_back(n++);
        }
    }
    std::set<u64> exclude = worst_primes;
    exclude.insert(v0);
    for (u64 w : probes) exclude.insert(w);
    auto discs = scan_discriminators(d, p, exclude, probes.size(), 20000);

    std::vector<FormalAutDatum> lifts;
    for (size_t i = 0; i < probes.size() && node.steps.size() < opts.branches; ++i) {
        if (i >= discs.size()) {
            node.failed_probes.push_back({probes[i], "no discriminating place available"});
            continue;
        }
        StepOptions sopts;
        sopts.v0 = v0;
        sopts.discriminator = discs[i].first;
        for (size_t j = 0; j < probes.size(); ++j)
            if (j != i) {
                sopts.split_primes.push_back(probes[j]);
                if (j < discs.size()) sopts.split_primes.push_back(discs[j].first);
            }
        try {
            ReductionStep step = build_reduction_step(d, probes[i], sopts);
            auto child = std::make_unique<ReductionNode>();
            lifts.push_back(run_core(step.restricted, lifter, opts, v0, *child, depth + 1));
            node.steps.push_back(std::move(step));
            node.children.push_back(std::move(child));
        } catch (const Error& e) {
            if (e.code() == "INTERNAL" || e.code() == "LIFTER" || e.code() == "BUDGET") throw;
            node.failed_probes.push_back({probes[i], e.what()});
        }
    }
    if (node.steps.size() < opts.branches) {
        std::string detail;
        for (const auto& [w, reason] : node.failed_probes)
            detail += " [" + std::to_string(w) + ": " + reason + "]";
        fail("BUDGET", "probe budget exhausted over " + d.field_label() + detail);
    }

    FormalAutDatum seed = formal_image(d);
    std::vector<DescentObject> objects;
    for (size_t i = 0; i < node.steps.size(); ++i)
        objects.push_back(DescentObject{node.steps[i].extension, lifts[i]});
    DescentOutcome outcome = descend(seed, objects);
    check(outcome.orbit_index == 0, "the assembled seed must itself be the descent");

    for (const GaloisPlace& v : d.places()) {
        bool unramified = v.monodromy.rank() == 0 &&
                          v.inertia.size() == 1 && v.inertia[0] == d.group()->identity();
        if (unramified)
            check(outcome.descent.resolve_place(v.label).factor == artin_local_factor(d, v),
                  "descended lift deviates from the local data at " + v.label);
    }
    return outcome.descent;
}

void render_node(const ReductionNode& node, std::string indent, std::string& out) {
    if (node.leaf_lift) {
        out += indent + "leaf " + node.field_label + "\n";
        std::string body = describe(*node.leaf_lift);
        size_t pos = 0;
        while (pos < body.size()) {
            size_t nl = body.find('\n', pos);
            out += indent + "  " + body.substr(pos, nl - pos) + "\n";
            pos = nl + 1;
        }
        return;
    }
    out += indent + "node " + node.field_label + "\n";
    out += indent + "  modulus |H|=" + std::to_string(node.modulus->group_order) +
           " p=" + std::to_string(node.modulus->prime) + "\n";
    out += indent + "  worst";
    for (const std::string& w : node.worst) out += " " + w;
    out += "\n";
    for (const auto& [prime, reason] : node.failed_probes)
        out += indent + "  failed probe " + std::to_string(prime) + ": " + reason + "\n";
    for (size_t i = 0; i < node.steps.size(); ++i) {
        const ReductionStep& s = node.steps[i];
        out += indent + "  step probe=" + std::to_string(s.probe) + " v0=" +
               std::to_string(s.v0) + " w0=" + std::to_string(s.w0) +
               " discriminator=" + std::to_string(s.discriminator) + "\n";
        for (const gw::LocalPrescription& pr : s.prescriptions)
            out += indent + "    prescription " + pr.to_string() + "\n";
        out += indent + "    character " + s.character.to_string() + "\n";
        for (const auto& [label, cut] : s.cuts) {
            out += indent + "    cut " + label + ":";
            for (const auto& [x, k] : cut.theta)
                out += " " + std::to_string(x) + "->" + std::to_string(k);
            out += "\n";
        }
        render_node(*node.children[i], indent + "    ", out);
    }
}

} // namespace

std::string render_certificate(const ReductionNode& root, const FormalAutDatum& lift) {
    std::string out = "reduction certificate\n";
    render_node(root, "", out);
    out += "final\n";
    std::string body = describe(lift);
    size_t pos = 0;
    while (pos < body.size()) {
        size_t nl = body.find('\n', pos);
        out += "  " + body.substr(pos, nl - pos) + "\n";
        pos = nl + 1;
    }
    return out;
}

ReductionOutcome run_reduction(const GaloisDatum& d, const Lifter& lifter,
                               const ReductionOptions& options) {
    if (options.branches < 2) fail("DOMAIN", "descent requires at least two branches");
    if (options.probe_budget < options.branches)
        fail("DOMAIN", "probe budget below the branch requirement");
    std::set<u64> support = support_primes(d);
    u64 v0 = options.v0 ? options.v0
                        : next_prime_where(2, [&](u64 n) { return !support.count(n); });

    auto root = std::make_unique<ReductionNode>();
    FormalAutDatum lift = run_core(d, lifter, options, v0, *root, 0);

    if (options.cross_check_v0) {
        u64 v0b = next_prime_where(v0 + 1, [&](u64 n) { return !support.count(n); });
        ReductionNode again;
        FormalAutDatum lift2 = run_core(d, lifter, options, v0b, again, 0);
        check(lift2 == lift, "the lift changed under a different reserved prime");
    }
    std::string text = render_certificate(*root, lift);
    return ReductionOutcome{std::move(root), std::move(lift), std::move(text)};
}

bool replay_matches(const GaloisDatum& d, const std::string& recorded, const Lifter& lifter,
                    const ReductionOptions& options) {
    return run_reduction(d, lifter, options).certificate_text == recorded;
}

} // namespace semilift
