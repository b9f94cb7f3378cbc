#include "semilift/grunwald_wang.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>
#include <sstream>

#include "semilift/error.hpp"

namespace semilift {
namespace gw {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

u64 parse_u64(std::string_view s, const char* what) {
    s = trim(s);
    if (s.empty()) fail("PARSE_ERROR", std::string("empty ") + what);
    u64 v = 0;
    for (char ch : s) {
        if (!std::isdigit(static_cast<unsigned char>(ch)))
            fail("PARSE_ERROR", std::string("bad ") + what + ": '" + std::string(s) + "'");
        v = v * 10 + static_cast<u64>(ch - '0');
    }
    return v;
}

// Discrete log of q modulo the odd prime ell for the canonical generator.
u64 prime_index(u64 ell, u64 q) {
    u64 g = primitive_root(ell);
    u64 target = q % ell;
    check(target != 0, "index of a multiple of the prime");
    u64 cur = 1;
    for (u64 e = 0; e < ell - 1; ++e) {
        if (cur == target) return e;
        cur = mul_mod(cur, g, ell);
    }
    fail("INTERNAL", "discrete log not found for a unit");
}

// Character mod ell (prime, ell = 1 mod m) with value zeta_m^x on the
// canonical generator; x = 0 yields the trivial block and is rejected.
DirichletCharacter cyclic_block(u64 ell, u64 m, u64 x) {
    check(x % m != 0, "cyclic block must be nontrivial");
    return DirichletCharacter::from_values(ell, {RootOfUnity::make(static_cast<long long>(x), m)});
}

struct Residual {
    u64 p;
    RootOfUnity need;
};

} // namespace

LocalPrescription LocalPrescription::unramified(u64 p, RootOfUnity required_value) {
    if (!is_prime(p)) fail("DOMAIN", "prescription prime expected, got " + std::to_string(p));
    LocalPrescription out;
    out.p = p;
    out.ramified = false;
    out.value = required_value;
    return out;
}

LocalPrescription LocalPrescription::ramified_at(DirichletCharacter component) {
    u64 n = component.modulus();
    u64 p = prime_power_base(n);
    if (p == 0 || n == 1) fail("DOMAIN", "ramified component needs a prime-power modulus");
    if (component.conductor() != n)
        fail("DOMAIN", "ramified component must be primitive (conductor " +
                           std::to_string(component.conductor()) + " of modulus " +
                           std::to_string(n) + ")");
    LocalPrescription out;
    out.p = p;
    out.ramified = true;
    out.component = std::move(component);
    return out;
}

bool LocalPrescription::matches(const DirichletCharacter& chi) const {
    u64 c = chi.conductor();
    if (!ramified) {
        if (c % p == 0) return false;
        auto v = chi.primitive_core().eval(p);
        return v.has_value() && *v == value;
    }
    if (chi.modulus() % p != 0 || c % p != 0) return false;
    return chi.p_component(p).primitive_core() == *component;
}

std::string LocalPrescription::to_string() const {
    std::ostringstream os;
    os << "at " << p << " ";
    if (!ramified) {
        os << "unram order " << value.order << " value " << value.to_string();
    } else {
        os << "ram mod " << component->modulus() << " values";
        const auto& vals = component->values();
        for (size_t i = 0; i < vals.size(); ++i) os << (i ? ", " : " ") << vals[i].to_string();
    }
    return os.str();
}

LocalPrescription LocalPrescription::parse(std::string_view text) {
    std::istringstream is{std::string(trim(text))};
    std::string word;
    auto expect = [&](const char* w) {
        if (!(is >> word) || word != w)
            fail("PARSE_ERROR", std::string("expected '") + w + "' in prescription");
    };
    expect("at");
    std::string ptext;
    if (!(is >> ptext)) fail("PARSE_ERROR", "missing prime");
    u64 p = parse_u64(ptext, "prime");
    if (!(is >> word)) fail("PARSE_ERROR", "missing prescription kind");
    if (word == "unram") {
        expect("order");
        std::string otext;
        if (!(is >> otext)) fail("PARSE_ERROR", "missing order");
        u64 d = parse_u64(otext, "order");
        expect("value");
        std::string rest;
        std::getline(is, rest);
        RootOfUnity z = RootOfUnity::parse(rest);
        if (z.order != d)
            fail("PARSE_ERROR", "declared order " + std::to_string(d) +
                                    " does not match value order " + std::to_string(z.order));
        return unramified(p, z);
    }
    if (word == "ram") {
        expect("mod");
        std::string qtext;
        if (!(is >> qtext)) fail("PARSE_ERROR", "missing modulus");
        u64 q = parse_u64(qtext, "modulus");
        if (prime_power_base(q) != p)
            fail("PARSE_ERROR", "ramified modulus must be a power of the prescribed prime");
        expect("values");
        std::string rest;
        std::getline(is, rest);
        rest = std::string(trim(rest));
        std::vector<RootOfUnity> vals;
        if (!rest.empty()) {
            size_t start = 0;
            int depth = 0;
            for (size_t i = 0; i <= rest.size(); ++i) {
                if (i == rest.size() || (rest[i] == ',' && depth == 0)) {
                    vals.push_back(RootOfUnity::parse(
                        std::string_view(rest).substr(start, i - start)));
                    start = i + 1;
                } else if (rest[i] == '(') {
                    ++depth;
                } else if (rest[i] == ')') {
                    --depth;
                }
            }
        }
        return ramified_at(DirichletCharacter::from_values(q, std::move(vals)));
    }
    fail("PARSE_ERROR", "prescription kind must be 'unram' or 'ram'");
}

SpecialCaseReport special_case_check(const std::vector<LocalPrescription>& prescriptions, u64 m) {
    SpecialCaseReport report;
    report.is_special =
        m % 8 == 0 && std::any_of(prescriptions.begin(), prescriptions.end(),
                                  [](const LocalPrescription& q) { return q.p == 2; });
    if (m % 2 != 0) return report;
    // a0 = (1+i)^m = 2^{m/2} once 4 | m; local evaluations:
    //   unramified at 2: eta(2)^{m/2} (valuation of a0),
    //   ramified at odd p: component(2)^{m/2} (a0 is the unit 2^{m/2}),
    //   ramified at 2: unit part of a0 is 1; unramified odd: valuation 0.
    CycNum prod = CycNum::one();
    for (const auto& q : prescriptions) {
        if (q.p == 2 && !q.ramified) {
            prod = prod * q.value.pow(static_cast<long long>(m / 2)).to_cycnum();
        } else if (q.p != 2 && q.ramified) {
            auto v = q.component->eval(2);
            check(v.has_value(), "2 is a unit at odd ramified components");
            prod = prod * v->pow(static_cast<long long>(m / 2)).to_cycnum();
        }
    }
    report.a0_product = prod;
    return report;
}

namespace {

struct SolveContext {
    std::vector<LocalPrescription> pres;
    u64 m;
    std::set<u64> support;
    std::set<u64> avoid;
    SolveOptions options;
};

Outcome solve_impl(SolveContext ctx);

// Candidate auxiliary primes: ell = 1 (mod block), prime, outside the
// support and avoid sets, ascending.
std::vector<u64> aux_candidates(const SolveContext& ctx, const std::set<u64>& extra, u64 block) {
    std::vector<u64> out;
    for (u64 ell = block + 1; ell <= ctx.options.aux_bound; ell += block) {
        if (ell < 3 || !is_prime(ell)) continue;
        if (ctx.support.count(ell) || ctx.avoid.count(ell) || extra.count(ell)) continue;
        out.push_back(ell);
    }
    return out;
}

Infeasible infeasible_with_fallback(const SolveContext& ctx, std::string reason) {
    Infeasible inf;
    inf.reason = std::move(reason);
    if (ctx.options.report_doubled) {
        SolveContext doubled = ctx;
        doubled.m = 2 * ctx.m;
        doubled.options.report_doubled = false;
        auto out = solve_impl(std::move(doubled));
        if (auto* chi = std::get_if<DirichletCharacter>(&out)) inf.order_doubled = std::move(*chi);
    }
    return inf;
}

Outcome solve_impl(SolveContext ctx) {
    const u64 m = ctx.m;

    auto special = special_case_check(ctx.pres, m);
    if (special.is_special && !(special.a0_product == CycNum::one())) {
        // Auxiliary-place repair would need a ramified component at some
        // v0 = 1 (mod 8) whose value at 2 has odd index; but 2 is a square
        // modulo every such v0, so the bounded scan below cannot succeed
        // and the instance is genuinely infeasible at order m.
        unsigned scanned = 0;
        for (u64 v0 : aux_candidates(ctx, {}, ctx.m)) {
            if (v0 % 8 != 1 || scanned >= 25) continue;
            ++scanned;
            if (prime_index(v0, 2) % 2 == 1)
                fail("INTERNAL", "auxiliary repair contradicts quadratic reciprocity");
        }
        return infeasible_with_fallback(
            ctx, "order-exactness obstruction at 2: the a0 product is " +
                     special.a0_product.to_string() + ", and no auxiliary place can repair it");
    }

    // Ramified base via CRT over the prescribed components.
    DirichletCharacter chi = DirichletCharacter::trivial();
    for (const auto& q : ctx.pres)
        if (q.ramified) chi = chi.times_coprime(*q.component);

    // Residual unramified requirements.
    std::vector<Residual> residuals;
    for (const auto& q : ctx.pres)
        if (!q.ramified) {
            auto base_v = chi.eval(q.p);
            check(base_v.has_value(), "unramified prime is a unit for the ramified base");
            residuals.push_back({q.p, q.value * base_v->inverse()});
        }
    // One auxiliary block per prime-power factor of m. Requiring only
    // ell = 1 (mod p^a) keeps the indices of distinct residual primes
    // jointly unconstrained (quadratic reciprocity couples them once the
    // modulus fixes ell in too many progressions at once); the lone
    // surviving coupling -- 2 is always a square mod ell when 8 | p^a --
    // is exactly the obstruction ruled out above, so a bounded scan over
    // the smallest candidates is complete.
    std::set<u64> used;
    for (auto [p, a] : factor(m)) {
        u64 mp = 1;
        for (unsigned i = 0; i < a; ++i) mp *= p;
        // Idempotent exponent: c = 1 (mod mp), c = 0 (mod m/mp), so that
        // need^c is the mp-torsion component of need.
        u64 rest = m / mp;
        u64 c = rest == 1 ? 1 : rest * pow_mod(rest % mp, totient(mp) - 1, mp);
        // Every residual constrains the block, including primes whose
        // mp-component is trivial: the block must vanish there too.
        std::vector<Residual> targets;
        bool all_trivial = true;
        for (const auto& r : residuals) {
            RootOfUnity t = r.need.pow(static_cast<long long>(c));
            all_trivial = all_trivial && t.is_one();
            targets.push_back({r.p, t});
        }
        if (all_trivial) continue;
        bool done = false;
        for (u64 ell : aux_candidates(ctx, used, mp)) {
            // psi0(q) = zeta_mp^{index(q)}; find x with psi0(q)^x = t(q) for all q.
            std::vector<u64> idx;
            idx.reserve(targets.size());
            for (const auto& t : targets) idx.push_back(prime_index(ell, t.p) % mp);
            for (u64 x = 1; x < mp && !done; ++x) {
                bool ok = true;
                for (size_t i = 0; i < targets.size() && ok; ++i)
                    ok = RootOfUnity::make(static_cast<long long>(mul_mod(idx[i], x, mp)), mp) ==
                         targets[i].need;
                if (ok) {
                    chi = chi.times_coprime(cyclic_block(ell, mp, x));
                    used.insert(ell);
                    done = true;
                }
            }
            if (done) break;
        }
        if (!done)
            return infeasible_with_fallback(
                ctx, "auxiliary prime search exhausted below the bound for the " +
                         std::to_string(mp) + "-part");
    }

    // Order exactness: top up each prime-power part the residual blocks left
    // short with a block that is trivial at every prescribed prime (all of
    // them mp-th power residues modulo ell).
    for (auto [p, a] : factor(m)) {
        u64 mp = 1;
        for (unsigned i = 0; i < a; ++i) mp *= p;
        if (chi.order() % mp == 0) continue;
        bool done = false;
        for (u64 ell : aux_candidates(ctx, used, mp)) {
            bool ok = true;
            for (const auto& q : ctx.pres)
                if (pow_mod(q.p % ell, (ell - 1) / mp, ell) != 1) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            chi = chi.times_coprime(cyclic_block(ell, mp, 1));
            used.insert(ell);
            done = true;
            break;
        }
        if (!done)
            return infeasible_with_fallback(
                ctx, "order-completion auxiliary search exhausted below the bound for the " +
                         std::to_string(mp) + "-part");
    }

    check(chi.order() == m, "solver output must have the exact target order");
    for (const auto& q : ctx.pres)
        check(q.matches(chi), "solver output must match every prescription");
    return chi;
}

} // namespace

Outcome solve(const std::vector<LocalPrescription>& prescriptions, u64 m,
              const std::vector<u64>& avoid, const SolveOptions& options) {
    if (m == 0) fail("DOMAIN", "target order must be positive");
    SolveContext ctx;
    ctx.pres = prescriptions;
    ctx.m = m;
    ctx.options = options;
    for (const auto& q : prescriptions) {
        if (!ctx.support.insert(q.p).second)
            fail("CONFLICT", "two prescriptions at the prime " + std::to_string(q.p));
        if (m % q.order() != 0)
            fail("DOMAIN", "prescribed order " + std::to_string(q.order()) +
                               " does not divide the target order " + std::to_string(m));
    }
    for (u64 p : avoid) {
        if (ctx.support.count(p))
            fail("DOMAIN", "avoid set overlaps the prescription support at " + std::to_string(p));
        ctx.avoid.insert(p);
    }
    return solve_impl(std::move(ctx));
}

namespace {

// Conductor of one prime block from its candidate values.
u64 block_conductor(u64 p, u64 pk, const std::vector<std::pair<u64, RootOfUnity>>& block_vals) {
    if (p != 2) {
        u64 ord = 1;
        for (const auto& [o, v] : block_vals) ord = std::lcm(ord, v.order);
        if (ord == 1) return 1;
        u64 pb = p; // smallest p^b with ord | phi(p^b)
        while (totient(pb) % ord != 0) pb *= p;
        return pb;
    }
    if (pk == 2) return 1;
    if (pk == 4) return block_vals[0].second.is_one() ? 1 : 4;
    // pk >= 8: values ordered [-1 part, 5 part].
    u64 five_order = block_vals[1].second.order;
    if (five_order > 1) return 4 * five_order;
    return block_vals[0].second.is_one() ? 1 : 4;
}

std::vector<DirichletCharacter> scan_modulus(u64 n, u64 order,
                                             const std::vector<LocalPrescription>& pres) {
    std::vector<DirichletCharacter> out;
    auto gens = unit_group_generators(n);
    // Quick pruning: the exact order must divide the unit-group exponent,
    // every unramified prime must stay a unit, and every ramified prime
    // must divide n.
    u64 lcm_orders = 1;
    for (const auto& g : gens) lcm_orders = std::lcm(lcm_orders, g.order);
    if (lcm_orders % order != 0) return out;
    for (const auto& q : pres) {
        if (!q.ramified && n % q.p == 0) return out;
        if (q.ramified && n % q.p != 0) return out;
    }
    std::vector<std::vector<u64>> dlogs;
    for (const auto& q : pres)
        if (!q.ramified) {
            auto d = unit_dlog(n, gens, q.p);
            check(d.has_value(), "unramified prime must be a unit");
            dlogs.push_back(std::move(*d));
        }

    size_t k = gens.size();
    std::vector<u64> torsion(k);
    for (size_t i = 0; i < k; ++i) torsion[i] = std::gcd(gens[i].order, order);
    std::vector<u64> t(k, 0);
    while (true) {
        std::vector<RootOfUnity> vals(k);
        u64 chi_order = 1;
        for (size_t i = 0; i < k; ++i) {
            vals[i] = RootOfUnity::make(static_cast<long long>(t[i]), torsion[i]);
            chi_order = std::lcm(chi_order, vals[i].order);
        }
        if (chi_order == order) {
            // Primitivity: the product of block conductors must equal n.
            u64 cond = 1;
            bool primitive = true;
            for (size_t i = 0; i < k && primitive; ++i) {
                if (i > 0 && gens[i].prime_power == gens[i - 1].prime_power) continue;
                std::vector<std::pair<u64, RootOfUnity>> block;
                for (size_t j = 0; j < k; ++j)
                    if (gens[j].prime_power == gens[i].prime_power) block.push_back({j, vals[j]});
                u64 bc = block_conductor(gens[i].prime, gens[i].prime_power, block);
                primitive = bc == gens[i].prime_power;
                cond *= bc;
            }
            if (primitive && cond == n) {
                bool ok = true;
                size_t unram_idx = 0;
                for (const auto& q : pres) {
                    if (!q.ramified) {
                        RootOfUnity got{1, 0};
                        for (size_t i = 0; i < k; ++i)
                            got = got *
                                  vals[i].pow(static_cast<long long>(dlogs[unram_idx][i]));
                        ok = got == q.value;
                        ++unram_idx;
                    } else {
                        std::vector<RootOfUnity> bvals;
                        u64 pk = 0;
                        for (size_t i = 0; i < k; ++i)
                            if (gens[i].prime == q.p) {
                                bvals.push_back(vals[i]);
                                pk = gens[i].prime_power;
                            }
                        ok = pk == q.component->modulus() &&
                             bvals == q.component->values();
                    }
                    if (!ok) break;
                }
                if (ok) out.push_back(DirichletCharacter::from_values(n, vals));
            }
        }
        // Mixed-radix increment.
        size_t i = 0;
        while (i < k && ++t[i] == torsion[i]) t[i++] = 0;
        if (i == k) break;
        if (k == 0) break;
    }
    return out;
}

} // namespace

std::vector<DirichletCharacter> brute_force_characters(
    u64 max_modulus, u64 order, const std::vector<LocalPrescription>& prescriptions,
    ExecPolicy policy) {
    std::vector<std::vector<DirichletCharacter>> per_n(max_modulus + 1);
    if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (long long n = 1; n <= static_cast<long long>(max_modulus); ++n)
            per_n[static_cast<size_t>(n)] =
                scan_modulus(static_cast<u64>(n), order, prescriptions);
    } else {
        for (u64 n = 1; n <= max_modulus; ++n) per_n[n] = scan_modulus(n, order, prescriptions);
    }
    std::vector<DirichletCharacter> out;
    for (auto& v : per_n)
        for (auto& chi : v) out.push_back(std::move(chi));
    return out;
}

} // namespace gw
} // namespace semilift
