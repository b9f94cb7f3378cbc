#include "semilift/dirichlet.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include "semilift/error.hpp"

namespace semilift {

namespace {

// CRT lift: x = a mod m, x = 1 mod (n/m), for m | n with gcd(m, n/m) = 1.
u64 crt_lift(u64 a, u64 m, u64 n) {
    u64 rest = n / m;
    if (rest == 1) return a % n;
    // x = a + m * t with t = (1 - a) * m^{-1} mod rest.
    u64 minv = pow_mod(m % rest, totient(rest) - 1, rest); // rest need not be prime
    u64 diff = ((1 + rest) - (a % rest)) % rest;
    u64 t = mul_mod(diff, minv, rest);
    return (a + m * t) % n;
}

} // namespace

std::vector<UnitGenerator> unit_group_generators(u64 n) {
    if (n == 0) fail("DOMAIN", "modulus must be positive");
    std::vector<UnitGenerator> gens;
    for (auto [p, a] : factor(n)) {
        u64 pk = 1;
        for (unsigned i = 0; i < a; ++i) pk *= p;
        if (p == 2) {
            if (a == 1) continue; // trivial unit group
            if (a == 2) {
                gens.push_back({crt_lift(3, 4, n), 2, 2, 4});
            } else {
                gens.push_back({crt_lift(pk - 1, pk, n), 2, 2, pk});
                gens.push_back({crt_lift(5, pk, n), pk / 4, 2, pk});
            }
        } else {
            u64 g = primitive_root(pk);
            gens.push_back({crt_lift(g, pk, n), totient(pk), p, pk});
        }
    }
    return gens;
}

std::optional<std::vector<u64>> unit_dlog(u64 n, const std::vector<UnitGenerator>& gens, u64 v) {
    v %= n;
    if (n == 1) return std::vector<u64>{};
    if (std::gcd(v, n) != 1) return std::nullopt;
    std::vector<u64> exps(gens.size(), 0);
    for (size_t i = 0; i < gens.size(); ++i) {
        const auto& g = gens[i];
        if (g.prime == 2 && g.prime_power >= 8 &&
            g.residue % g.prime_power == g.prime_power - 1) {
            // Sign part of the 2-block: resolved together with the 5-part below.
            continue;
        }
        u64 pk = g.prime_power;
        u64 target = v % pk;
        if (g.prime == 2 && pk >= 8) {
            // Block is <-1> x <5>; find (s, e) with target = (-1)^s 5^e.
            u64 cur = 1;
            bool done = false;
            for (u64 e = 0; e < g.order && !done; ++e) {
                if (cur == target) {
                    exps[i - 1] = 0;
                    exps[i] = e;
                    done = true;
                } else if (pk - cur == target) {
                    exps[i - 1] = 1;
                    exps[i] = e;
                    done = true;
                }
                cur = mul_mod(cur, 5, pk);
            }
            check(done, "2-block discrete log must exist for a unit");
        } else {
            u64 base = g.residue % pk;
            u64 cur = 1;
            bool done = false;
            for (u64 e = 0; e < g.order && !done; ++e) {
                if (cur == target) {
                    exps[i] = e;
                    done = true;
                }
                cur = mul_mod(cur, base, pk);
            }
            check(done, "block discrete log must exist for a unit");
        }
    }
    return exps;
}

struct DirichletCharacter::ModulusData {
    u64 n = 1;
    std::vector<UnitGenerator> gens;
    // Row-major: exp_table[r * gens.size() + i] = exponent of generator i
    // for residue r; UINT32_MAX marks non-units (stored in column 0).
    std::vector<std::uint32_t> exp_table;

    bool is_unit(u64 r) const {
        if (n == 1) return true;
        return gens.empty() ? std::gcd(r % n, n) == 1
                            : exp_table[(r % n) * gens.size()] != UINT32_MAX;
    }
};

std::shared_ptr<const DirichletCharacter::ModulusData> DirichletCharacter::modulus_data(u64 n) {
    static std::mutex mu;
    static std::map<u64, std::shared_ptr<const DirichletCharacter::ModulusData>> cache;
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = cache.find(n);
        if (it != cache.end()) return it->second;
    }
    auto d = std::make_shared<DirichletCharacter::ModulusData>();
    d->n = n;
    d->gens = unit_group_generators(n);
    size_t k = d->gens.size();
    if (n > 1 && k > 0) {
        d->exp_table.assign(static_cast<size_t>(n) * k, UINT32_MAX);
        // Enumerate all units as products of generator powers.
        std::vector<u64> exps(k, 0);
        std::function<void(size_t, u64)> rec = [&](size_t i, u64 val) {
            if (i == k) {
                for (size_t j = 0; j < k; ++j)
                    d->exp_table[val * k + j] = static_cast<std::uint32_t>(exps[j]);
                return;
            }
            u64 cur = val;
            for (u64 e = 0; e < d->gens[i].order; ++e) {
                exps[i] = e;
                rec(i + 1, cur);
                cur = mul_mod(cur, d->gens[i].residue, n);
            }
        };
        rec(0, 1);
    }
    std::lock_guard<std::mutex> lk(mu);
    auto [it, inserted] = cache.emplace(n, std::move(d));
    return it->second;
}

DirichletCharacter DirichletCharacter::trivial() { return from_values(1, {}); }

DirichletCharacter DirichletCharacter::from_values(u64 modulus, std::vector<RootOfUnity> values) {
    DirichletCharacter c;
    c.data_ = modulus_data(modulus);
    if (values.size() != c.data_->gens.size())
        fail("DOMAIN", "expected one value per unit-group generator of " + std::to_string(modulus));
    for (size_t i = 0; i < values.size(); ++i)
        if (c.data_->gens[i].order % values[i].order != 0)
            fail("DOMAIN", "character value order must divide the generator order");
    c.values_ = std::move(values);
    return c;
}

u64 DirichletCharacter::modulus() const { return data_->n; }

const std::vector<UnitGenerator>& DirichletCharacter::generators() const { return data_->gens; }

u64 DirichletCharacter::order() const {
    u64 o = 1;
    for (const auto& v : values_) o = std::lcm(o, v.order);
    return o;
}

std::optional<RootOfUnity> DirichletCharacter::eval(u64 n) const {
    u64 N = data_->n;
    if (N == 1) return RootOfUnity{1, 0};
    u64 r = n % N;
    if (!data_->is_unit(r)) return std::nullopt;
    RootOfUnity out{1, 0};
    for (size_t i = 0; i < values_.size(); ++i)
        out = out * values_[i].pow(static_cast<long long>(data_->exp_table[r * values_.size() + i]));
    return out;
}

u64 DirichletCharacter::conductor() const {
    if (conductor_cache_) return conductor_cache_;
    u64 N = data_->n;
    for (u64 m = 1; m <= N; ++m) {
        if (N % m != 0) continue;
        // chi factors through (Z/m)* iff it kills every unit = 1 mod m.
        bool ok = true;
        for (u64 r = 1; r < N && ok; r += m) {
            if (std::gcd(r, N) != 1) continue;
            auto v = eval(r);
            ok = v.has_value() && v->is_one();
        }
        if (ok) {
            conductor_cache_ = m;
            return m;
        }
    }
    conductor_cache_ = N;
    return N;
}

DirichletCharacter DirichletCharacter::pow(long long e) const {
    DirichletCharacter c = *this;
    for (auto& v : c.values_) v = v.pow(e);
    c.conductor_cache_ = 0;
    return c;
}

DirichletCharacter DirichletCharacter::times_coprime(const DirichletCharacter& o) const {
    u64 n1 = modulus(), n2 = o.modulus();
    if (std::gcd(n1, n2) != 1) fail("DOMAIN", "moduli are not coprime");
    u64 n = n1 * n2;
    auto gens = unit_group_generators(n);
    std::vector<RootOfUnity> vals;
    vals.reserve(gens.size());
    for (const auto& g : gens) {
        // The block belongs to exactly one factor; the block generators of
        // the product modulus restrict to the factor's block generators.
        const DirichletCharacter& part = (n1 % g.prime == 0) ? *this : o;
        const auto& pgens = part.generators();
        bool found = false;
        for (size_t i = 0; i < pgens.size() && !found; ++i)
            if (pgens[i].prime_power == g.prime_power &&
                pgens[i].residue % g.prime_power == g.residue % g.prime_power) {
                vals.push_back(part.values()[i]);
                found = true;
            }
        check(found, "generator alignment across coprime moduli");
    }
    return from_values(n, std::move(vals));
}

DirichletCharacter DirichletCharacter::p_component(u64 p) const {
    u64 N = modulus();
    if (N % p != 0) fail("DOMAIN", "prime does not divide the modulus");
    u64 pk = 1;
    u64 m = N;
    while (m % p == 0) {
        m /= p;
        pk *= p;
    }
    std::vector<RootOfUnity> vals;
    for (size_t i = 0; i < data_->gens.size(); ++i)
        if (data_->gens[i].prime == p) vals.push_back(values_[i]);
    return from_values(pk, std::move(vals));
}

DirichletCharacter DirichletCharacter::primitive_core() const {
    u64 c = conductor();
    u64 N = modulus();
    if (c == N) return *this;
    auto cgens = unit_group_generators(c);
    std::vector<RootOfUnity> vals;
    vals.reserve(cgens.size());
    for (const auto& g : cgens) {
        // Lift g.residue (mod c) to a unit mod N; chi factors through mod c.
        u64 u = g.residue % c;
        while (std::gcd(u % N, N) != 1) u += c;
        auto v = eval(u % N);
        check(v.has_value(), "lift of a conductor unit is a unit");
        vals.push_back(*v);
    }
    return from_values(c, std::move(vals));
}

std::string DirichletCharacter::to_string() const {
    std::ostringstream os;
    os << "dirichlet(" << modulus() << ";";
    for (size_t i = 0; i < values_.size(); ++i) os << (i ? ", " : " ") << values_[i].to_string();
    if (values_.empty()) os << " ";
    os << ")";
    return os.str();
}

DirichletCharacter DirichletCharacter::parse(std::string_view text) {
    auto strip = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    text = strip(text);
    if (!text.starts_with("dirichlet(") || !text.ends_with(")"))
        fail("PARSE_ERROR", "expected dirichlet(N; values), got '" + std::string(text) + "'");
    auto inner = text.substr(10, text.size() - 11);
    auto semi = inner.find(';');
    if (semi == std::string_view::npos) fail("PARSE_ERROR", "dirichlet(...) needs ';'");
    auto mod_text = strip(inner.substr(0, semi));
    u64 n = 0;
    for (char ch : mod_text) {
        if (!std::isdigit(static_cast<unsigned char>(ch)))
            fail("PARSE_ERROR", "bad modulus '" + std::string(mod_text) + "'");
        n = n * 10 + static_cast<u64>(ch - '0');
    }
    if (n == 0) fail("PARSE_ERROR", "modulus must be positive");
    auto rest = strip(inner.substr(semi + 1));
    std::vector<RootOfUnity> vals;
    if (!rest.empty()) {
        size_t start = 0;
        int depth = 0;
        for (size_t i = 0; i <= rest.size(); ++i) {
            if (i == rest.size() || (rest[i] == ',' && depth == 0)) {
                vals.push_back(RootOfUnity::parse(rest.substr(start, i - start)));
                start = i + 1;
            } else if (rest[i] == '(') {
                ++depth;
            } else if (rest[i] == ')') {
                --depth;
            }
        }
    }
    return from_values(n, std::move(vals));
}

} // namespace semilift
