#include "semilift/numtheory.hpp"

#include <numeric>

#include "semilift/error.hpp"

namespace semilift {

u64 mul_mod(u64 a, u64 b, u64 m) {
    return static_cast<u64>((static_cast<__uint128_t>(a) * b) % m);
}

u64 pow_mod(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mul_mod(r, a, m);
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    return r;
}

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    // Deterministic Miller-Rabin for 64-bit inputs.
    u64 d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (unsigned r = 1; r < s; ++r) {
            x = mul_mod(x, x, n);
            if (x == n - 1) { witness = false; break; }
        }
        if (witness) return false;
    }
    return true;
}

std::vector<std::pair<u64, unsigned>> factor(u64 n) {
    std::vector<std::pair<u64, unsigned>> out;
    for (u64 p = 2; p * p <= n; p += (p == 2) ? 1 : 2) {
        if (n % p) continue;
        unsigned e = 0;
        while (n % p == 0) { n /= p; ++e; }
        out.emplace_back(p, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

u64 totient(u64 n) {
    u64 t = n;
    for (auto [p, e] : factor(n)) t = t / p * (p - 1);
    return t;
}

u64 prime_power_base(u64 n) {
    if (n < 2) return 0;
    auto f = factor(n);
    return f.size() == 1 ? f[0].first : 0;
}

u64 exact_root(u64 n, unsigned k) {
    if (k == 0) return 0;
    if (k == 1 || n <= 1) return n;
    u64 lo = 1, hi = n;
    while (lo < hi) {
        u64 mid = lo + (hi - lo + 1) / 2;
        __uint128_t acc = 1;
        bool over = false;
        for (unsigned i = 0; i < k && !over; ++i) {
            acc *= mid;
            if (acc > n) over = true;
        }
        if (over) hi = mid - 1; else lo = mid;
    }
    __uint128_t acc = 1;
    for (unsigned i = 0; i < k; ++i) acc *= lo;
    return acc == n ? lo : 0;
}

u64 mult_order(u64 a, u64 n) {
    if (n == 1) return 1;
    if (std::gcd(a % n, n) != 1) fail("DOMAIN", "mult_order on a non-unit");
    u64 t = totient(n);
    u64 order = t;
    for (auto [p, e] : factor(t)) {
        while (order % p == 0 && pow_mod(a, order / p, n) == 1) order /= p;
    }
    return order;
}

u64 primitive_root(u64 pk) {
    if (pk == 1) return 0;
    if (pk == 2) return 1;
    if (pk == 4) return 3;
    u64 p = prime_power_base(pk);
    if (p == 0 || p == 2) fail("DOMAIN", "no primitive root mod " + std::to_string(pk));
    u64 t = totient(pk);
    auto tf = factor(t);
    for (u64 g = 2; g < pk; ++g) {
        if (std::gcd(g, pk) != 1) continue;
        bool ok = true;
        for (auto [q, e] : tf) {
            if (pow_mod(g, t / q, pk) == 1) { ok = false; break; }
        }
        if (ok) return g;
    }
    fail("INTERNAL", "primitive root search exhausted");
}

std::vector<u64> primes_up_to(u64 bound) {
    std::vector<u64> out;
    std::vector<bool> sieve(bound + 1, true);
    for (u64 i = 2; i <= bound; ++i) {
        if (!sieve[i]) continue;
        out.push_back(i);
        for (u64 j = i * i; j <= bound; j += i) sieve[j] = false;
    }
    return out;
}

} // namespace semilift
