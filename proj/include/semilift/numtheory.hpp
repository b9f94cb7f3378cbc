#pragma once

#include <cstdint>
#include <vector>

namespace semilift {

using u64 = std::uint64_t;

u64 mul_mod(u64 a, u64 b, u64 m);
u64 pow_mod(u64 a, u64 e, u64 m);
bool is_prime(u64 n);

// Prime factorization by trial division, ascending primes.
std::vector<std::pair<u64, unsigned>> factor(u64 n);

u64 totient(u64 n);

// Returns p if n = p^k for a prime p, else 0.
u64 prime_power_base(u64 n);

// Exact integer k-th root when it exists, else 0.
u64 exact_root(u64 n, unsigned k);

// Smallest generator of the cyclic group (Z/p^a)*, p odd prime (or p^a in {2,4}).
u64 primitive_root(u64 pk);

// Multiplicative order of a mod n; requires gcd(a, n) = 1.
u64 mult_order(u64 a, u64 n);

std::vector<u64> primes_up_to(u64 bound);

} // namespace semilift
