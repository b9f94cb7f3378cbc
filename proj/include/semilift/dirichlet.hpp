#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semilift/local_factor.hpp"
#include "semilift/numtheory.hpp"

namespace semilift {

// One generator of (Z/nZ)*, as a residue mod n that is congruent to a
// canonical block generator mod prime_power and to 1 modulo the rest of n.
struct UnitGenerator {
    u64 residue;
    u64 order;
    u64 prime;
    u64 prime_power;
    bool operator==(const UnitGenerator&) const = default;
};

// Canonical generator list: prime blocks in ascending order; for 2^a with
// a >= 3 the block contributes {-1, 5} (orders 2 and 2^{a-2}), for 2^2 it
// contributes {-1}, and each odd p^a one generator of order phi(p^a).
std::vector<UnitGenerator> unit_group_generators(u64 n);

// Exponents of v over the given generators (block-by-block discrete logs),
// or nullopt when gcd(v, n) > 1.
std::optional<std::vector<u64>> unit_dlog(u64 n, const std::vector<UnitGenerator>& gens, u64 v);

// Dirichlet character mod N, stored as one root-of-unity value per
// canonical generator of (Z/NZ)*.
class DirichletCharacter {
public:
    static DirichletCharacter trivial(); // modulus 1
    static DirichletCharacter from_values(u64 modulus, std::vector<RootOfUnity> values);

    u64 modulus() const;
    const std::vector<UnitGenerator>& generators() const;
    const std::vector<RootOfUnity>& values() const { return values_; }
    u64 order() const; // lcm of the value orders
    u64 conductor() const;
    bool is_primitive() const { return conductor() == modulus(); }

    // chi(n); nullopt when gcd(n, modulus) > 1.
    std::optional<RootOfUnity> eval(u64 n) const;

    DirichletCharacter pow(long long e) const;
    // Product of characters with coprime moduli, mod the product modulus.
    DirichletCharacter times_coprime(const DirichletCharacter& o) const;
    // Restriction to the p-block: a character mod p^{v_p(N)}; requires p | N.
    DirichletCharacter p_component(u64 p) const;
    // The primitive character mod conductor() inducing this one.
    DirichletCharacter primitive_core() const;

    bool operator==(const DirichletCharacter& o) const {
        return modulus() == o.modulus() && values_ == o.values_;
    }

    std::string to_string() const; // "dirichlet(N; v, ...)"
    static DirichletCharacter parse(std::string_view text);

private:
    struct ModulusData;
    static std::shared_ptr<const ModulusData> modulus_data(u64 n);
    std::shared_ptr<const ModulusData> data_;
    std::vector<RootOfUnity> values_;
    mutable u64 conductor_cache_ = 0;
};

} // namespace semilift
