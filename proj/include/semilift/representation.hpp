#pragma once

#include <optional>
#include <string>
#include <vector>

#include "semilift/cyclotomic.hpp"
#include "semilift/group.hpp"
#include "semilift/local_factor.hpp"

namespace semilift {

// Dense square matrix over the cyclotomic field tower.
class CycMatrix {
public:
    explicit CycMatrix(unsigned n) : n_(n), a_(static_cast<size_t>(n) * n, CycNum::zero()) {}
    static CycMatrix identity(unsigned n);

    unsigned dim() const { return n_; }
    CycNum& at(unsigned i, unsigned j) { return a_[static_cast<size_t>(i) * n_ + j]; }
    const CycNum& at(unsigned i, unsigned j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

    CycMatrix operator*(const CycMatrix& o) const;
    CycMatrix operator+(const CycMatrix& o) const;
    CycMatrix scaled(const CycNum& c) const;
    CycMatrix transposed() const;
    CycNum trace() const;
    bool operator==(const CycMatrix& o) const = default;

    // Coefficients of det(I - A*T): c[0] = 1, degree = dim. Computed with
    // the Faddeev-LeVerrier recurrence, exactly.
    CycPoly char_reverse() const;

private:
    unsigned n_;
    std::vector<CycNum> a_;
};

// One-dimensional character with root-of-unity values, one per element.
struct OneDimChar {
    GroupPtr group;
    std::vector<RootOfUnity> values;

    const RootOfUnity& value(unsigned g) const { return values[g]; }
    bool is_trivial() const;
    u64 order() const; // lcm of the value orders
    OneDimChar operator*(const OneDimChar& o) const;
    OneDimChar pow(long long e) const;
    OneDimChar inverse() const { return pow(-1); }
    bool same_values(const OneDimChar& o) const { return values == o.values; }
};

// Every homomorphism G -> C^x, in a deterministic order (sorted by value
// vector; the trivial character always comes first).
std::vector<OneDimChar> all_linear_characters(const GroupPtr& g);

// Matrix representation of a finite group, stored as one image per element
// and verified to be multiplicative on construction.
class Representation {
public:
    static Representation from_elements(std::string name, GroupPtr group,
                                        std::vector<CycMatrix> images,
                                        ExecPolicy policy = default_policy());
    // Images of generating elements; the rest are filled in along a
    // breadth-first spanning of the group, then verified.
    static Representation from_generators(std::string name, GroupPtr group,
                                          const std::vector<std::pair<unsigned, CycMatrix>>& gens,
                                          ExecPolicy policy = default_policy());

    const std::string& name() const { return name_; }
    const GroupPtr& group() const { return group_; }
    unsigned dim() const { return dim_; }
    const CycMatrix& image(unsigned g) const { return images_[g]; }
    const std::vector<CycNum>& character() const { return character_; }
    bool same_character(const Representation& o) const;

    // (1/|G|) sum_g chi(g) * conj(psi(g)); characters pair rationally.
    Rat inner_product(const Representation& o) const;
    bool is_irreducible() const { return inner_product(*this) == 1; }

    Representation direct_sum(const Representation& o) const;
    Representation twisted(const OneDimChar& chi) const;
    Representation restricted(const FiniteGroup::Subgroup& sub) const;
    Representation dual() const;

    // Trace of averaging projector (1/|H|) sum_{h in H} rho(h) composed
    // with rho(sigma); equals the trace of sigma on the H-fixed subspace
    // when sigma normalizes H.
    CycNum invariant_trace(const std::vector<unsigned>& h, unsigned sigma) const;
    // det(1 - rho(sigma)|_{V^H} * T) as a polynomial in T; requires sigma
    // to normalize H.
    CycPoly invariant_frobenius_poly(const std::vector<unsigned>& h, unsigned sigma) const;

private:
    Representation() = default;
    void finish(ExecPolicy policy); // verifies multiplicativity, caches traces

    std::string name_;
    GroupPtr group_;
    unsigned dim_ = 0;
    std::vector<CycMatrix> images_;
    std::vector<CycNum> character_;
};

// Number of multiplicativity violations rho(a)rho(b) != rho(ab); the
// parallel path splits the pair scan across threads.
std::size_t homomorphism_violations(const FiniteGroup& g, const std::vector<CycMatrix>& images,
                                    ExecPolicy policy);

// One-dimensional character as a 1x1 representation.
Representation to_representation(const OneDimChar& chi, std::string name);

// Permutation action on the sum-zero subspace (dimension degree-1); the
// group must have been built from permutations.
Representation standard_representation(const GroupPtr& g);

// Linear characters chi with rep ⊗ chi isomorphic to rep. Each such
// character has order dividing dim (compare determinants), which is
// verified internally.
std::vector<OneDimChar> self_twist_characters(const Representation& rep);

// Extract the inverse roots of a polynomial known to split as
// prod (1 - z_i T) with each z_i a root of unity of order dividing
// max_order. Fails if the polynomial does not split that way.
std::vector<RootOfUnity> unit_inverse_roots(CycPoly poly, u64 max_order);

} // namespace semilift
