#pragma once

#include <memory>
#include <string>
#include <vector>

#include "semilift/exec.hpp"

namespace semilift {

// Finite group given by its full multiplication table. Labels are
// 0..size-1; construction validates the group axioms exhaustively.
class FiniteGroup {
public:
    // Validates closure, identity, inverses, and associativity.
    static FiniteGroup from_table(std::string name, std::vector<std::vector<unsigned>> table,
                                  ExecPolicy policy = default_policy());
    // Closure of permutations of {0..degree-1}; the identity gets label 0
    // and elements are labeled in breadth-first discovery order.
    static FiniteGroup from_permutations(std::string name, unsigned degree,
                                         const std::vector<std::vector<unsigned>>& generators);
    static FiniteGroup cyclic(unsigned n);

    const std::string& name() const { return name_; }
    unsigned size() const { return n_; }
    unsigned identity() const { return identity_; }
    unsigned mul(unsigned a, unsigned b) const { return table_[a * n_ + b]; }
    unsigned inv(unsigned a) const { return inverse_[a]; }
    unsigned conjugate(unsigned g, unsigned a) const { return mul(mul(g, a), inv(g)); }
    unsigned element_order(unsigned a) const;
    bool is_abelian() const;
    bool is_cyclic() const;

    // Classes are listed by increasing least element; class 0 contains the
    // identity. class_of(a) is the index of a's class.
    const std::vector<std::vector<unsigned>>& conjugacy_classes() const { return classes_; }
    unsigned class_of(unsigned a) const { return class_index_[a]; }

    // Sorted element list of the subgroup generated by the given elements.
    std::vector<unsigned> closure(std::vector<unsigned> generators) const;
    // Every subgroup as a sorted element list; the listing itself is sorted
    // (by size, then lexicographically) and therefore deterministic.
    std::vector<std::vector<unsigned>> all_subgroups() const;
    bool is_subgroup(const std::vector<unsigned>& elements) const;
    bool is_normal(const std::vector<unsigned>& elements) const;
    std::vector<unsigned> commutator_subgroup() const;

    // The permutation images when built via from_permutations, else null.
    const std::vector<std::vector<unsigned>>* permutations() const {
        return perms_.empty() ? nullptr : &perms_;
    }

    // Quotient by a normal subgroup: cosets are labeled 0..k-1 in increasing
    // order of their least element, and proj maps group labels to coset labels.
    struct Quotient {
        std::shared_ptr<const FiniteGroup> group;
        std::vector<unsigned> proj;
    };
    Quotient quotient(const std::vector<unsigned>& normal_subgroup) const;

    // A subgroup repackaged as a group of its own: embed maps the new labels
    // (positions in the sorted element list) back to labels of this group.
    struct Subgroup {
        std::shared_ptr<const FiniteGroup> group;
        std::vector<unsigned> embed;
    };
    Subgroup subgroup(const std::vector<unsigned>& elements) const;

    bool same_table(const FiniteGroup& o) const {
        return n_ == o.n_ && table_ == o.table_;
    }

private:
    FiniteGroup() = default;
    void finish(ExecPolicy policy); // validates and fills derived data

    std::string name_;
    unsigned n_ = 0;
    unsigned identity_ = 0;
    std::vector<unsigned> table_; // row-major n x n
    std::vector<unsigned> inverse_;
    std::vector<std::vector<unsigned>> classes_;
    std::vector<unsigned> class_index_;
    std::vector<std::vector<unsigned>> perms_;
};

using GroupPtr = std::shared_ptr<const FiniteGroup>;

// Exhaustive associativity scan of a complete table; the parallel path
// splits the outer loop across threads. Returns the number of violating
// triples (0 for a valid table).
std::size_t associativity_violations(const std::vector<unsigned>& table, unsigned n,
                                     ExecPolicy policy);

} // namespace semilift
