#include "semilift/group.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "semilift/error.hpp"

namespace semilift {

std::size_t associativity_violations(const std::vector<unsigned>& table, unsigned n,
                                     ExecPolicy policy) {
    check(table.size() == static_cast<size_t>(n) * n, "table size mismatch");
    auto at = [&](unsigned a, unsigned b) { return table[static_cast<size_t>(a) * n + b]; };
    std::size_t bad = 0;
    if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for reduction(+ : bad) schedule(static)
        for (long long a = 0; a < static_cast<long long>(n); ++a)
            for (unsigned b = 0; b < n; ++b)
                for (unsigned c = 0; c < n; ++c)
                    if (at(at(static_cast<unsigned>(a), b), c) !=
                        at(static_cast<unsigned>(a), at(b, c)))
                        ++bad;
    } else {
        for (unsigned a = 0; a < n; ++a)
            for (unsigned b = 0; b < n; ++b)
                for (unsigned c = 0; c < n; ++c)
                    if (at(at(a, b), c) != at(a, at(b, c))) ++bad;
    }
    return bad;
}

FiniteGroup FiniteGroup::from_table(std::string name, std::vector<std::vector<unsigned>> table,
                                    ExecPolicy policy) {
    FiniteGroup g;
    g.name_ = std::move(name);
    g.n_ = static_cast<unsigned>(table.size());
    if (g.n_ == 0) fail("DOMAIN", "empty multiplication table");
    if (g.n_ > 1000) fail("RANGE", "group size exceeds the supported bound of 1000");
    g.table_.reserve(static_cast<size_t>(g.n_) * g.n_);
    for (const auto& row : table) {
        if (row.size() != g.n_) fail("DOMAIN", "multiplication table is not square");
        for (unsigned v : row) {
            if (v >= g.n_) fail("DOMAIN", "multiplication table entry out of range");
            g.table_.push_back(v);
        }
    }
    g.finish(policy);
    return g;
}

FiniteGroup FiniteGroup::from_permutations(std::string name, unsigned degree,
                                           const std::vector<std::vector<unsigned>>& generators) {
    for (const auto& p : generators) {
        if (p.size() != degree) fail("DOMAIN", "permutation degree mismatch");
        std::vector<bool> seen(degree, false);
        for (unsigned v : p) {
            if (v >= degree || seen[v]) fail("DOMAIN", "not a permutation");
            seen[v] = true;
        }
    }
    std::vector<unsigned> id(degree);
    for (unsigned i = 0; i < degree; ++i) id[i] = i;
    std::vector<std::vector<unsigned>> elems{id};
    std::map<std::vector<unsigned>, unsigned> index{{id, 0}};
    for (size_t head = 0; head < elems.size(); ++head) {
        for (const auto& gen : generators) {
            std::vector<unsigned> prod(degree);
            for (unsigned i = 0; i < degree; ++i) prod[i] = elems[head][gen[i]];
            if (index.emplace(prod, static_cast<unsigned>(elems.size())).second) {
                elems.push_back(prod);
                if (elems.size() > 1000) fail("RANGE", "group size exceeds the supported bound of 1000");
            }
        }
    }
    unsigned n = static_cast<unsigned>(elems.size());
    FiniteGroup g;
    g.name_ = std::move(name);
    g.n_ = n;
    g.table_.assign(static_cast<size_t>(n) * n, 0);
    for (unsigned a = 0; a < n; ++a)
        for (unsigned b = 0; b < n; ++b) {
            std::vector<unsigned> prod(degree);
            // (a*b)(x) = a(b(x)): apply b first, then a.
            for (unsigned i = 0; i < degree; ++i) prod[i] = elems[a][elems[b][i]];
            g.table_[static_cast<size_t>(a) * n + b] = index.at(prod);
        }
    g.perms_ = std::move(elems);
    g.finish(ExecPolicy::Serial); // a closure-built table is associative by construction
    return g;
}

FiniteGroup FiniteGroup::cyclic(unsigned n) {
    if (n == 0) fail("DOMAIN", "cyclic group of order zero");
    std::vector<std::vector<unsigned>> table(n, std::vector<unsigned>(n));
    for (unsigned a = 0; a < n; ++a)
        for (unsigned b = 0; b < n; ++b) table[a][b] = (a + b) % n;
    return from_table("C" + std::to_string(n), std::move(table), ExecPolicy::Serial);
}

void FiniteGroup::finish(ExecPolicy policy) {
    // Identity.
    bool found = false;
    for (unsigned e = 0; e < n_ && !found; ++e) {
        bool ok = true;
        for (unsigned a = 0; a < n_ && ok; ++a)
            ok = mul(e, a) == a && mul(a, e) == a;
        if (ok) {
            identity_ = e;
            found = true;
        }
    }
    if (!found) fail("DOMAIN", "multiplication table has no identity");

    // Inverses.
    inverse_.assign(n_, 0);
    for (unsigned a = 0; a < n_; ++a) {
        bool ok = false;
        for (unsigned b = 0; b < n_; ++b)
            if (mul(a, b) == identity_ && mul(b, a) == identity_) {
                inverse_[a] = b;
                ok = true;
                break;
            }
        if (!ok) fail("DOMAIN", "multiplication table element without inverse");
    }

    if (associativity_violations(table_, n_, policy) != 0)
        fail("DOMAIN", "multiplication table is not associative");

    // Conjugacy classes by increasing least element.
    class_index_.assign(n_, n_);
    classes_.clear();
    for (unsigned a = 0; a < n_; ++a) {
        if (class_index_[a] != n_) continue;
        std::set<unsigned> cls;
        for (unsigned g = 0; g < n_; ++g) cls.insert(conjugate(g, a));
        unsigned idx = static_cast<unsigned>(classes_.size());
        classes_.emplace_back(cls.begin(), cls.end());
        for (unsigned x : classes_.back()) class_index_[x] = idx;
    }
}

unsigned FiniteGroup::element_order(unsigned a) const {
    check(a < n_, "element label out of range");
    unsigned ord = 1;
    unsigned x = a;
    while (x != identity_) {
        x = mul(x, a);
        ++ord;
    }
    return ord;
}

bool FiniteGroup::is_abelian() const {
    for (unsigned a = 0; a < n_; ++a)
        for (unsigned b = a + 1; b < n_; ++b)
            if (mul(a, b) != mul(b, a)) return false;
    return true;
}

bool FiniteGroup::is_cyclic() const {
    for (unsigned a = 0; a < n_; ++a)
        if (element_order(a) == n_) return true;
    return false;
}

std::vector<unsigned> FiniteGroup::closure(std::vector<unsigned> generators) const {
    std::set<unsigned> got{identity_};
    std::vector<unsigned> work{identity_};
    for (unsigned g : generators) {
        check(g < n_, "generator label out of range");
        if (got.insert(g).second) work.push_back(g);
    }
    for (size_t head = 0; head < work.size(); ++head)
        for (unsigned g : generators) {
            unsigned p = mul(work[head], g);
            if (got.insert(p).second) work.push_back(p);
        }
    return {got.begin(), got.end()};
}

bool FiniteGroup::is_subgroup(const std::vector<unsigned>& elements) const {
    std::set<unsigned> s(elements.begin(), elements.end());
    if (!s.count(identity_)) return false;
    for (unsigned a : s)
        for (unsigned b : s)
            if (!s.count(mul(a, b))) return false;
    return true;
}

bool FiniteGroup::is_normal(const std::vector<unsigned>& elements) const {
    std::set<unsigned> s(elements.begin(), elements.end());
    for (unsigned g = 0; g < n_; ++g)
        for (unsigned a : s)
            if (!s.count(conjugate(g, a))) return false;
    return true;
}

std::vector<unsigned> FiniteGroup::commutator_subgroup() const {
    std::vector<unsigned> comms;
    for (unsigned a = 0; a < n_; ++a)
        for (unsigned b = 0; b < n_; ++b)
            comms.push_back(mul(mul(inv(a), inv(b)), mul(a, b)));
    std::sort(comms.begin(), comms.end());
    comms.erase(std::unique(comms.begin(), comms.end()), comms.end());
    return closure(comms);
}

std::vector<std::vector<unsigned>> FiniteGroup::all_subgroups() const {
    std::set<std::vector<unsigned>> seen;
    std::vector<std::vector<unsigned>> work;
    auto push = [&](std::vector<unsigned> sub) {
        if (seen.insert(sub).second) work.push_back(std::move(sub));
    };
    push(closure({}));
    for (size_t head = 0; head < work.size(); ++head) {
        std::vector<unsigned> base = work[head]; // copy: work may reallocate
        for (unsigned g = 0; g < n_; ++g) {
            if (std::binary_search(base.begin(), base.end(), g)) continue;
            auto grown = base;
            grown.push_back(g);
            push(closure(grown));
        }
    }
    std::vector<std::vector<unsigned>> out(seen.begin(), seen.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return out;
}

FiniteGroup::Quotient FiniteGroup::quotient(const std::vector<unsigned>& normal_subgroup) const {
    if (!is_subgroup(normal_subgroup) || !is_normal(normal_subgroup))
        fail("DOMAIN", "quotient by a set that is not a normal subgroup");
    std::vector<unsigned> proj(n_, n_);
    std::vector<unsigned> reps; // least element of each coset, in increasing order
    for (unsigned a = 0; a < n_; ++a) {
        if (proj[a] != n_) continue;
        unsigned idx = static_cast<unsigned>(reps.size());
        reps.push_back(a);
        for (unsigned h : normal_subgroup) proj[mul(a, h)] = idx;
    }
    unsigned k = static_cast<unsigned>(reps.size());
    std::vector<std::vector<unsigned>> table(k, std::vector<unsigned>(k));
    for (unsigned i = 0; i < k; ++i)
        for (unsigned j = 0; j < k; ++j) table[i][j] = proj[mul(reps[i], reps[j])];
    Quotient q;
    q.group = std::make_shared<FiniteGroup>(
        from_table(name_ + "/" + std::to_string(normal_subgroup.size()), std::move(table),
                   ExecPolicy::Serial));
    q.proj = std::move(proj);
    return q;
}

FiniteGroup::Subgroup FiniteGroup::subgroup(const std::vector<unsigned>& elements) const {
    if (!is_subgroup(elements)) fail("DOMAIN", "element set is not a subgroup");
    std::vector<unsigned> embed(elements.begin(), elements.end());
    std::sort(embed.begin(), embed.end());
    embed.erase(std::unique(embed.begin(), embed.end()), embed.end());
    unsigned k = static_cast<unsigned>(embed.size());
    auto pos = [&](unsigned g) {
        return static_cast<unsigned>(
            std::lower_bound(embed.begin(), embed.end(), g) - embed.begin());
    };
    std::vector<std::vector<unsigned>> table(k, std::vector<unsigned>(k));
    for (unsigned i = 0; i < k; ++i)
        for (unsigned j = 0; j < k; ++j) table[i][j] = pos(mul(embed[i], embed[j]));
    Subgroup s;
    s.group = std::make_shared<FiniteGroup>(
        from_table(name_ + "<" + std::to_string(k) + ">", std::move(table), ExecPolicy::Serial));
    s.embed = std::move(embed);
    return s;
}

} // namespace semilift
