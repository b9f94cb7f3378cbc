#include "semilift/representation.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "semilift/error.hpp"

namespace semilift {

CycMatrix CycMatrix::identity(unsigned n) {
    CycMatrix m(n);
    for (unsigned i = 0; i < n; ++i) m.at(i, i) = CycNum::one();
    return m;
}

CycMatrix CycMatrix::operator*(const CycMatrix& o) const {
    check(n_ == o.n_, "matrix dimension mismatch");
    CycMatrix out(n_);
    for (unsigned i = 0; i < n_; ++i)
        for (unsigned k = 0; k < n_; ++k) {
            const CycNum& aik = at(i, k);
            if (aik.is_zero()) continue;
            for (unsigned j = 0; j < n_; ++j) {
                if (o.at(k, j).is_zero()) continue;
                out.at(i, j) = out.at(i, j) + aik * o.at(k, j);
            }
        }
    return out;
}

CycMatrix CycMatrix::operator+(const CycMatrix& o) const {
    check(n_ == o.n_, "matrix dimension mismatch");
    CycMatrix out(n_);
    for (size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] + o.a_[i];
    return out;
}

CycMatrix CycMatrix::scaled(const CycNum& c) const {
    CycMatrix out(n_);
    for (size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] * c;
    return out;
}

CycMatrix CycMatrix::transposed() const {
    CycMatrix out(n_);
    for (unsigned i = 0; i < n_; ++i)
        for (unsigned j = 0; j < n_; ++j) out.at(j, i) = at(i, j);
    return out;
}

CycNum CycMatrix::trace() const {
    CycNum t = CycNum::zero();
    for (unsigned i = 0; i < n_; ++i) t = t + at(i, i);
    return t;
}

CycPoly CycMatrix::char_reverse() const {
    // Faddeev-LeVerrier: c_0 = 1, N_1 = I,
    //   c_k = -tr(A N_k)/k,  N_{k+1} = A N_k + c_k I.
    // Then det(tI - A) = sum_k c_k t^{n-k} and det(I - A T) = sum_k c_k T^k.
    CycPoly c{CycNum::one()};
    CycMatrix n = CycMatrix::identity(n_);
    for (unsigned k = 1; k <= n_; ++k) {
        CycMatrix an = *this * n;
        CycNum ck = -(an.trace() / CycNum::from_rational(Rat(static_cast<long>(k))));
        c.push_back(ck);
        if (k < n_) {
            n = an;
            for (unsigned i = 0; i < n_; ++i) n.at(i, i) = n.at(i, i) + ck;
        }
    }
    return c;
}

bool OneDimChar::is_trivial() const {
    return std::all_of(values.begin(), values.end(),
                       [](const RootOfUnity& z) { return z.is_one(); });
}

u64 OneDimChar::order() const {
    u64 o = 1;
    for (const auto& z : values) o = std::lcm(o, z.order);
    return o;
}

OneDimChar OneDimChar::operator*(const OneDimChar& o) const {
    check(group->size() == o.group->size(), "character group mismatch");
    OneDimChar out{group, values};
    for (size_t i = 0; i < values.size(); ++i) out.values[i] = values[i] * o.values[i];
    return out;
}

OneDimChar OneDimChar::pow(long long e) const {
    OneDimChar out{group, values};
    for (auto& z : out.values) z = z.pow(e);
    return out;
}

namespace {

// Characters of an abelian group: walk a generator chain, extending each
// character of the current subgroup in all d possible ways at each step.
std::vector<std::vector<RootOfUnity>> abelian_characters(const FiniteGroup& a) {
    unsigned n = a.size();
    check(a.is_abelian(), "character enumeration needs an abelian group");
    std::vector<std::vector<RootOfUnity>> chars{std::vector<RootOfUnity>(n)}; // trivial on {e}
    std::vector<unsigned> sub{a.identity()};              // current subgroup, sorted
    std::vector<bool> in_sub(n, false);
    in_sub[a.identity()] = true;

    while (sub.size() < n) {
        unsigned g = 0;
        while (in_sub[g]) ++g; // smallest element outside

        // Relative order d: least d > 0 with g^d in the current subgroup.
        unsigned d = 1;
        unsigned p = g;
        while (!in_sub[p]) {
            p = a.mul(p, g);
            ++d;
        }
        unsigned gd = p; // g^d, inside the subgroup

        // New subgroup: union of cosets g^e * sub for e = 0..d-1.
        std::vector<unsigned> grown;
        std::vector<unsigned> coset_exp(n, 0), coset_base(n, 0);
        unsigned ge = a.identity();
        for (unsigned e = 0; e < d; ++e) {
            for (unsigned h : sub) {
                unsigned x = a.mul(ge, h);
                grown.push_back(x);
                coset_exp[x] = e;
                coset_base[x] = h;
            }
            ge = a.mul(ge, g);
        }
        std::sort(grown.begin(), grown.end());

        std::vector<std::vector<RootOfUnity>> next;
        next.reserve(chars.size() * d);
        for (const auto& chi : chars) {
            // chi(g) must be a d-th root of chi(g^d).
            RootOfUnity base_val = chi[gd];
            for (unsigned t = 0; t < d; ++t) {
                // One d-th root of e^{2*pi*i*j/k} is e^{2*pi*i*j/(dk)}; the
                // others differ by powers of e^{2*pi*i/d}.
                RootOfUnity root = RootOfUnity::make(
                    static_cast<long long>(base_val.exp), base_val.order * d);
                RootOfUnity val = root * RootOfUnity::make(t, d);
                std::vector<RootOfUnity> ext(n);
                for (unsigned x : grown) ext[x] = val.pow(coset_exp[x]) * chi[coset_base[x]];
                next.push_back(std::move(ext));
            }
        }
        chars = std::move(next);
        sub = std::move(grown);
        for (unsigned x : sub) in_sub[x] = true;
    }
    return chars;
}

} // namespace

std::vector<OneDimChar> all_linear_characters(const GroupPtr& g) {
    auto comm = g->commutator_subgroup();
    auto q = g->quotient(comm);
    auto ab_chars = abelian_characters(*q.group);
    std::vector<OneDimChar> out;
    out.reserve(ab_chars.size());
    for (const auto& chi : ab_chars) {
        OneDimChar c{g, std::vector<RootOfUnity>(g->size())};
        for (unsigned x = 0; x < g->size(); ++x) c.values[x] = chi[q.proj[x]];
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(),
              [](const OneDimChar& a, const OneDimChar& b) { return a.values < b.values; });
    check(!out.empty() && out.front().is_trivial(), "trivial character must sort first");
    return out;
}

std::size_t homomorphism_violations(const FiniteGroup& g, const std::vector<CycMatrix>& images,
                                    ExecPolicy policy) {
    unsigned n = g.size();
    check(images.size() == n, "one image per element required");
    std::size_t bad = 0;
    if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for reduction(+ : bad) schedule(dynamic)
        for (long long a = 0; a < static_cast<long long>(n); ++a)
            for (unsigned b = 0; b < n; ++b)
                if (!(images[static_cast<unsigned>(a)] * images[b] ==
                      images[g.mul(static_cast<unsigned>(a), b)]))
                    ++bad;
    } else {
        for (unsigned a = 0; a < n; ++a)
            for (unsigned b = 0; b < n; ++b)
                if (!(images[a] * images[b] == images[g.mul(a, b)])) ++bad;
    }
    return bad;
}

Representation Representation::from_elements(std::string name, GroupPtr group,
                                             std::vector<CycMatrix> images, ExecPolicy policy) {
    Representation r;
    r.name_ = std::move(name);
    r.group_ = std::move(group);
    r.images_ = std::move(images);
    r.finish(policy);
    return r;
}

Representation Representation::from_generators(
    std::string name, GroupPtr group, const std::vector<std::pair<unsigned, CycMatrix>>& gens,
    ExecPolicy policy) {
    unsigned n = group->size();
    unsigned dim = gens.empty() ? 1 : gens.front().second.dim();
    std::vector<CycMatrix> images(n, CycMatrix(dim));
    std::vector<bool> have(n, false);
    images[group->identity()] = CycMatrix::identity(dim);
    have[group->identity()] = true;
    std::vector<unsigned> work{group->identity()};
    for (size_t head = 0; head < work.size(); ++head) {
        for (const auto& [gl, gm] : gens) {
            if (gm.dim() != dim) fail("DOMAIN", "generator image dimensions differ");
            unsigned nxt = group->mul(work[head], gl);
            if (have[nxt]) continue;
            images[nxt] = images[work[head]] * gm;
            have[nxt] = true;
            work.push_back(nxt);
        }
    }
    if (!std::all_of(have.begin(), have.end(), [](bool b) { return b; }))
        fail("DOMAIN", "given elements do not generate the group");
    return from_elements(std::move(name), std::move(group), std::move(images), policy);
}

void Representation::finish(ExecPolicy policy) {
    check(group_ != nullptr, "representation needs a group");
    unsigned n = group_->size();
    if (images_.size() != n) fail("DOMAIN", "one matrix per group element required");
    dim_ = images_.empty() ? 0 : images_[0].dim();
    if (dim_ == 0) fail("DOMAIN", "representation dimension must be positive");
    for (const auto& m : images_)
        if (m.dim() != dim_) fail("DOMAIN", "matrix dimensions differ across elements");
    if (!(images_[group_->identity()] == CycMatrix::identity(dim_)))
        fail("DOMAIN", "identity must map to the identity matrix");
    if (homomorphism_violations(*group_, images_, policy) != 0)
        fail("DOMAIN", "images are not multiplicative");
    character_.clear();
    character_.reserve(n);
    for (const auto& m : images_) character_.push_back(m.trace());
}

bool Representation::same_character(const Representation& o) const {
    return group_->size() == o.group_->size() && character_ == o.character_;
}

Rat Representation::inner_product(const Representation& o) const {
    if (group_->size() != o.group_->size())
        fail("DOMAIN", "inner product across groups of different order");
    CycNum acc = CycNum::zero();
    for (unsigned g = 0; g < group_->size(); ++g)
        acc = acc + character_[g] * o.character_[g].conj();
    acc = acc / CycNum::from_rational(Rat(static_cast<long>(group_->size())));
    if (!acc.is_rational()) fail("DOMAIN", "character pairing did not come out rational");
    return acc.rational_value();
}

Representation Representation::direct_sum(const Representation& o) const {
    check(group_ == o.group_ || group_->same_table(*o.group_), "direct sum needs a common group");
    std::vector<CycMatrix> images;
    images.reserve(images_.size());
    for (unsigned g = 0; g < group_->size(); ++g) {
        CycMatrix m(dim_ + o.dim_);
        for (unsigned i = 0; i < dim_; ++i)
            for (unsigned j = 0; j < dim_; ++j) m.at(i, j) = images_[g].at(i, j);
        for (unsigned i = 0; i < o.dim_; ++i)
            for (unsigned j = 0; j < o.dim_; ++j)
                m.at(dim_ + i, dim_ + j) = o.images_[g].at(i, j);
        images.push_back(std::move(m));
    }
    // Verification is skipped: blocks were verified separately.
    Representation r;
    r.name_ = name_ + "+" + o.name_;
    r.group_ = group_;
    r.dim_ = dim_ + o.dim_;
    r.images_ = std::move(images);
    for (unsigned g = 0; g < group_->size(); ++g)
        r.character_.push_back(character_[g] + o.character_[g]);
    return r;
}

Representation Representation::twisted(const OneDimChar& chi) const {
    check(chi.group->size() == group_->size(), "twist by a character of another group");
    Representation r;
    r.name_ = name_ + "*chi";
    r.group_ = group_;
    r.dim_ = dim_;
    r.images_.reserve(images_.size());
    r.character_.reserve(images_.size());
    for (unsigned g = 0; g < group_->size(); ++g) {
        CycNum c = chi.value(g).to_cycnum();
        r.images_.push_back(images_[g].scaled(c));
        r.character_.push_back(character_[g] * c);
    }
    return r;
}

Representation Representation::restricted(const FiniteGroup::Subgroup& sub) const {
    std::vector<CycMatrix> images;
    images.reserve(sub.embed.size());
    for (unsigned g : sub.embed) images.push_back(images_[g]);
    return from_elements(name_ + "|H", sub.group, std::move(images), ExecPolicy::Serial);
}

Representation Representation::dual() const {
    Representation r;
    r.name_ = name_ + "^";
    r.group_ = group_;
    r.dim_ = dim_;
    r.images_.reserve(images_.size());
    r.character_.reserve(images_.size());
    for (unsigned g = 0; g < group_->size(); ++g) {
        r.images_.push_back(images_[group_->inv(g)].transposed());
        r.character_.push_back(character_[group_->inv(g)]);
    }
    return r;
}

namespace {

CycMatrix averaging_with_frobenius(const Representation& rep, const std::vector<unsigned>& h,
                                   unsigned sigma) {
    const auto& g = *rep.group();
    check(!h.empty(), "empty subgroup");
    std::set<unsigned> hs(h.begin(), h.end());
    check(g.is_subgroup({hs.begin(), hs.end()}), "inertia elements do not form a subgroup");
    for (unsigned x : hs)
        if (!hs.count(g.conjugate(sigma, x)))
            fail("DOMAIN", "frobenius does not normalize the inertia subgroup");
    CycMatrix p(rep.dim());
    for (unsigned x : hs) p = p + rep.image(g.mul(x, sigma));
    return p.scaled(CycNum::from_rational(rat(1, static_cast<long>(hs.size()))));
}

} // namespace

CycNum Representation::invariant_trace(const std::vector<unsigned>& h, unsigned sigma) const {
    return averaging_with_frobenius(*this, h, sigma).trace();
}

CycPoly Representation::invariant_frobenius_poly(const std::vector<unsigned>& h,
                                                 unsigned sigma) const {
    CycPoly poly = averaging_with_frobenius(*this, h, sigma).char_reverse();
    while (!poly.empty() && poly.back().is_zero()) poly.pop_back();
    return poly;
}

Representation to_representation(const OneDimChar& chi, std::string name) {
    std::vector<CycMatrix> images;
    images.reserve(chi.values.size());
    for (const auto& z : chi.values) {
        CycMatrix m(1);
        m.at(0, 0) = z.to_cycnum();
        images.push_back(std::move(m));
    }
    return Representation::from_elements(std::move(name), chi.group, std::move(images),
                                         ExecPolicy::Serial);
}

Representation standard_representation(const GroupPtr& g) {
    const auto* perms = g->permutations();
    if (!perms) fail("DOMAIN", "standard representation needs a permutation group");
    unsigned deg = static_cast<unsigned>((*perms)[0].size());
    if (deg < 2) fail("DOMAIN", "permutation degree must be at least 2");
    unsigned d = deg - 1;
    std::vector<CycMatrix> images;
    images.reserve(g->size());
    for (unsigned e = 0; e < g->size(); ++e) {
        const auto& pi = (*perms)[e];
        CycMatrix m(d);
        // Basis b_j = e_j - e_{deg-1}; pi maps b_j to b_{pi(j)} - b_{pi(deg-1)}
        // with the convention b_{deg-1} = 0.
        for (unsigned j = 0; j < d; ++j) {
            if (pi[j] < d) m.at(pi[j], j) = m.at(pi[j], j) + CycNum::one();
            if (pi[deg - 1] < d) m.at(pi[deg - 1], j) = m.at(pi[deg - 1], j) - CycNum::one();
        }
        images.push_back(std::move(m));
    }
    return Representation::from_elements(g->name() + ".std", g, std::move(images),
                                         ExecPolicy::Serial);
}

std::vector<OneDimChar> self_twist_characters(const Representation& rep) {
    std::vector<OneDimChar> out;
    for (auto& chi : all_linear_characters(rep.group())) {
        bool fixes = true;
        for (unsigned g = 0; g < rep.group()->size() && fixes; ++g) {
            if (chi.value(g).is_one()) continue;
            fixes = (rep.character()[g] * chi.value(g).to_cycnum()) == rep.character()[g];
        }
        if (!fixes) continue;
        // det(rho ⊗ chi) = det(rho) * chi^dim forces chi^dim = 1.
        check(rep.dim() % chi.order() == 0, "self-twist order must divide the dimension");
        out.push_back(std::move(chi));
    }
    return out;
}

std::vector<RootOfUnity> unit_inverse_roots(CycPoly poly, u64 max_order) {
    while (!poly.empty() && poly.back().is_zero()) poly.pop_back();
    if (poly.empty() || !(poly.front() == CycNum::one()))
        fail("DOMAIN", "expected a polynomial with constant term 1");
    std::vector<RootOfUnity> roots;
    for (u64 k = 1; k <= max_order && poly.size() > 1; ++k) {
        if (max_order % k != 0) continue;
        for (u64 j = 0; j < k && poly.size() > 1; ++j) {
            if (k > 1 && std::gcd(j, k) != 1) continue;
            RootOfUnity z{k, j};
            CycNum zc = z.to_cycnum();
            CycNum zinv = z.inverse().to_cycnum();
            // Keep deflating while (1 - z T) divides the polynomial.
            while (poly.size() > 1 && poly_eval(poly, zinv).is_zero()) {
                // Synthetic division by (1 - z T): q_i = p_i + z * q_{i-1}.
                CycPoly q(poly.size() - 1, CycNum::zero());
                CycNum carry = CycNum::zero();
                for (size_t i = 0; i + 1 < poly.size(); ++i) {
                    q[i] = poly[i] + zc * carry;
                    carry = q[i];
                }
                poly = std::move(q);
                roots.push_back(z);
            }
        }
    }
    if (poly.size() != 1)
        fail("DOMAIN", "polynomial has a root that is not a unit of the expected order");
    std::sort(roots.begin(), roots.end());
    return roots;
}

} // namespace semilift
