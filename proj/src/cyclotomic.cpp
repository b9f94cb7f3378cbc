#include "semilift/cyclotomic.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <sstream>

#include "semilift/numtheory.hpp"

namespace semilift {

namespace {

// Per-conductor reduction data: the cyclotomic polynomial and the power
// basis image of every exponent zeta_m^i, i < m (integer vectors).
struct CycTables {
    unsigned m = 1;
    unsigned phi = 1;
    std::vector<Int> poly;                  // Phi_m, degree phi, monic
    std::vector<std::vector<Int>> powers;   // powers[i] has length phi
};

std::vector<Int> poly_div_exact(const std::vector<Int>& num, const std::vector<Int>& den) {
    // Exact division of integer polynomials, den monic-leading after sign.
    std::vector<Int> rem = num;
    std::vector<Int> quot(num.size() >= den.size() ? num.size() - den.size() + 1 : 0, Int(0));
    while (rem.size() >= den.size()) {
        Int lead = rem.back() / den.back();
        size_t shift = rem.size() - den.size();
        quot[shift] = lead;
        for (size_t i = 0; i < den.size(); ++i) rem[shift + i] -= lead * den[i];
        while (!rem.empty() && rem.back() == 0) rem.pop_back();
        if (rem.empty()) break;
    }
    check(rem.empty(), "inexact cyclotomic polynomial division");
    return quot;
}

std::vector<Int> cyclotomic_poly(unsigned m) {
    // x^m - 1 divided by all Phi_d, d | m, d < m.
    std::vector<Int> poly(m + 1, Int(0));
    poly[0] = -1;
    poly[m] = 1;
    for (unsigned d = 1; d < m; ++d) {
        if (m % d != 0) continue;
        // Recompute Phi_d the same way; recursion depth is divisor-chain length.
        poly = poly_div_exact(poly, cyclotomic_poly(d));
    }
    return poly;
}

const CycTables& tables_for(unsigned m) {
    static std::shared_mutex mutex;
    static std::map<unsigned, std::unique_ptr<CycTables>> cache;
    {
        std::shared_lock lock(mutex);
        auto it = cache.find(m);
        if (it != cache.end()) return *it->second;
    }
    auto t = std::make_unique<CycTables>();
    t->m = m;
    t->phi = static_cast<unsigned>(totient(m));
    t->poly = cyclotomic_poly(m);
    t->powers.assign(m, std::vector<Int>(t->phi, Int(0)));
    for (unsigned i = 0; i < std::min(m, t->phi); ++i) t->powers[i][i] = 1;
    for (unsigned i = t->phi; i < m; ++i) {
        // zeta^i = zeta * zeta^{i-1}, reduced with x^phi = -sum_k poly[k] x^k.
        const auto& prev = t->powers[i - 1];
        auto& cur = t->powers[i];
        Int top = prev[t->phi - 1];
        for (unsigned k = 0; k < t->phi; ++k) {
            cur[k] = (k ? prev[k - 1] : Int(0)) - top * t->poly[k];
        }
    }
    std::unique_lock lock(mutex);
    auto [it, inserted] = cache.emplace(m, std::move(t));
    return *it->second;
}

// Solve A x = b exactly over Q; A given by columns. Returns nullopt if
// inconsistent. Deterministic partial pivoting by first nonzero row.
std::optional<std::vector<Rat>> solve_columns(const std::vector<std::vector<Rat>>& cols,
                                              std::vector<Rat> b) {
    size_t rows = b.size(), ncols = cols.size();
    std::vector<std::vector<Rat>> a(rows, std::vector<Rat>(ncols, Rat(0)));
    for (size_t j = 0; j < ncols; ++j)
        for (size_t i = 0; i < rows; ++i) a[i][j] = cols[j][i];
    std::vector<long> pivot_col(rows, -1);
    size_t r = 0;
    for (size_t c = 0; c < ncols && r < rows; ++c) {
        size_t sel = r;
        while (sel < rows && a[sel][c] == 0) ++sel;
        if (sel == rows) continue;
        std::swap(a[sel], a[r]);
        std::swap(b[sel], b[r]);
        Rat inv = a[r][c];
        for (size_t j = c; j < ncols; ++j) a[r][j] /= inv;
        b[r] /= inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rat f = a[i][c];
            for (size_t j = c; j < ncols; ++j) a[i][j] -= f * a[r][j];
            b[i] -= f * b[r];
        }
        pivot_col[r] = static_cast<long>(c);
        ++r;
    }
    for (size_t i = r; i < rows; ++i)
        if (b[i] != 0) return std::nullopt;
    std::vector<Rat> x(ncols, Rat(0));
    for (size_t i = 0; i < r; ++i) x[static_cast<size_t>(pivot_col[i])] = b[i];
    return x;
}

} // namespace

CycNum CycNum::from_rational(const Rat& r) { return CycNum(1, {r}); }

CycNum CycNum::from_exponents(u64 m, std::vector<Rat> coeffs) {
    if (m == 0) fail("DOMAIN", "cyclotomic conductor must be positive");
    if (coeffs.size() > m) fail("DOMAIN", "coefficient list longer than conductor");
    return normalized(m, std::move(coeffs));
}

CycNum CycNum::root_of_unity(u64 k, long long j) {
    if (k == 0) fail("DOMAIN", "root of unity of order zero");
    long long jm = j % static_cast<long long>(k);
    if (jm < 0) jm += static_cast<long long>(k);
    std::vector<Rat> c(k, Rat(0));
    c[static_cast<size_t>(jm)] = 1;
    return normalized(k, std::move(c));
}

CycNum CycNum::normalized(u64 m, std::vector<Rat> exp_coeffs) {
    exp_coeffs.resize(m, Rat(0));
    // Fold m = 2 (mod 4) onto the odd part: zeta_{2k} = -zeta_k^{(k+1)/2}.
    while (m % 4 == 2) {
        u64 k = m / 2;
        std::vector<Rat> folded(k, Rat(0));
        u64 half = (k + 1) / 2;
        for (u64 i = 0; i < m; ++i) {
            if (exp_coeffs[i] == 0) continue;
            u64 e = (half * (i % k)) % k;
            if (i & 1) folded[e] -= exp_coeffs[i];
            else folded[e] += exp_coeffs[i];
        }
        m = k;
        exp_coeffs = std::move(folded);
    }
    // Reduce onto the power basis.
    auto reduce = [](unsigned mm, const std::vector<Rat>& ec) {
        const CycTables& t = tables_for(mm);
        std::vector<Rat> out(t.phi, Rat(0));
        for (unsigned i = 0; i < mm; ++i) {
            if (i >= ec.size() || ec[i] == 0) continue;
            const auto& row = t.powers[i];
            for (unsigned k = 0; k < t.phi; ++k)
                if (row[k] != 0) out[k] += ec[i] * Rat(row[k]);
        }
        return out;
    };
    unsigned mu = static_cast<unsigned>(m);
    std::vector<Rat> c = reduce(mu, exp_coeffs);
    // Conductor minimization: descend through prime-index subfields while the
    // element lies in one. Fast path for visibly rational elements.
    for (;;) {
        if (mu == 1) break;
        bool tail_zero = std::all_of(c.begin() + 1, c.end(), [](const Rat& r) { return r == 0; });
        if (tail_zero) {
            c.resize(1);
            mu = 1;
            break;
        }
        bool descended = false;
        for (auto [p, e] : factor(mu)) {
            u64 d = mu / p;
            if (d % 4 == 2) d /= 2;
            if (d == mu) continue;
            unsigned du = static_cast<unsigned>(d);
            const CycTables& t = tables_for(mu);
            unsigned dphi = static_cast<unsigned>(totient(du));
            std::vector<std::vector<Rat>> cols(dphi);
            u64 step = mu / du;
            for (unsigned j = 0; j < dphi; ++j) {
                const auto& row = t.powers[(step * j) % mu];
                cols[j].assign(row.begin(), row.end());
            }
            auto sol = solve_columns(cols, c);
            if (sol) {
                mu = du;
                c = reduce(mu, *sol);
                descended = true;
                break;
            }
        }
        if (!descended) break;
    }
    return CycNum(mu, std::move(c));
}

bool CycNum::is_zero() const {
    return conductor_ == 1 && coeffs_[0] == 0;
}

Rat CycNum::rational_value() const {
    if (!is_rational()) fail("DOMAIN", "not a rational cyclotomic: " + to_string());
    return coeffs_[0];
}

CycNum CycNum::operator-() const {
    std::vector<Rat> c = coeffs_;
    for (auto& x : c) x = -x;
    return CycNum(conductor_, std::move(c));
}

CycNum CycNum::operator+(const CycNum& o) const {
    u64 L = std::lcm<u64>(conductor_, o.conductor_);
    std::vector<Rat> acc(L, Rat(0));
    u64 s1 = L / conductor_, s2 = L / o.conductor_;
    for (size_t i = 0; i < coeffs_.size(); ++i)
        if (coeffs_[i] != 0) acc[(i * s1) % L] += coeffs_[i];
    for (size_t i = 0; i < o.coeffs_.size(); ++i)
        if (o.coeffs_[i] != 0) acc[(i * s2) % L] += o.coeffs_[i];
    return normalized(L, std::move(acc));
}

CycNum CycNum::operator-(const CycNum& o) const { return *this + (-o); }

CycNum CycNum::operator*(const CycNum& o) const {
    u64 L = std::lcm<u64>(conductor_, o.conductor_);
    std::vector<Rat> acc(L, Rat(0));
    u64 s1 = L / conductor_, s2 = L / o.conductor_;
    for (size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i] == 0) continue;
        u64 e1 = (i * s1) % L;
        for (size_t j = 0; j < o.coeffs_.size(); ++j) {
            if (o.coeffs_[j] == 0) continue;
            acc[(e1 + j * s2) % L] += coeffs_[i] * o.coeffs_[j];
        }
    }
    return normalized(L, std::move(acc));
}

CycNum CycNum::inverse() const {
    if (is_zero()) fail("DIV_ZERO", "inverse of zero");
    if (conductor_ == 1) return from_rational(Rat(1) / coeffs_[0]);
    // Extended Euclid of the representative against Phi_m over Q[x];
    // Phi_m is irreducible so the gcd is a nonzero constant.
    const CycTables& t = tables_for(conductor_);
    std::vector<Rat> a(coeffs_);
    while (!a.empty() && a.back() == 0) a.pop_back();
    std::vector<Rat> b(t.poly.size());
    for (size_t i = 0; i < t.poly.size(); ++i) b[i] = Rat(t.poly[i]);
    // Invariant: r0 = u0 * a (mod Phi), r1 = u1 * a (mod Phi).
    std::vector<Rat> r0 = b, r1 = a, u0{Rat(0)}, u1{Rat(1)};
    auto deg = [](const std::vector<Rat>& p) { return static_cast<long>(p.size()) - 1; };
    auto trim = [](std::vector<Rat>& p) {
        while (!p.empty() && p.back() == 0) p.pop_back();
    };
    while (deg(r1) > 0) {
        // r0 = q * r1 + r2
        std::vector<Rat> rem = r0, q(std::max<long>(deg(r0) - deg(r1) + 1, 0), Rat(0));
        while (deg(rem) >= deg(r1)) {
            Rat f = rem.back() / r1.back();
            size_t shift = rem.size() - r1.size();
            q[shift] = f;
            for (size_t i = 0; i < r1.size(); ++i) rem[shift + i] -= f * r1[i];
            trim(rem);
            if (rem.empty()) break;
        }
        std::vector<Rat> u2(std::max(u0.size(), q.size() + u1.size()), Rat(0));
        for (size_t i = 0; i < u0.size(); ++i) u2[i] = u0[i];
        for (size_t i = 0; i < q.size(); ++i)
            for (size_t j = 0; j < u1.size(); ++j) u2[i + j] -= q[i] * u1[j];
        trim(u2);
        r0 = std::move(r1);
        r1 = std::move(rem);
        u0 = std::move(u1);
        u1 = std::move(u2);
        if (r1.empty()) fail("INTERNAL", "cyclotomic inverse hit zero remainder");
    }
    // r1 is a nonzero constant c with u1 * a = c (mod Phi).
    Rat c = r1[0];
    std::vector<Rat> inv(u1.size());
    for (size_t i = 0; i < u1.size(); ++i) inv[i] = u1[i] / c;
    return normalized(conductor_, std::move(inv));
}

CycNum CycNum::operator/(const CycNum& o) const { return *this * o.inverse(); }

CycNum CycNum::pow(long long e) const {
    if (e < 0) return inverse().pow(-e);
    CycNum r = one(), base = *this;
    unsigned long long k = static_cast<unsigned long long>(e);
    while (k) {
        if (k & 1) r = r * base;
        base = base * base;
        k >>= 1;
    }
    return r;
}

CycNum CycNum::galois(long long a) const {
    long long am = a % static_cast<long long>(conductor_);
    if (am < 0) am += conductor_;
    if (std::gcd<long long>(am, conductor_) != 1)
        fail("DOMAIN", "galois exponent not coprime to conductor");
    std::vector<Rat> acc(conductor_, Rat(0));
    for (size_t i = 0; i < coeffs_.size(); ++i)
        if (coeffs_[i] != 0) acc[(i * static_cast<u64>(am)) % conductor_] += coeffs_[i];
    return normalized(conductor_, std::move(acc));
}

std::optional<std::pair<u64, u64>> CycNum::as_root_of_unity() const {
    if (is_zero()) return std::nullopt;
    // The roots of unity in Q(zeta_m) form mu_M with M = lcm(2, m).
    u64 M = (conductor_ % 2 == 0) ? conductor_ : 2ull * conductor_;
    for (u64 t = 0; t < M; ++t) {
        if (*this == root_of_unity(M, static_cast<long long>(t))) {
            u64 g = std::gcd(t, M);
            if (t == 0) return std::make_pair<u64, u64>(1, 0);
            return std::make_pair(M / g, t / g);
        }
    }
    return std::nullopt;
}

bool CycNum::operator<(const CycNum& o) const {
    if (conductor_ != o.conductor_) return conductor_ < o.conductor_;
    for (size_t i = 0; i < coeffs_.size() && i < o.coeffs_.size(); ++i) {
        int c = cmp(coeffs_[i], o.coeffs_[i]);
        if (c != 0) return c < 0;
    }
    return coeffs_.size() < o.coeffs_.size();
}

std::string CycNum::to_string() const {
    std::ostringstream out;
    out << "cyc(" << conductor_ << ";";
    size_t last = coeffs_.size();
    while (last > 1 && coeffs_[last - 1] == 0) --last;
    for (size_t i = 0; i < last; ++i) {
        out << (i ? "," : " ") << semilift::to_string(coeffs_[i]);
    }
    out << ")";
    return out.str();
}

CycNum CycNum::parse(std::string_view text) {
    std::string s(text);
    size_t a = s.find_first_not_of(" \t");
    size_t b = s.find_last_not_of(" \t");
    if (a == std::string::npos) fail("PARSE_ERROR", "empty cyclotomic literal");
    s = s.substr(a, b - a + 1);
    if (s.rfind("cyc(", 0) != 0) return from_rational(parse_rational(s));
    if (s.back() != ')') fail("PARSE_ERROR", "unterminated cyc(...): " + s);
    std::string body = s.substr(4, s.size() - 5);
    size_t semi = body.find(';');
    if (semi == std::string::npos) fail("PARSE_ERROR", "cyc(...) missing ';': " + s);
    u64 m = 0;
    try {
        m = std::stoull(body.substr(0, semi));
    } catch (const std::exception&) {
        fail("PARSE_ERROR", "bad conductor in: " + s);
    }
    if (m == 0) fail("PARSE_ERROR", "zero conductor in: " + s);
    std::vector<Rat> coeffs;
    std::string rest = body.substr(semi + 1);
    size_t pos = 0;
    while (pos <= rest.size()) {
        size_t comma = rest.find(',', pos);
        std::string item = rest.substr(pos, comma == std::string::npos ? std::string::npos
                                                                       : comma - pos);
        if (item.find_first_not_of(" \t") != std::string::npos)
            coeffs.push_back(parse_rational(item));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (coeffs.size() > m) fail("PARSE_ERROR", "too many coefficients in: " + s);
    return from_exponents(m, std::move(coeffs));
}

CycNum sqrt_prime_power(u64 q) {
    u64 p = prime_power_base(q);
    if (p == 0) fail("DOMAIN", "sqrt of a non prime power: " + std::to_string(q));
    unsigned k = 0;
    for (u64 v = q; v > 1; v /= p) ++k;
    Rat whole(1);
    for (unsigned i = 0; i + 1 < k; i += 2) whole *= Rat(static_cast<long>(p));
    CycNum base = CycNum::from_rational(whole);
    if (k % 2 == 0) return base;
    if (p == 2) {
        CycNum z8 = CycNum::root_of_unity(8, 1);
        return base * (z8 + z8.inverse());
    }
    // Quadratic Gauss sum g = sum_n zeta_p^{n^2} equals sqrt(p) for
    // p = 1 (mod 4) and i*sqrt(p) for p = 3 (mod 4).
    std::vector<Rat> counts(p, Rat(0));
    for (u64 n = 0; n < p; ++n) counts[(n * n) % p] += 1;
    CycNum g = CycNum::from_exponents(p, std::move(counts));
    if (p % 4 == 1) return base * g;
    return base * g * CycNum::root_of_unity(4, -1);
}

} // namespace semilift
