#include "semilift/local_factor.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <numeric>
#include <sstream>

#include "semilift/error.hpp"
#include "semilift/numtheory.hpp"

namespace semilift {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Splits on `sep` at paren depth zero.
std::vector<std::string_view> split_top(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    int depth = 0;
    size_t start = 0;
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '(' || c == '{' || c == '[') ++depth;
        else if (c == ')' || c == '}' || c == ']') --depth;
        else if (c == sep && depth == 0) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    out.push_back(s.substr(start));
    return out;
}

long long parse_ll(std::string_view s, const char* what) {
    s = trim(s);
    if (s.empty()) fail("PARSE_ERROR", std::string("empty ") + what);
    bool neg = false;
    size_t i = 0;
    if (s[0] == '+' || s[0] == '-') { neg = s[0] == '-'; i = 1; }
    if (i == s.size()) fail("PARSE_ERROR", std::string("bad ") + what + ": '" + std::string(s) + "'");
    long long v = 0;
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
            fail("PARSE_ERROR", std::string("bad ") + what + ": '" + std::string(s) + "'");
        v = v * 10 + (s[i] - '0');
        if (v < 0) fail("RANGE", std::string(what) + " out of range");
    }
    return neg ? -v : v;
}

} // namespace

RootOfUnity RootOfUnity::make(long long num, u64 den) {
    if (den == 0) fail("DOMAIN", "root of unity with zero order");
    long long m = static_cast<long long>(den);
    long long e = ((num % m) + m) % m;
    u64 g = std::gcd(static_cast<u64>(e), den);
    if (e == 0) return RootOfUnity{1, 0};
    return RootOfUnity{den / g, static_cast<u64>(e) / g};
}

RootOfUnity RootOfUnity::operator*(const RootOfUnity& o) const {
    u64 k = std::lcm(order, o.order);
    u64 e = (exp * (k / order) + o.exp * (k / o.order)) % k;
    return make(static_cast<long long>(e), k);
}

RootOfUnity RootOfUnity::pow(long long e) const {
    long long m = static_cast<long long>(order);
    long long r = ((static_cast<long long>(exp % order) * (e % m)) % m + m) % m;
    return make(r, order);
}

std::string RootOfUnity::to_string() const {
    if (order == 1) return "1";
    if (order == 2) return "-1";
    std::ostringstream os;
    os << "z(" << order << "," << exp << ")";
    return os.str();
}

RootOfUnity RootOfUnity::parse(std::string_view text) {
    text = trim(text);
    if (text == "1" || text == "+1") return RootOfUnity{1, 0};
    if (text == "-1") return RootOfUnity{2, 1};
    if (!text.starts_with("z(") || !text.ends_with(")"))
        fail("PARSE_ERROR", "expected root-of-unity token, got '" + std::string(text) + "'");
    auto inner = text.substr(2, text.size() - 3);
    auto parts = split_top(inner, ',');
    if (parts.size() != 2) fail("PARSE_ERROR", "z(k,j) takes two arguments");
    long long k = parse_ll(parts[0], "root order");
    long long j = parse_ll(parts[1], "root exponent");
    if (k <= 0) fail("PARSE_ERROR", "root order must be positive");
    return make(j, static_cast<u64>(k));
}

InverseRoot InverseRoot::make(RootOfUnity unit, const Rat& weight, u64 q) {
    Rat doubled = weight * 2;
    if (!is_integer(doubled)) fail("DOMAIN", "weight denominator must divide 2");
    if (q == 0 || (q != 1 && prime_power_base(q) == 0))
        fail("DOMAIN", "inverse-root base must be a prime power, got " + std::to_string(q));
    return InverseRoot{unit, to_long(doubled), q};
}

InverseRoot InverseRoot::operator*(const InverseRoot& o) const {
    if (base != o.base) fail("DOMAIN", "product of inverse roots over distinct bases");
    return InverseRoot{unit * o.unit, twice_weight + o.twice_weight, base};
}

InverseRoot InverseRoot::pow(long long e) const {
    return InverseRoot{unit.pow(e), static_cast<long>(twice_weight * e), base};
}

InverseRoot InverseRoot::extension_power(unsigned p) const {
    if (p == 0) fail("DOMAIN", "extension degree must be positive");
    u64 qp = 1;
    for (unsigned i = 0; i < p; ++i) {
        if (qp > std::numeric_limits<u64>::max() / base) fail("RANGE", "extension base overflows");
        qp *= base;
    }
    return InverseRoot{unit.pow(static_cast<long long>(p)), twice_weight, qp};
}

CycNum InverseRoot::to_cycnum() const {
    if (twice_weight % 2 != 0)
        fail("DOMAIN", "inverse root with half-integer weight has no cyclotomic value");
    long w = twice_weight / 2;
    CycNum value = unit.to_cycnum();
    if (w == 0 || base == 1) return value;
    long half = (w % 2 == 0) ? w / 2 : (w - 1) / 2; // exact for even w-1
    Int qz(static_cast<unsigned long>(base));
    Rat power(1);
    if (half >= 0) {
        for (long i = 0; i < half; ++i) power *= qz;
    } else {
        for (long i = 0; i < -half; ++i) power /= qz;
    }
    value = value * CycNum::from_rational(power);
    if (w % 2 != 0) value = value * sqrt_prime_power(base);
    return value;
}

std::string InverseRoot::to_string() const {
    std::ostringstream os;
    os << "root(" << unit.order << "," << unit.exp << "; " << semilift::to_string(weight())
       << "; " << base << ")";
    return os.str();
}

InverseRoot InverseRoot::parse(std::string_view text) {
    text = trim(text);
    if (!text.starts_with("root(") || !text.ends_with(")"))
        fail("PARSE_ERROR", "expected root(k,j; w; q), got '" + std::string(text) + "'");
    auto inner = text.substr(5, text.size() - 6);
    auto parts = split_top(inner, ';');
    if (parts.size() != 3) fail("PARSE_ERROR", "root(...) takes three ';'-separated fields");
    auto unit_parts = split_top(parts[0], ',');
    if (unit_parts.size() != 2) fail("PARSE_ERROR", "root unit takes two ','-separated fields");
    long long k = parse_ll(unit_parts[0], "root order");
    long long j = parse_ll(unit_parts[1], "root exponent");
    if (k <= 0) fail("PARSE_ERROR", "root order must be positive");
    Rat w = parse_rational(trim(parts[1]));
    long long q = parse_ll(parts[2], "base");
    if (q <= 0) fail("PARSE_ERROR", "base must be positive");
    return make(RootOfUnity::make(j, static_cast<u64>(k)), w, static_cast<u64>(q));
}

CycPoly poly_mul(const CycPoly& a, const CycPoly& b) {
    if (a.empty() || b.empty()) return {};
    CycPoly out(a.size() + b.size() - 1, CycNum::zero());
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            out[i + j] = out[i + j] + a[i] * b[j];
    return out;
}

bool poly_equal(CycPoly a, CycPoly b) {
    while (!a.empty() && a.back().is_zero()) a.pop_back();
    while (!b.empty() && b.back().is_zero()) b.pop_back();
    return a == b;
}

CycNum poly_eval(const CycPoly& p, const CycNum& t) {
    CycNum acc = CycNum::zero();
    for (size_t i = p.size(); i-- > 0;) acc = acc * t + p[i];
    return acc;
}

std::string poly_to_string(const CycPoly& p) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < p.size(); ++i) {
        if (i) os << ", ";
        os << p[i].to_string();
    }
    os << "]";
    return os.str();
}

LocalFactor::LocalFactor(u64 q, std::vector<InverseRoot> roots) : q_(q), roots_(std::move(roots)) {
    for (const auto& r : roots_)
        if (r.base != q_)
            fail("DOMAIN", "inverse root over base " + std::to_string(r.base) +
                               " in a local factor at q=" + std::to_string(q_));
    std::sort(roots_.begin(), roots_.end());
}

LocalFactor LocalFactor::merged(const LocalFactor& o) const {
    if (q_ != o.q_) fail("DOMAIN", "merging local factors at distinct residue cardinalities");
    std::vector<InverseRoot> all = roots_;
    all.insert(all.end(), o.roots_.begin(), o.roots_.end());
    return LocalFactor(q_, std::move(all));
}

LocalFactor LocalFactor::twisted(const RootOfUnity& z) const {
    std::vector<InverseRoot> out;
    out.reserve(roots_.size());
    for (const auto& r : roots_) out.push_back(InverseRoot{r.unit * z, r.twice_weight, r.base});
    return LocalFactor(q_, std::move(out));
}

LocalFactor LocalFactor::contragredient() const {
    std::vector<InverseRoot> out;
    out.reserve(roots_.size());
    for (const auto& r : roots_) out.push_back(InverseRoot{r.unit.inverse(), -r.twice_weight, r.base});
    return LocalFactor(q_, std::move(out));
}

LocalFactor LocalFactor::extension_power(unsigned p) const {
    std::vector<InverseRoot> out;
    out.reserve(roots_.size());
    for (const auto& r : roots_) out.push_back(r.extension_power(p));
    u64 qp = 1;
    for (unsigned i = 0; i < p; ++i) qp *= q_;
    return LocalFactor(qp, std::move(out));
}

CycPoly LocalFactor::expand() const {
    CycPoly poly{CycNum::one()};
    for (const auto& r : roots_) {
        CycNum alpha = r.to_cycnum();
        poly.push_back(CycNum::zero());
        // multiply by (1 - alpha*T), highest coefficient first
        for (size_t i = poly.size(); i-- > 1;) poly[i] = poly[i] - alpha * poly[i - 1];
    }
    return poly;
}

std::string LocalFactor::to_string() const {
    std::ostringstream os;
    os << "{";
    for (size_t i = 0; i < roots_.size(); ++i) {
        if (i) os << ", ";
        os << roots_[i].to_string();
    }
    os << "}";
    return os.str();
}

LocalFactor LocalFactor::parse(std::string_view text, u64 q) {
    text = trim(text);
    if (!text.starts_with("{") || !text.ends_with("}"))
        fail("PARSE_ERROR", "expected {...} local factor, got '" + std::string(text) + "'");
    auto inner = trim(text.substr(1, text.size() - 2));
    std::vector<InverseRoot> roots;
    if (!inner.empty()) {
        for (auto part : split_top(inner, ',')) roots.push_back(InverseRoot::parse(part));
    }
    return LocalFactor(q, std::move(roots));
}

EpsilonDatum EpsilonDatum::make(CycNum w, Rat delta) {
    if (w.is_zero()) fail("DOMAIN", "epsilon constant must be nonzero");
    if (delta <= 0) fail("DOMAIN", "epsilon conductor term must be positive");
    return EpsilonDatum{std::move(w), std::move(delta)};
}

} // namespace semilift
