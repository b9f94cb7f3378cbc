#include "semilift/rational.hpp"

namespace semilift {

Rat parse_rational(std::string_view text) {
    std::string s(text);
    size_t start = s.find_first_not_of(" \t");
    size_t end = s.find_last_not_of(" \t");
    if (start == std::string::npos) fail("PARSE_ERROR", "empty rational literal");
    s = s.substr(start, end - start + 1);
    size_t slash = s.find('/');
    auto digits_ok = [](const std::string& t) {
        if (t.empty()) return false;
        size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
        return true;
    };
    try {
        if (slash == std::string::npos) {
            if (!digits_ok(s)) fail("PARSE_ERROR", "bad rational literal: " + s);
            return Rat(Int(s));
        }
        std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        if (!digits_ok(num) || !digits_ok(den))
            fail("PARSE_ERROR", "bad rational literal: " + s);
        Int d(den);
        if (d == 0) fail("PARSE_ERROR", "zero denominator: " + s);
        Rat r(Int(num), d);
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument&) {
        fail("PARSE_ERROR", "bad rational literal: " + s);
    }
}

std::string to_string(const Rat& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

} // namespace semilift
