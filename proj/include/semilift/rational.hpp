#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

#include "semilift/error.hpp"

namespace semilift {

using Rat = mpq_class;
using Int = mpz_class;

inline Rat rat(long num, long den = 1) {
    if (den == 0) fail("DIV_ZERO", "rational with zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

// Accepts "p", "-p", "p/q" with arbitrary-precision parts.
Rat parse_rational(std::string_view text);

// Canonical form: "p" when the denominator is 1, else "p/q" with q > 0.
std::string to_string(const Rat& r);

inline bool is_integer(const Rat& r) { return r.get_den() == 1; }

inline long to_long(const Rat& r) {
    if (!is_integer(r) || !r.get_num().fits_slong_p())
        fail("RANGE", "rational is not a small integer: " + to_string(r));
    return r.get_num().get_si();
}

} // namespace semilift
