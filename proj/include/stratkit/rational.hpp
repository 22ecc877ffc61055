#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

#include "stratkit/errors.hpp"

namespace stratkit {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int rat_num(const Rat& r) { return numerator(r); }
inline Int rat_den(const Rat& r) { return denominator(r); }

inline int sign_of(const Rat& r) {
    if (r > 0) return 1;
    if (r < 0) return -1;
    return 0;
}

// Floor of a/b for integers, b > 0.
inline Int floor_div(const Int& a, const Int& b) {
    Int q = a / b;
    if (a % b != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

inline Int floor_rat(const Rat& r) { return floor_div(rat_num(r), rat_den(r)); }

inline Int ceil_rat(const Rat& r) { return -floor_rat(-r); }

// Canonical text form: lowest terms, positive denominator, "p" when q == 1.
inline std::string format_rat(const Rat& r) {
    std::string s = rat_num(r).str();
    if (rat_den(r) != 1) s += "/" + rat_den(r).str();
    return s;
}

inline Rat parse_rat(const std::string& s) {
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(Int(s));
        Int num(s.substr(0, slash));
        Int den(s.substr(slash + 1));
        require_input(den != 0, "rational", "zero denominator in '" + s + "'");
        return Rat(num, den);
    } catch (const std::runtime_error& e) {
        throw input_error("rational", "cannot parse rational '" + s + "'");
    }
}

inline long long to_ll(const Int& v) {
    require_internal(v >= std::numeric_limits<long long>::min() &&
                         v <= std::numeric_limits<long long>::max(),
                     "integer out of 64-bit range");
    return static_cast<long long>(v);
}

}  // namespace stratkit
