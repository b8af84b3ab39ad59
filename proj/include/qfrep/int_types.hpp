#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qfrep {

// Exact arbitrary-precision integer / rational scalars used everywhere a
// result must be bit-exact.  Floating point only enters for reporting.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// ---------------------------------------------------------------------------
// Error taxonomy.  The CLI maps these onto exit codes; library users catch
// them by type.
// ---------------------------------------------------------------------------

struct QfError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : QfError {
    using QfError::QfError;
};

struct NotSymmetric : QfError {
    using QfError::QfError;
};

struct NotPositiveDefinite : QfError {
    int minor_index;  // 1-based index of the first non-positive leading minor
    NotPositiveDefinite(int idx, const std::string& msg) : QfError(msg), minor_index(idx) {}
};

struct UnsupportedDimension : QfError {
    using QfError::QfError;
};

struct NotReduced : QfError {
    using QfError::QfError;
};

struct DegenerateGamma : QfError {
    using QfError::QfError;
};

struct NotPrime : QfError {
    using QfError::QfError;
};

struct StabilizationNotReached : QfError {
    int t_cap;
    StabilizationNotReached(int cap, const std::string& msg) : QfError(msg), t_cap(cap) {}
};

struct OracleTooLarge : QfError {
    using QfError::QfError;
};

struct CapExceeded : QfError {
    using QfError::QfError;
};

struct DimensionRegime : QfError {
    using QfError::QfError;
};

// ---------------------------------------------------------------------------
// Small exact-arithmetic helpers.
// ---------------------------------------------------------------------------

inline Int isqrt(const Int& n) {
    if (n < 0) throw QfError("isqrt of negative");
    return boost::multiprecision::sqrt(n);  // floor sqrt for cpp_int
}

// floor(a/b) for b > 0 (cpp_int division truncates toward zero).
inline Int floor_div(const Int& a, const Int& b) {
    Int q = a / b;
    if (a % b != 0 && a < 0) --q;
    return q;
}

inline Int ceil_div(const Int& a, const Int& b) {
    Int q = a / b;
    if (a % b != 0 && a > 0) ++q;
    return q;
}

// Largest y >= 0 with y*y*s <= rem, for s > 0, rem >= 0.
inline Int isqrt_quotient(const Int& rem, const Int& s) {
    Int y = isqrt(rem / s);
    while ((y + 1) * (y + 1) * s <= rem) ++y;
    while (y > 0 && y * y * s > rem) --y;
    return y;
}

inline Int pow_int(const Int& base, unsigned long exp) {
    Int r = 1, b = base;
    while (exp) {
        if (exp & 1) r *= b;
        b *= b;
        exp >>= 1;
    }
    return r;
}

// p-adic valuation of n != 0.
inline int valuation(Int n, const Int& p) {
    if (n == 0) throw QfError("valuation of zero");
    if (n < 0) n = -n;
    int v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

inline Rat rat(const Int& num, const Int& den) { return Rat(num) / Rat(den); }

inline Int numerator(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int denominator(const Rat& r) { return boost::multiprecision::denominator(r); }

// Trial-division primality; moduli in this project are small.
inline bool is_prime(const Int& p) {
    if (p < 2) return false;
    if (p < 4) return true;
    if (p % 2 == 0) return false;
    for (Int d = 3; d * d <= p; d += 2)
        if (p % d == 0) return false;
    return true;
}

}  // namespace qfrep
