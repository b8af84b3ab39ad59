#pragma once

#include "int_types.hpp"
#include "matrix.hpp"

#include <boost/integer/common_factor_rt.hpp>

#include <cmath>
#include <functional>
#include <future>
#include <type_traits>
#include <utility>
#include <vector>

namespace qfrep {

// ---------------------------------------------------------------------------
// Fraction-free LDL^T data (Bareiss).  With delta_0 := 1 and
//   Y_k = delta_k x_k + sum_{j>k} m(k,j) x_j,
// every positive definite integer Gram matrix G satisfies
//   x^T G x = sum_k Y_k^2 / (delta_k delta_{k-1}),
// all quantities integers.  This keeps the enumeration exact with no
// rational arithmetic in the hot loop.
// ---------------------------------------------------------------------------
struct FracFreeLDL {
    std::vector<Int> delta;  // delta[k] = leading (k+1)-minor, all > 0
    IntMat m;                // row k holds the pivot-time entries m(k,j), j >= k
};

inline FracFreeLDL fraction_free_ldl(const IntMat& g) {
    const std::size_t n = g.rows();
    FracFreeLDL out;
    out.m = g;
    out.delta.resize(n);
    Int prev = 1;
    for (std::size_t k = 0; k < n; ++k) {
        out.delta[k] = out.m(k, k);
        if (out.delta[k] <= 0)
            throw NotPositiveDefinite(static_cast<int>(k + 1), "LDL pivot not positive");
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                out.m(i, j) = (out.m(i, j) * out.delta[k] - out.m(i, k) * out.m(k, j)) / prev;
        prev = out.delta[k];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Enumeration of w in Z^r with w == sigma (mod L) componentwise and
// w^T G w = T, by depth-first interval search on the LDL cone (Fincke-Pohst
// with exact integer bounds throughout).  Shifted problems (affine sublattice
// cosets, rational centers) are pre-scaled by callers into this form.
// ---------------------------------------------------------------------------

struct EnumProblem {
    IntMat G;                // symmetric positive definite, integer
    Int T;                   // target norm
    Int L = 1;               // congruence modulus (1 = plain lattice)
    std::vector<Int> sigma;  // residues mod L; empty means all zero
};

struct EnumResult {
    Int count = 0;
    unsigned long long nodes = 0;
};

using EnumVisitor = std::function<void(const std::vector<Int>&)>;

namespace detail {

inline __int128 to_i128(const Int& v) {
    Int a = abs(v);
    auto lo = static_cast<std::uint64_t>(a & Int(0xffffffffffffffffULL));
    auto hi = static_cast<std::uint64_t>((a >> 64) & Int(0xffffffffffffffffULL));
    auto r = static_cast<__int128>((static_cast<unsigned __int128>(hi) << 64) | lo);
    return v < 0 ? -r : r;
}

inline Int from_i128(__int128 v) {
    bool neg = v < 0;
    auto u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
    Int r = static_cast<std::uint64_t>(u >> 64);
    r <<= 64;
    r |= static_cast<std::uint64_t>(u);
    return neg ? -r : r;
}

template <class I>
I to_scalar(const Int& v);
template <>
inline Int to_scalar<Int>(const Int& v) {
    return v;
}
template <>
inline __int128 to_scalar<__int128>(const Int& v) {
    return to_i128(v);
}

template <class I>
Int to_Int(const I& v);
template <>
inline Int to_Int<Int>(const Int& v) {
    return v;
}
template <>
inline Int to_Int<__int128>(const __int128& v) {
    return from_i128(v);
}

template <class I>
I enum_isqrt(const I& v);
template <>
inline Int enum_isqrt<Int>(const Int& v) {
    return isqrt(v);
}
template <>
inline __int128 enum_isqrt<__int128>(const __int128& v) {
    auto y = static_cast<__int128>(std::sqrt(static_cast<double>(v)));
    if (y < 0) y = 0;
    while ((y + 1) * (y + 1) <= v) ++y;
    while (y > 0 && y * y > v) --y;
    return y;
}

template <class I>
I efloor_div(const I& a, const I& b) {
    I q = a / b;
    if (a % b != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}
template <class I>
I eceil_div(const I& a, const I& b) {
    I q = a / b;
    if (a % b != 0 && ((a < 0) == (b < 0))) ++q;
    return q;
}
template <class I>
I emod(const I& a, const I& m) {  // representative in [0, m)
    I r = a % m;
    if (r < 0) r += m;
    return r;
}

// Largest y >= 0 with y^2 * s <= rem (rem >= 0, s > 0).
template <class I>
I isqrt_quot(const I& rem, const I& s) {
    I y = enum_isqrt<I>(rem / s);
    while ((y + 1) * (y + 1) * s <= rem) ++y;
    while (y > 0 && y * y * s > rem) --y;
    return y;
}

template <class I>
struct EnumCore {
    int n = 0;
    std::vector<I> delta;
    std::vector<I> scale;                                 // Delta / (delta_k delta_{k-1})
    std::vector<std::vector<std::pair<int, I>>> updates;  // per column k: (j < k, m(j,k) != 0)
    I L = 1;
    std::vector<I> sigma;

    std::vector<I> s_partial;  // S[k] = sum over already-fixed j > k of m(k,j) x_j
    std::vector<I> x;
    unsigned long long count = 0;
    unsigned long long nodes = 0;
    const EnumVisitor* visit = nullptr;

    void emit() {
        ++count;
        if (visit && *visit) {
            std::vector<Int> out(n);
            for (int i = 0; i < n; ++i) out[i] = to_Int<I>(x[i]);
            (*visit)(out);
        }
    }

    void solve_leaf(const I& rem) {
        ++nodes;
        if (rem % scale[0] != 0) return;
        I y2 = rem / scale[0];
        I y = enum_isqrt<I>(y2);
        if (y * y != y2) return;
        for (int sgn = 0; sgn < (y == 0 ? 1 : 2); ++sgn) {
            I Y = sgn ? I(-y) : y;
            I num = Y - s_partial[0];
            if (num % delta[0] != 0) continue;
            I x0 = num / delta[0];
            if (emod<I>(x0 - sigma[0], L) != 0) continue;
            x[0] = x0;
            emit();
        }
    }

    void descend(int k, const I& rem) {
        if (k == 0) {
            solve_leaf(rem);
            return;
        }
        ++nodes;
        I ymax = isqrt_quot<I>(rem, scale[k]);
        I lo = eceil_div<I>(-ymax - s_partial[k], delta[k]);
        I hi = efloor_div<I>(ymax - s_partial[k], delta[k]);
        if (L != 1) lo += emod<I>(sigma[k] - lo, L);
        loop(k, rem, lo, hi);
    }

    void loop(int k, const I& rem, const I& lo, const I& hi) {
        for (I xk = lo; xk <= hi; xk += L) {
            I Y = delta[k] * xk + s_partial[k];
            I used = Y * Y * scale[k];
            if (used > rem) continue;  // only possible on restricted top chunks
            x[k] = xk;
            for (const auto& [j, c] : updates[k]) s_partial[j] += c * xk;
            descend(k - 1, rem - used);
            for (const auto& [j, c] : updates[k]) s_partial[j] -= c * xk;
        }
    }
};

template <class I>
EnumCore<I> build_core(const FracFreeLDL& ldl, const EnumProblem& p, const Int& Delta) {
    const int n = static_cast<int>(p.G.rows());
    EnumCore<I> core;
    core.n = n;
    core.delta.resize(n);
    core.scale.resize(n);
    core.updates.assign(n, {});
    core.sigma.assign(n, I(0));
    core.s_partial.assign(n, I(0));
    core.x.assign(n, I(0));
    core.L = to_scalar<I>(p.L);
    Int prev = 1;
    for (int k = 0; k < n; ++k) {
        core.delta[k] = to_scalar<I>(ldl.delta[k]);
        core.scale[k] = to_scalar<I>(Int(Delta / (ldl.delta[k] * prev)));
        prev = ldl.delta[k];
        for (int j = 0; j < k; ++j)
            if (ldl.m(j, k) != 0) core.updates[k].emplace_back(j, to_scalar<I>(ldl.m(j, k)));
        if (!p.sigma.empty()) core.sigma[k] = to_scalar<I>(p.sigma[k]);
    }
    return core;
}

inline Int common_scale(const FracFreeLDL& ldl) {
    Int Delta = 1, prev = 1;
    for (std::size_t k = 0; k < ldl.delta.size(); ++k) {
        Delta = boost::integer::lcm(Delta, ldl.delta[k] * prev);
        prev = ldl.delta[k];
    }
    return Delta;
}

// Worst-case magnitude certificate: every intermediate the recursion touches
// must stay below 2^118, otherwise fall back to cpp_int.
inline bool fits_int128(const FracFreeLDL& ldl, const EnumProblem& p, const Int& Delta) {
    const int n = static_cast<int>(p.G.rows());
    const Int lim = Int(1) << 118;
    if (p.T * Delta >= lim) return false;
    RatMat inv = inverse_rational(p.G);
    std::vector<Int> xb(n);
    for (int j = 0; j < n; ++j) {
        Rat b = Rat(p.T) * inv(j, j);
        xb[j] = isqrt(numerator(b) / denominator(b)) + 1 + abs(p.L);
    }
    Int prev = 1;
    for (int k = 0; k < n; ++k) {
        Int ymax = ldl.delta[k] * xb[k];
        for (int j = k + 1; j < n; ++j) ymax += abs(ldl.m(k, j)) * xb[j];
        Int scale = Delta / (ldl.delta[k] * prev);
        prev = ldl.delta[k];
        if ((ymax + 1) * (ymax + 1) * scale >= lim) return false;
    }
    return true;
}

template <class I>
EnumResult enum_run(const FracFreeLDL& ldl, const EnumProblem& p, const Int& Delta,
                    const EnumVisitor& visit, int threads) {
    const I rem = to_scalar<I>(Int(p.T * Delta));
    const bool listing = static_cast<bool>(visit);

    if (threads <= 1 || listing || p.G.rows() < 2) {
        auto core = build_core<I>(ldl, p, Delta);
        core.visit = &visit;
        core.descend(core.n - 1, rem);
        return {Int(core.count), core.nodes};
    }

    // Count-only parallel mode: split the outermost coordinate interval into
    // contiguous chunks of congruence steps.
    auto proto = build_core<I>(ldl, p, Delta);
    const int k = proto.n - 1;
    I ymax = isqrt_quot<I>(rem, proto.scale[k]);
    I lo = eceil_div<I>(I(-ymax), proto.delta[k]);
    I hi = efloor_div<I>(ymax, proto.delta[k]);
    if (proto.L != 1) lo += emod<I>(proto.sigma[k] - lo, proto.L);
    if (lo > hi) return {};
    I span = (hi - lo) / proto.L + 1;
    int nt = threads;
    if (span < I(nt)) nt = static_cast<int>(to_Int<I>(span).template convert_to<long long>());
    std::vector<std::future<EnumResult>> futs;
    for (int t = 0; t < nt; ++t) {
        I c_lo = lo + proto.L * I((span * t) / nt);
        I c_hi = lo + proto.L * I((span * (t + 1)) / nt - 1);
        futs.push_back(std::async(std::launch::async, [&ldl, &p, &Delta, rem, c_lo, c_hi]() {
            auto core = build_core<I>(ldl, p, Delta);
            core.visit = nullptr;
            core.loop(core.n - 1, rem, c_lo, c_hi);
            return EnumResult{Int(core.count), core.nodes};
        }));
    }
    EnumResult total;
    for (auto& f : futs) {
        EnumResult r = f.get();
        total.count += r.count;
        total.nodes += r.nodes;
    }
    return total;
}

}  // namespace detail

/// Enumerates (or counts, when no visitor is given) all solutions of the
/// congruent norm equation.  Deterministic: the thread count never changes
/// the result (exact per-chunk subtotals, summed in fixed order).
inline EnumResult enumerate_norm_solutions(const EnumProblem& p, const EnumVisitor& visit = {},
                                           int threads = 1) {
    if (p.T < 0) return {};
    FracFreeLDL ldl = fraction_free_ldl(p.G);
    Int Delta = detail::common_scale(ldl);
    if (detail::fits_int128(ldl, p, Delta))
        return detail::enum_run<__int128>(ldl, p, Delta, visit, threads);
    return detail::enum_run<Int>(ldl, p, Delta, visit, threads);
}

}  // namespace qfrep
