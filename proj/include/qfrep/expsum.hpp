#pragma once

#include "forms.hpp"
#include "int_types.hpp"
#include "local.hpp"
#include "matrix.hpp"
#include "modp.hpp"

#include <boost/integer/common_factor_rt.hpp>
#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include <optional>
#include <utility>
#include <vector>

namespace qfrep {

// 50-digit working precision: the q-sums cancel heavily, double would not
// leave a trustworthy imaginary-part residual.
using HP = boost::multiprecision::cpp_bin_float_50;
using CHP = boost::multiprecision::cpp_complex_50;

inline HP hp_pi() { return boost::math::constants::pi<HP>(); }

inline CHP unit_phase(const Int& num, const Int& den) {  // e(num/den)
    Int r = num % den;
    if (r < 0) r += den;
    HP theta = 2 * hp_pi() * HP(r.str()) / HP(den.str());
    return CHP(cos(theta), sin(theta));
}

/// Complete exponential sum query S_{a,q}(b): modulus q, residue vector a and
/// target vector b, both of length R = m(m+1)/2, upper triangle row-major
/// ((0,0),(0,1),...,(1,1),...).
struct ExponentialSumQuery {
    Int q;
    std::vector<Int> a;
    std::vector<Int> b;
};

struct ExpSumOptions {
    Int direct_cap = Int(100000000);  // cap on q^{mn} for direct evaluation
};

namespace detail {

// -------------------------------------------------------------------------
// Direct path: one pass over Z in (Z/q)^{mn} builds the joint residue
// histogram of the R constraint values z_i^T A z_j; every a-vector is then a
// cheap table sum.  Shared by exp_sum and the singular-series truncation.
// -------------------------------------------------------------------------

struct ResidueHistogram {
    u64 q = 0;
    int m = 0, n = 0, R = 0;
    std::vector<long long> counts;  // size q^R, mixed-radix index over the R values
};

inline ResidueHistogram residue_histogram(const QuadraticForm& a, int m, const Int& q_in,
                                          const Int& cap) {
    const int n = a.dim();
    const int R = pair_count(m);
    Int total = 1;
    for (int i = 0; i < n * m; ++i) {
        total *= q_in;
        if (total > cap)
            throw CapExceeded("direct exponential sum needs q^(mn) = " +
                              pow_int(q_in, n * m).str() + " > cap " + cap.str());
    }
    ResidueHistogram h;
    h.q = q_in.convert_to<u64>();
    h.m = m;
    h.n = n;
    h.R = R;
    Int hist_size = pow_int(q_in, R);
    if (hist_size > Int(1) << 26) throw CapExceeded("residue histogram q^R too large");
    h.counts.assign(hist_size.convert_to<std::size_t>(), 0);

    const u64 q = h.q;
    std::vector<std::vector<u64>> am(n, std::vector<u64>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) am[i][j] = int_mod(a(i, j), q);

    std::vector<u64> z(n * m, 0);
    std::vector<std::vector<u64>> w(m, std::vector<u64>(n, 0));  // w_i = A z_i

    // odometer over all coordinates with O(n) updates per step
    auto leaf = [&]() {
        std::size_t idx = 0;
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                u64 f = 0;
                for (int v = 0; v < n; ++v) f = (f + mulmod(z[i * n + v], w[j][v], q)) % q;
                idx = idx * q + f;
            }
        ++h.counts[idx];
    };
    while (true) {
        leaf();
        int c = 0;
        while (c < n * m) {
            int col = c / n, row = c % n;
            if (z[c] + 1 < q) {
                ++z[c];
                for (int u = 0; u < n; ++u) w[col][u] = (w[col][u] + am[u][row]) % q;
                break;
            }
            u64 old = z[c];
            z[c] = 0;
            for (int u = 0; u < n; ++u)
                w[col][u] = (w[col][u] + mulmod(q - (old % q), am[u][row], q)) % q;
            ++c;
        }
        if (c == n * m) break;
    }
    return h;
}

inline CHP exp_sum_from_histogram(const ResidueHistogram& h, const std::vector<Int>& avec,
                                  const std::vector<Int>& bvec) {
    const u64 q = h.q;
    std::vector<CHP> roots(q);
    for (u64 k = 0; k < q; ++k) roots[k] = unit_phase(Int(k), Int(q));
    std::vector<u64> am(h.R), bm(h.R);
    for (int r = 0; r < h.R; ++r) {
        am[r] = int_mod(avec[r], q);
        bm[r] = int_mod(bvec[r], q);
    }
    CHP total = 0;
    std::vector<u64> digits(h.R, 0);
    for (std::size_t idx = 0; idx < h.counts.size(); ++idx) {
        if (h.counts[idx]) {
            // decode mixed radix (most significant digit first)
            std::size_t rest = idx;
            u64 phase = 0;
            for (int r = h.R - 1; r >= 0; --r) {
                u64 dig = rest % q;
                rest /= q;
                phase = (phase + mulmod(am[r], (dig + q - bm[r]) % q, q)) % q;
            }
            total += roots[phase] * CHP(h.counts[idx]);
        }
    }
    return total;
}

// Exact integer evaluation of sum_{(a,q)=1} S_{a,q}(b) from the histogram:
//   sum_a e_q(a . s) over coprime a equals sum_{d|q} mu(d) (q/d)^R [q/d | s_j].
// Test oracle for the complex route.
inline Int exact_coprime_a_sum(const ResidueHistogram& h, const std::vector<Int>& bvec) {
    const u64 q = h.q;
    std::vector<long long> divs;
    for (long long d = 1; d <= (long long)q; ++d)
        if (q % d == 0) divs.push_back(d);
    auto mobius = [](long long v) {
        int mu = 1;
        for (long long p = 2; p * p <= v; ++p) {
            if (v % p == 0) {
                v /= p;
                if (v % p == 0) return 0;
                mu = -mu;
            }
        }
        if (v > 1) mu = -mu;
        return mu;
    };
    std::vector<u64> bm(h.R);
    for (int r = 0; r < h.R; ++r) bm[r] = int_mod(bvec[r], q);
    Int total = 0;
    for (std::size_t idx = 0; idx < h.counts.size(); ++idx) {
        if (!h.counts[idx]) continue;
        std::vector<u64> s(h.R);
        std::size_t rest = idx;
        for (int r = h.R - 1; r >= 0; --r) {
            s[r] = (rest % q + q - bm[r]) % q;
            rest /= q;
        }
        Int t = 0;
        for (long long d : divs) {
            int mu = mobius(d);
            if (!mu) continue;
            u64 qd = q / d;
            bool all = true;
            for (int r = 0; r < h.R && all; ++r) all = (s[r] % qd == 0);
            if (all) t += Int(mu) * pow_int(Int(qd), h.R);
        }
        total += Int(h.counts[idx]) * t;
    }
    return total;
}

// -------------------------------------------------------------------------
// Odd-q fast path.  The pure quadratic phase Q_a(Z) = sum a_ij z_i^T A z_j
// equals (1/2) Z^T (Atilde o* A) Z; diagonalizing that matrix p-adically
// reduces the sum to a product of one-variable quadratic Gauss sums with the
// classical closed form.
// -------------------------------------------------------------------------

// sum_{x mod p^r} e_{p^r}(c x^2), p odd, c given as an exact rational with
// p-unit denominator
inline CHP gauss_sum_1var(const Rat& c, const Int& p, int r) {
    if (r == 0) return CHP(1);
    const Int pr = pow_int(p, r);
    if (c == 0) return CHP(HP(pr.str()));
    int beta = rat_val(c, p);
    if (beta >= r) return CHP(HP(pr.str()));
    int s = r - beta;
    const Int ps = pow_int(p, s);
    Rat unit = c / Rat(pow_int(p, beta));
    u64 u = rat_mod(unit, ps.convert_to<u64>());
    int chi = jacobi(Int(u), ps);
    // Gauss: sum_{x mod m} e_m(u x^2) = (u|m) eps_m sqrt(m), eps = 1 or i
    HP mag = sqrt(HP(ps.str()));
    CHP eps = (ps % 4 == 1) ? CHP(1) : CHP(0, 1);
    CHP g = CHP(chi) * eps * CHP(mag);
    return CHP(HP(pow_int(p, beta).str())) * g;
}

// sum_{Z mod p^r} e_{p^r}(Q_a(Z)) for odd prime power p^r
inline CHP quad_sum_odd_primepower(const QuadraticForm& a, int m, const std::vector<Int>& avec,
                                   const Int& p, int r) {
    const int n = a.dim();
    const int N = n * m;
    // Atilde: 2 a_ii on the diagonal, a_ij off it; M = Atilde (x) A
    IntMat atil(m, m);
    int idx = 0;
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            atil(i, j) = (i == j) ? 2 * avec[idx] : avec[idx];
            atil(j, i) = atil(i, j);
            ++idx;
        }
    RatMat big(N, N);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int u = 0; u < n; ++u)
                for (int v = 0; v < n; ++v)
                    big(i * n + u, j * n + v) = Rat(atil(i, j) * a(u, v));
    PadicBlocks blocks = padic_block_diagonalize(std::move(big), p);
    CHP prod(1);
    for (const auto& blk : blocks.blocks) {
        if (blk.rows() != 1) throw QfError("internal: 2x2 block at odd p");
        prod *= gauss_sum_1var(blk(0, 0) / 2, p, r);
    }
    return prod;
}

}  // namespace detail

/// S_{a,q}(b).  Odd q goes through the tensor Gauss-sum fast path (any size);
/// even q is evaluated directly under the q^{mn} cap.
inline CHP exp_sum(const ExponentialSumQuery& query, const QuadraticForm& a, int m,
                   const ExpSumOptions& opt = {}) {
    const int R = pair_count(m);
    if (static_cast<int>(query.a.size()) != R || static_cast<int>(query.b.size()) != R)
        throw QfError("exp_sum: a and b must have length m(m+1)/2");
    if (query.q < 1) throw QfError("exp_sum: q must be positive");
    Int g = query.q;
    for (const Int& av : query.a) g = boost::integer::gcd(g, av);
    if (g != 1) throw QfError("exp_sum: (q, a) must be coprime");
    if (query.q == 1) return CHP(1);

    Int phase_const = 0;
    for (int i = 0; i < R; ++i) phase_const += query.a[i] * query.b[i];
    CHP const_factor = unit_phase(-phase_const, query.q);

    if (query.q % 2 == 1) {
        // factor q into prime powers; CRT splits the pure quadratic sum with
        // cofactor-scaled coefficient vectors
        CHP prod(1);
        Int rest = query.q;
        for (Int p = 3; rest > 1; p += 2) {
            if (!is_prime(p) || rest % p != 0) continue;
            int r = 0;
            Int pr = 1;
            while (rest % p == 0) {
                rest /= p;
                ++r;
                pr *= p;
            }
            Int cofactor = query.q / pr;
            std::vector<Int> scaled(R);
            for (int i = 0; i < R; ++i) scaled[i] = (query.a[i] * cofactor) % pr;
            prod *= detail::quad_sum_odd_primepower(a, m, scaled, p, r);
        }
        return const_factor * prod;
    }

    detail::ResidueHistogram h = detail::residue_histogram(a, m, query.q, opt.direct_cap);
    return detail::exp_sum_from_histogram(h, query.a, query.b);
}

/// Truncated singular series: q-sum partial sums and the Euler product of
/// stabilized local densities, side by side.
struct SingularSeriesTruncation {
    Int Q;
    std::vector<std::pair<Int, CHP>> terms;  // (q, q^{-mn} sum_{(a,q)=1} S_{a,q}(b))
    HP partial_sum = 0;                      // real part of the q-sum
    HP imag_residual = 0;                    // |imaginary part| (must vanish)
    HP euler_partial = 1;                    // prod_{p <= Q} alpha_p
    std::vector<LocalDensity> alpha_table;
};

inline SingularSeriesTruncation singular_series_truncated(const QuadraticForm& a,
                                                          const QuadraticForm& b, const Int& Q,
                                                          const ExpSumOptions& eopt = {},
                                                          const AlphaOptions& aopt = {}) {
    const int m = b.dim();
    const int n = a.dim();
    const int R = pair_count(m);
    std::vector<Int> bvec(R);
    {
        int idx = 0;
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) bvec[idx++] = b(i, j);
    }

    SingularSeriesTruncation out;
    out.Q = Q;
    CHP acc(0);
    for (Int q = 1; q <= Q; ++q) {
        CHP term(0);
        if (q == 1) {
            term = CHP(1);
        } else {
            // iterate a in [0,q)^R with gcd(q, a) = 1
            std::optional<detail::ResidueHistogram> hist;
            if (q % 2 == 0) hist = detail::residue_histogram(a, m, q, eopt.direct_cap);
            std::vector<Int> avec(R, 0);
            CHP asum(0);
            while (true) {
                Int g = q;
                for (const Int& av : avec) g = boost::integer::gcd(g, av);
                if (g == 1) {
                    ExponentialSumQuery query{q, avec, bvec};
                    asum += hist ? detail::exp_sum_from_histogram(*hist, avec, bvec)
                                 : exp_sum(query, a, m, eopt);
                }
                int i = 0;
                while (i < R && avec[i] == q - 1) {
                    avec[i] = 0;
                    ++i;
                }
                if (i == R) break;
                ++avec[i];
            }
            term = asum / CHP(HP(pow_int(q, n * m).str()));
        }
        out.terms.emplace_back(q, term);
        acc += term;
    }
    out.partial_sum = acc.real();
    out.imag_residual = abs(acc.imag());

    for (Int p = 2; p <= Q; ++p) {
        if (!is_prime(p)) continue;
        LocalDensity d = alpha_p(a, b, p, aopt);
        out.alpha_table.push_back(d);
        out.euler_partial *= HP(numerator(d.value).str()) / HP(denominator(d.value).str());
    }
    return out;
}

}  // namespace qfrep
