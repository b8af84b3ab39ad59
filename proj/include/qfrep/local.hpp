#pragma once

#include "forms.hpp"
#include "int_types.hpp"
#include "local_count.hpp"

#include <string>
#include <vector>

namespace qfrep {

/// alpha_p(A,B) as an exact rational whose denominator is a power of p,
/// together with the stabilization level that certified it.
struct LocalDensity {
    Int p;
    int t_used = 0;
    Rat value;
};

struct AlphaOptions {
    int t_cap = 8;
    Int oracle_cap = Int(100000000);  // p^{t*mn} cap for the brute-force oracle
    LocalCountOptions count;
};

/// Normalized level value N(p^t) p^{-t(mn-R)} with no stabilization claim.
inline Rat alpha_p_at_level(const QuadraticForm& a, const QuadraticForm& b, const Int& p, int t,
                            const AlphaOptions& opt = {}) {
    if (!is_prime(p)) throw NotPrime("p = " + p.str() + " is not prime");
    LocalCounter cnt(a, b, p, opt.count);
    return cnt.normalized(t);
}

/// Stabilized local density.  Certification is one of:
///  (i) unramified shortcut: p odd, p coprime to 2 det A det B -- every mod-p
///      solution is a nonsingular point, t = 1 suffices;
///  (ii) empirical stabilization: equal exact values at consecutive levels
///       t, t+1 with t >= 1 + 2 v_p(2 det A det B);
///  (iii) emptiness: N(p^s) = 0 certifies alpha_p = 0 outright.
inline LocalDensity alpha_p(const QuadraticForm& a, const QuadraticForm& b, const Int& p,
                            const AlphaOptions& opt = {}) {
    if (!is_prime(p)) throw NotPrime("p = " + p.str() + " is not prime");
    const int n = a.dim(), m = b.dim();
    if (m > n) throw QfError("alpha_p needs m <= n");
    const int expn = n * m - pair_count(m);

    const Int disc = 2 * a.determinant() * b.determinant();
    const int v = valuation(disc, p);

    if (p != 2 && v == 0) {
        Int n1 = count_modp_unramified(a, b, p);
        return {p, 1, Rat(n1) / Rat(pow_int(p, expn))};
    }

    // zero at any level certifies alpha_p = 0 (solutions reduce downward),
    // so the scan can start right at the certification threshold
    const int t_min = 1 + 2 * v;
    if (t_min + 1 > opt.t_cap)
        throw StabilizationNotReached(opt.t_cap, "alpha_" + p.str() + " needs t >= " +
                                                     std::to_string(t_min + 1) +
                                                     " for certification; raise the t cap");
    LocalCounter cnt(a, b, p, opt.count);

    Int prev_count = -1;
    Rat prev_norm;
    for (int t = t_min; t <= opt.t_cap; ++t) {
        Int ncount = cnt.count(t);
        if (ncount == 0) return {p, t, Rat(0)};
        Rat norm = Rat(ncount) / Rat(pow_int(p, static_cast<unsigned long>(t) * expn));
        if (prev_count >= 0 && norm == prev_norm) return {p, t - 1, prev_norm};
        prev_count = ncount;
        prev_norm = norm;
    }
    throw StabilizationNotReached(opt.t_cap,
                                  "alpha_" + p.str() + " did not stabilize by t = " +
                                      std::to_string(opt.t_cap) + "; raise the t cap");
}

/// Test oracle: direct scan of X mod p^t (column-recursive, naive residue
/// arithmetic; independent of the lifting/convolution engines).
inline Rat alpha_p_bruteforce(const QuadraticForm& a, const QuadraticForm& b, const Int& p, int t,
                              const AlphaOptions& opt = {}) {
    if (!is_prime(p)) throw NotPrime("p = " + p.str() + " is not prime");
    const int n = a.dim(), m = b.dim();
    Int cells = 1;
    const Int pt = pow_int(p, t);
    for (int i = 0; i < n * m; ++i) {
        cells *= pt;
        if (cells > opt.oracle_cap)
            throw OracleTooLarge("p^(t*m*n) = " + pow_int(pt, n * m).str() + " exceeds oracle cap " +
                                 opt.oracle_cap.str());
    }
    const u64 M = pt.convert_to<u64>();
    std::vector<std::vector<u64>> am(n, std::vector<u64>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) am[i][j] = int_mod(a(i, j), M);

    std::vector<std::vector<u64>> cols(m, std::vector<u64>(n, 0));
    Int count = 0;

    auto col_ok = [&](int k) {
        u64 q = 0;
        for (int i = 0; i < n; ++i) {
            if (!cols[k][i]) continue;
            for (int j = 0; j < n; ++j)
                q = (q + mulmod(cols[k][i], mulmod(am[i][j], cols[k][j], M), M)) % M;
        }
        if (q != int_mod(b(k, k), M)) return false;
        for (int i = 0; i < k; ++i) {
            u64 s = 0;
            for (int u = 0; u < n; ++u) {
                if (!cols[i][u]) continue;
                for (int vv = 0; vv < n; ++vv)
                    s = (s + mulmod(cols[i][u], mulmod(am[u][vv], cols[k][vv], M), M)) % M;
            }
            if (s != int_mod(b(i, k), M)) return false;
        }
        return true;
    };

    auto scan = [&](auto&& self, int k) -> void {
        std::vector<u64>& x = cols[k];
        std::fill(x.begin(), x.end(), 0);
        while (true) {
            if (col_ok(k)) {
                if (k + 1 == m)
                    ++count;
                else
                    self(self, k + 1);
            }
            int i = 0;
            while (i < n && x[i] == M - 1) {
                x[i] = 0;
                ++i;
            }
            if (i == n) break;
            ++x[i];
        }
    };
    scan(scan, 0);

    const int expn = n * m - pair_count(m);
    return Rat(count) / Rat(pow_int(p, static_cast<unsigned long>(t) * expn));
}

/// Primes p <= prime_cap with alpha_p = 0 (local obstructions).
inline std::vector<Int> local_solubility(const QuadraticForm& a, const QuadraticForm& b,
                                         const Int& prime_cap, const AlphaOptions& opt = {}) {
    std::vector<Int> obstructions;
    for (Int p = 2; p <= prime_cap; ++p) {
        if (!is_prime(p)) continue;
        LocalDensity d = alpha_p(a, b, p, opt);
        if (d.value == 0) obstructions.push_back(p);
    }
    return obstructions;
}

}  // namespace qfrep
