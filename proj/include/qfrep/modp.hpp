#pragma once

#include "int_types.hpp"
#include "matrix.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace qfrep {

using u64 = std::uint64_t;

inline u64 mulmod(u64 a, u64 b, u64 m) {
    return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m);
}

inline u64 powmod(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

// inverse of a mod m, gcd(a, m) = 1 (extended Euclid)
inline u64 invmod(u64 a, u64 m) {
    long long t = 0, newt = 1;
    long long r = static_cast<long long>(m), newr = static_cast<long long>(a % m);
    while (newr != 0) {
        long long q = r / newr;
        t -= q * newt;
        std::swap(t, newt);
        r -= q * newr;
        std::swap(r, newr);
    }
    if (r != 1) throw QfError("invmod: not invertible");
    if (t < 0) t += static_cast<long long>(m);
    return static_cast<u64>(t);
}

inline u64 int_mod(const Int& x, u64 m) {
    Int r = x % Int(m);
    if (r < 0) r += Int(m);
    return r.convert_to<u64>();
}

// Rational reduced mod m; the denominator must be a unit mod m.
inline u64 rat_mod(const Rat& x, u64 m) {
    u64 num = int_mod(numerator(x), m);
    u64 den = int_mod(denominator(x), m);
    return mulmod(num, invmod(den, m), m);
}

// Jacobi symbol (a|n), n odd positive.
inline int jacobi(Int a, Int n) {
    if (n <= 0 || n % 2 == 0) throw QfError("jacobi: modulus must be odd positive");
    a %= n;
    if (a < 0) a += n;
    int result = 1;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            Int r = n % 8;
            if (r == 3 || r == 5) result = -result;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3) result = -result;
        a %= n;
    }
    return n == 1 ? result : 0;
}

// ---------------------------------------------------------------------------
// Dense linear algebra over F_p (tiny systems).
// ---------------------------------------------------------------------------

struct AffineModSolutions {
    bool feasible = false;
    int rank = 0;
    std::vector<u64> particular;            // one solution
    std::vector<std::vector<u64>> kernel;   // basis of the homogeneous solutions
};

/// Solves rows * y == rhs (mod p) by Gauss elimination.
inline AffineModSolutions solve_mod_p(std::vector<std::vector<u64>> rows, std::vector<u64> rhs,
                                      u64 p) {
    const int r = static_cast<int>(rows.size());
    const int c = r ? static_cast<int>(rows[0].size()) : 0;
    std::vector<int> pivot_col;
    int row = 0;
    for (int col = 0; col < c && row < r; ++col) {
        int sel = -1;
        for (int i = row; i < r; ++i)
            if (rows[i][col] % p != 0) {
                sel = i;
                break;
            }
        if (sel < 0) continue;
        std::swap(rows[sel], rows[row]);
        std::swap(rhs[sel], rhs[row]);
        u64 inv = invmod(rows[row][col] % p, p);
        for (int j = 0; j < c; ++j) rows[row][j] = mulmod(rows[row][j] % p, inv, p);
        rhs[row] = mulmod(rhs[row] % p, inv, p);
        for (int i = 0; i < r; ++i) {
            if (i == row) continue;
            u64 f = rows[i][col] % p;
            if (!f) continue;
            for (int j = 0; j < c; ++j)
                rows[i][j] = (rows[i][j] + p - mulmod(f, rows[row][j], p)) % p;
            rhs[i] = (rhs[i] + p - mulmod(f, rhs[row], p)) % p;
        }
        pivot_col.push_back(col);
        ++row;
    }
    for (int i = row; i < r; ++i)
        if (rhs[i] % p != 0) return {};  // inconsistent

    AffineModSolutions out;
    out.feasible = true;
    out.rank = row;
    out.particular.assign(c, 0);
    for (int i = 0; i < row; ++i) out.particular[pivot_col[i]] = rhs[i] % p;
    std::vector<bool> is_pivot(c, false);
    for (int pc : pivot_col) is_pivot[pc] = true;
    for (int freec = 0; freec < c; ++freec) {
        if (is_pivot[freec]) continue;
        std::vector<u64> k(c, 0);
        k[freec] = 1;
        for (int i = 0; i < row; ++i) k[pivot_col[i]] = (p - rows[i][freec] % p) % p;
        out.kernel.push_back(std::move(k));
    }
    return out;
}

inline int rank_mod_p(const std::vector<std::vector<u64>>& rows, u64 p) {
    std::vector<u64> rhs(rows.size(), 0);
    return solve_mod_p(rows, rhs, p).rank;
}

// ---------------------------------------------------------------------------
// Exact p-adic symmetric block diagonalization.  Works over Q with p-unit
// denominators only (min-valuation pivoting guarantees this), so reducing the
// result mod p^t is well defined and the congruence transform is invertible
// over Z/p^t for every t.  For odd p all blocks are 1x1; for p = 2 there may
// also be 2x2 blocks with strictly dominant (lower-valuation) off-diagonal.
// ---------------------------------------------------------------------------

struct PadicBlocks {
    std::vector<RatMat> blocks;  // 1x1 or 2x2 symmetric, p-integral entries
};

namespace detail {

constexpr int kInfVal = std::numeric_limits<int>::max();

inline int rat_val(const Rat& x, const Int& p) {
    if (x == 0) return kInfVal;
    return valuation(numerator(x), p) - valuation(denominator(x), p);
}

}  // namespace detail

inline PadicBlocks padic_block_diagonalize(RatMat g, const Int& p) {
    const int r = static_cast<int>(g.rows());
    PadicBlocks out;

    auto clear_with_1x1 = [&](int pos) {
        const Rat piv = g(pos, pos);
        for (int t = pos + 1; t < r; ++t) {
            if (g(t, pos) == 0) continue;
            Rat coef = g(t, pos) / piv;
            // congruence transform E = I - coef * E_{pos,t}: column then row
            for (int u = 0; u < r; ++u) g(u, t) -= coef * g(u, pos);
            for (int u = 0; u < r; ++u) g(t, u) -= coef * g(pos, u);
        }
    };

    int pos = 0;
    while (pos < r) {
        int best_i = -1, best_j = -1, best_v = detail::kInfVal;
        for (int i = pos; i < r; ++i)
            for (int j = i; j < r; ++j) {
                int v = detail::rat_val(g(i, j), p);
                if (v < best_v) {
                    best_v = v;
                    best_i = i;
                    best_j = j;
                }
            }
        if (best_v == detail::kInfVal) {  // remaining block identically zero
            for (; pos < r; ++pos) {
                RatMat b(1, 1);
                b(0, 0) = 0;
                out.blocks.push_back(b);
            }
            break;
        }
        bool diag_min = false;
        int diag_idx = -1;
        for (int i = pos; i < r; ++i)
            if (detail::rat_val(g(i, i), p) == best_v) {
                diag_min = true;
                diag_idx = i;
                break;
            }

        auto swap_rc = [&](int a, int b) {
            if (a == b) return;
            for (int u = 0; u < r; ++u) std::swap(g(a, u), g(b, u));
            for (int u = 0; u < r; ++u) std::swap(g(u, a), g(u, b));
        };

        if (diag_min) {
            swap_rc(diag_idx, pos);
            clear_with_1x1(pos);
            RatMat b(1, 1);
            b(0, 0) = g(pos, pos);
            out.blocks.push_back(b);
            ++pos;
            continue;
        }

        if (p != 2) {
            // pull the off-diagonal minimum onto the diagonal: col_i += col_j;
            // val(g_ii + 2 g_ij + g_jj) = best_v since 2 is a unit and the
            // diagonal valuations are strictly larger
            int i = best_i, j = best_j;
            for (int u = 0; u < r; ++u) g(u, i) += g(u, j);
            for (int u = 0; u < r; ++u) g(i, u) += g(j, u);
            continue;
        }

        // p = 2: genuine 2x2 block pivot
        swap_rc(best_i, pos);
        int j2 = (best_j == pos) ? best_i : best_j;
        swap_rc(j2, pos + 1);
        const Rat a = g(pos, pos), bb = g(pos, pos + 1), c = g(pos + 1, pos + 1);
        const Rat det = a * c - bb * bb;  // valuation exactly 2*best_v
        for (int t = pos + 2; t < r; ++t) {
            Rat v1 = g(pos, t), v2 = g(pos + 1, t);
            if (v1 == 0 && v2 == 0) continue;
            Rat c1 = (c * v1 - bb * v2) / det;
            Rat c2 = (a * v2 - bb * v1) / det;
            for (int u = 0; u < r; ++u) g(u, t) -= c1 * g(u, pos) + c2 * g(u, pos + 1);
            for (int u = 0; u < r; ++u) g(t, u) -= c1 * g(pos, u) + c2 * g(pos + 1, u);
        }
        RatMat blk(2, 2);
        blk(0, 0) = g(pos, pos);
        blk(0, 1) = g(pos, pos + 1);
        blk(1, 0) = g(pos + 1, pos);
        blk(1, 1) = g(pos + 1, pos + 1);
        out.blocks.push_back(blk);
        pos += 2;
    }

    for (const auto& b : out.blocks)
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j)
                if (b(i, j) != 0 && detail::rat_val(b(i, j), p) < 0)
                    throw QfError("internal: p-adic block with negative valuation");
    return out;
}

/// Symmetric diagonalization of a quadratic space over F_p (p odd).  Returns
/// the diagonal values; zeros appear iff the form is degenerate mod p.
inline std::vector<u64> diagonalize_mod_p(std::vector<std::vector<u64>> g, u64 p) {
    const int n = static_cast<int>(g.size());
    std::vector<u64> diag;
    int pos = 0;
    auto swap_rc = [&](int a, int b) {
        if (a == b) return;
        std::swap(g[a], g[b]);
        for (int u = 0; u < n; ++u) std::swap(g[u][a], g[u][b]);
    };
    while (pos < n) {
        int sel = -1;
        for (int i = pos; i < n && sel < 0; ++i)
            if (g[i][i] % p != 0) sel = i;
        if (sel >= 0) {
            swap_rc(sel, pos);
        } else {
            int oi = -1, oj = -1;
            for (int i = pos; i < n && oi < 0; ++i)
                for (int j = i + 1; j < n; ++j)
                    if (g[i][j] % p != 0) {
                        oi = i;
                        oj = j;
                        break;
                    }
            if (oi < 0) {  // zero block
                for (; pos < n; ++pos) diag.push_back(0);
                break;
            }
            // col_i += col_j then row_i += row_j: diagonal gains 2 g_ij != 0
            for (int u = 0; u < n; ++u) g[u][oi] = (g[u][oi] + g[u][oj]) % p;
            for (int u = 0; u < n; ++u) g[oi][u] = (g[oi][u] + g[oj][u]) % p;
            swap_rc(oi, pos);
        }
        u64 piv = g[pos][pos] % p;
        u64 inv = invmod(piv, p);
        for (int t = pos + 1; t < n; ++t) {
            u64 coef = mulmod(g[t][pos] % p, inv, p);
            if (!coef) continue;
            for (int u = 0; u < n; ++u)
                g[u][t] = (g[u][t] + p - mulmod(coef, g[u][pos], p)) % p;
            for (int u = 0; u < n; ++u)
                g[t][u] = (g[t][u] + p - mulmod(coef, g[pos][u], p)) % p;
        }
        diag.push_back(piv);
        ++pos;
    }
    return diag;
}

}  // namespace qfrep
