#pragma once

#include "forms.hpp"
#include "int_types.hpp"
#include "matrix.hpp"
#include "modp.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

namespace qfrep {

struct LocalCountOptions {
    u64 hist_cap = u64(1) << 17;          // largest p^t for the convolution engine
    u64 block2_cap = u64(1) << 14;        // largest p^t when 2x2 blocks are present
    std::size_t class_cap = 6'000'000;    // class-lifting population cap
    std::size_t level1_scan_cap = 40'000'000;  // mod-p column enumeration cap
};

namespace detail {

// -------------------------------------------------------------------------
// m = 1, p = 2 (and generic p): value-distribution convolution mod p^t.
// Counts are exact; unsigned __int128 with overflow checks, cpp_int
// fallback.  Returns N(p^t) = #{x mod p^t : x^T A x == c (mod p^t)}.
// -------------------------------------------------------------------------

struct ConvOverflow {};

using u128 = unsigned __int128;

inline u128 checked_add(u128 a, u128 b) {
    u128 r = a + b;
    if (r < a) throw ConvOverflow{};
    return r;
}
inline u128 checked_mul(u128 a, u128 b) {
    if (a == 0 || b == 0) return 0;
    u128 r = a * b;
    if (r / a != b) throw ConvOverflow{};
    return r;
}

template <class CountT>
CountT cmul(const CountT& a, const CountT& b);
template <>
inline u128 cmul<u128>(const u128& a, const u128& b) {
    return checked_mul(a, b);
}
template <>
inline Int cmul<Int>(const Int& a, const Int& b) {
    return a * b;
}
template <class CountT>
CountT cadd(const CountT& a, const CountT& b);
template <>
inline u128 cadd<u128>(const u128& a, const u128& b) {
    return checked_add(a, b);
}
template <>
inline Int cadd<Int>(const Int& a, const Int& b) {
    return a + b;
}

inline Int u128_to_int(u128 v) {
    Int r = static_cast<std::uint64_t>(v >> 64);
    r <<= 64;
    r |= static_cast<std::uint64_t>(v);
    return r;
}

template <class CountT>
std::vector<CountT> block_histogram(const RatMat& blk, u64 M) {
    std::vector<CountT> h(M, CountT(0));
    if (blk.rows() == 1) {
        u64 a = rat_mod(blk(0, 0), M);
        for (u64 x = 0; x < M; ++x) {
            u64 v = mulmod(a, mulmod(x, x, M), M);
            h[v] = cadd<CountT>(h[v], CountT(1));
        }
    } else {
        u64 a = rat_mod(blk(0, 0), M);
        u64 b2 = (2 * rat_mod(blk(0, 1), M)) % M;
        u64 c = rat_mod(blk(1, 1), M);
        for (u64 x = 0; x < M; ++x) {
            u64 ax2 = mulmod(a, mulmod(x, x, M), M);
            u64 bx = mulmod(b2, x, M);
            for (u64 y = 0; y < M; ++y) {
                u64 v = (ax2 + mulmod(bx, y, M)) % M;
                v = (v + mulmod(c, mulmod(y, y, M), M)) % M;
                h[v] = cadd<CountT>(h[v], CountT(1));
            }
        }
    }
    return h;
}

// The u128 convolutions certify once that no product or accumulated entry
// can overflow (max-entry bound times length), then run unchecked; per-op
// checked arithmetic is the fallback.
inline bool u128_conv_safe(const std::vector<u128>& h1, const std::vector<u128>& h2) {
    u128 m1 = 0, m2 = 0;
    for (u128 v : h1) m1 = std::max(m1, v);
    for (u128 v : h2) m2 = std::max(m2, v);
    if (m1 == 0 || m2 == 0) return true;
    const u128 lim = ~u128(0);
    if (m1 > lim / m2) return false;
    u128 prod = m1 * m2;
    return prod <= lim / (h1.size() + 1);
}

template <class CountT>
std::vector<CountT> conv_full(const std::vector<CountT>& h1, const std::vector<CountT>& h2) {
    const u64 M = h1.size();
    // iterate the sparser histogram on the outside, contiguous inner loops
    std::size_t n1 = 0, n2 = 0;
    for (u64 i = 0; i < M; ++i) {
        if (h1[i] != CountT(0)) ++n1;
        if (h2[i] != CountT(0)) ++n2;
    }
    const std::vector<CountT>& outer = n1 <= n2 ? h1 : h2;
    const std::vector<CountT>& inner = n1 <= n2 ? h2 : h1;
    std::vector<CountT> out(M, CountT(0));
    bool raw = true;
    if constexpr (std::is_same_v<CountT, u128>) raw = u128_conv_safe(h1, h2);
    for (u64 i = 0; i < M; ++i) {
        if (outer[i] == CountT(0)) continue;
        const CountT a = outer[i];
        if (raw) {
            for (u64 j = 0; j < M - i; ++j) out[i + j] += a * inner[j];
            for (u64 j = M - i; j < M; ++j) out[i + j - M] += a * inner[j];
        } else {
            for (u64 j = 0; j < M; ++j) {
                if (inner[j] == CountT(0)) continue;
                u64 k = i + j >= M ? i + j - M : i + j;
                out[k] = cadd<CountT>(out[k], cmul<CountT>(a, inner[j]));
            }
        }
    }
    return out;
}

template <class CountT>
CountT conv_at(const std::vector<CountT>& h1, const std::vector<CountT>& h2, u64 target) {
    const u64 M = h1.size();
    bool raw = true;
    if constexpr (std::is_same_v<CountT, u128>) raw = u128_conv_safe(h1, h2);
    CountT s(0);
    for (u64 i = 0; i < M; ++i) {
        if (h1[i] == CountT(0)) continue;
        u64 j = target >= i ? target - i : target + M - i;
        if (h2[j] == CountT(0)) continue;
        if (raw)
            s += h1[i] * h2[j];
        else
            s = cadd<CountT>(s, cmul<CountT>(h1[i], h2[j]));
    }
    return s;
}

template <class CountT>
std::vector<CountT> conv_pow(std::vector<CountT> base, unsigned e) {
    std::vector<CountT> acc;
    while (e) {
        if (e & 1) acc = acc.empty() ? base : conv_full<CountT>(acc, base);
        e >>= 1;
        if (e) base = conv_full<CountT>(base, base);
    }
    return acc;
}

template <class CountT>
Int m1_conv_count(const PadicBlocks& blocks, const Int& c, const Int& p, int t) {
    const u64 M = pow_int(p, t).convert_to<u64>();
    const u64 target = int_mod(c, M);

    // dedup identical blocks mod M (equal diagonal entries are common)
    std::vector<std::vector<u64>> keys;
    std::vector<std::vector<CountT>> hists;
    std::vector<unsigned> mult;
    for (const auto& blk : blocks.blocks) {
        std::vector<u64> key{blk.rows()};
        for (std::size_t i = 0; i < blk.rows(); ++i)
            for (std::size_t j = 0; j < blk.cols(); ++j) key.push_back(rat_mod(blk(i, j), M));
        auto it = std::find(keys.begin(), keys.end(), key);
        if (it != keys.end()) {
            ++mult[static_cast<std::size_t>(it - keys.begin())];
            continue;
        }
        keys.push_back(std::move(key));
        hists.push_back(block_histogram<CountT>(blk, M));
        mult.push_back(1);
    }

    // split each multiplicity as half+half(+1) so the topmost product can be
    // evaluated sparsely at the single target residue
    std::vector<std::vector<CountT>> factors;
    for (std::size_t i = 0; i < hists.size(); ++i) {
        unsigned e = mult[i];
        if (e == 1) {
            factors.push_back(std::move(hists[i]));
            continue;
        }
        std::vector<CountT> half = conv_pow<CountT>(hists[i], e / 2);
        factors.push_back(half);
        factors.push_back(std::move(half));
        if (e & 1) factors.push_back(std::move(hists[i]));
    }
    while (factors.size() > 2) {
        std::vector<CountT> merged = conv_full<CountT>(factors[factors.size() - 2], factors.back());
        factors.pop_back();
        factors.back() = std::move(merged);
    }
    CountT total = factors.size() == 1 ? factors[0][target]
                                       : conv_at<CountT>(factors[0], factors[1], target);
    if constexpr (std::is_same_v<CountT, u128>)
        return u128_to_int(total);
    else
        return total;
}

// -------------------------------------------------------------------------
// m = 1, p odd: valuation-descent recursion on the diagonalized form
//   sum_i p^{e_i} u_i x_i^2 == c (mod p^s).
// Solutions with a unit-coefficient coordinate nonzero mod p lift by exact
// Hensel fibering (p^{(s-1)(n-1)} each); the rest substitute x = p y and
// descend one level.  Cost O(s * n * p^2), any odd p.
// -------------------------------------------------------------------------

struct DescentVar {
    int e;    // p-adic valuation of the coefficient
    u64 u;    // unit part mod p (enough: deeper digits enter via rat_mod on demand)
    Rat unit; // exact unit part
};

// #{x in F_p^k : sum u_i x_i^2 == c}, DP over coordinates.
inline Int modp_diag_count(const std::vector<u64>& units, u64 c, u64 p) {
    std::vector<Int> cnt(p, 0);
    cnt[0] = 1;
    for (u64 u : units) {
        std::vector<Int> nxt(p, 0);
        for (u64 x = 0; x < p; ++x) {
            u64 v = mulmod(u % p, mulmod(x, x, p), p);
            for (u64 w = 0; w < p; ++w) {
                if (cnt[w] == 0) continue;
                nxt[(w + v) % p] += cnt[w];
            }
        }
        cnt.swap(nxt);
    }
    return cnt[c % p];
}

inline Int m1_descent_count(std::vector<DescentVar> vars, Int c, const Int& p, int s) {
    if (s <= 0) return 1;
    const Int ps = pow_int(p, s);
    c %= ps;
    if (c < 0) c += ps;

    // variables whose term vanishes identically mod p^s are free
    Int freefactor = 1;
    std::vector<DescentVar> active;
    for (const auto& v : vars) {
        if (v.e >= s)
            freefactor *= ps;
        else
            active.push_back(v);
    }
    if (active.empty()) return (c == 0) ? freefactor : Int(0);

    int g = active[0].e;
    for (const auto& v : active) g = std::min(g, v.e);
    if (g > 0) {
        if (c % pow_int(p, g) != 0) return 0;
        std::vector<DescentVar> shifted = active;
        for (auto& v : shifted) v.e -= g;
        Int sub = m1_descent_count(shifted, c / pow_int(p, g), p, s - g);
        return freefactor * pow_int(p, g * static_cast<unsigned long>(active.size())) * sub;
    }

    const u64 pp = p.convert_to<u64>();
    std::vector<u64> s_units;
    std::vector<DescentVar> t_vars;
    for (const auto& v : active) {
        if (v.e == 0)
            s_units.push_back(v.u % pp);
        else
            t_vars.push_back(v);
    }
    const u64 cp = int_mod(c, pp);
    Int ns = modp_diag_count(s_units, cp, pp);
    const std::size_t n_active = active.size();

    if (s == 1) return freefactor * ns * pow_int(p, t_vars.size());

    // smooth part: mod-p solutions with some unit-coordinate nonzero
    Int smooth_modp = ns - (cp == 0 ? 1 : 0);
    Int result = smooth_modp * pow_int(p, t_vars.size()) *
                 pow_int(p, static_cast<unsigned long>(s - 1) * (n_active - 1));

    if (cp == 0) {
        // non-smooth branch: unit-coordinates all divisible by p
        std::vector<DescentVar> sub_vars;
        for (const auto& v : active) {
            DescentVar w = v;
            w.e = (v.e == 0) ? 1 : v.e - 1;
            sub_vars.push_back(w);
        }
        Int sub = m1_descent_count(sub_vars, c / p, p, s - 1);
        result += pow_int(p, t_vars.size()) * sub;
    }
    return freefactor * result;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Class-lifting engine for general m: explicit solution classes mod p^s with
// exact Hensel bookkeeping.  For odd p, classes whose constraint Jacobian has
// full rank mod p lift by exactly p^{mn-R} per level and are collapsed
// analytically (the rank is a mod-p invariant of the class, so it never
// changes along a branch).  At p = 2 the diagonal Jacobian rows vanish mod 2
// and no class is ever smooth; everything is expanded, which is why this
// engine is reserved for small levels.
// ---------------------------------------------------------------------------

class LiftingCounter {
public:
    LiftingCounter(const QuadraticForm& a, const QuadraticForm& b, const Int& p,
                   const LocalCountOptions& opt)
        : a_(a), b_(b), p_(p.convert_to<u64>()), opt_(opt) {
        n_ = a.dim();
        m_ = b.dim();
        R_ = pair_count(m_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) amod_.push_back(int_mod(a(i, j), u64(-1) >> 1));
        level_ = 0;
    }

    /// N(p^s); extends the class population as needed.
    Int count(int s) {
        while (level_ < s) extend();
        return counts_[s - 1];
    }

private:
    const QuadraticForm& a_;
    const QuadraticForm& b_;
    u64 p_;
    LocalCountOptions opt_;
    int n_ = 0, m_ = 0, R_ = 0;
    std::vector<u64> amod_;

    int level_ = 0;                      // current level s (classes are mod p^s)
    std::vector<std::vector<u64>> cls_;  // non-collapsed classes, flattened n*m
    Int smooth_ = 0;                     // smooth solutions discovered mod p (odd p)
    std::vector<Int> counts_;            // N(p^s) for s = 1..level_

    u64 mod_at(int s) const { return pow_int(Int(p_), s).convert_to<u64>(); }

    // F_{ij}(X) mod M, upper triangle flattened
    std::vector<u64> constraint_values(const std::vector<u64>& x, u64 M) const {
        std::vector<u64> f;
        f.reserve(R_);
        for (int i = 0; i < m_; ++i)
            for (int j = i; j < m_; ++j) {
                u64 s = 0;
                for (int u = 0; u < n_; ++u) {
                    u64 xu = x[i * n_ + u] % M;
                    if (!xu) continue;
                    for (int v = 0; v < n_; ++v) {
                        u64 t = mulmod(int_mod(a_(u, v), M), x[j * n_ + v] % M, M);
                        s = (s + mulmod(xu, t, M)) % M;
                    }
                }
                u64 bij = int_mod(b_(i, j), M);
                f.push_back((s + M - bij) % M);
            }
        return f;
    }

    // Jacobian mod p of the R constraints at X (depends on X mod p only).
    std::vector<std::vector<u64>> jacobian_mod_p(const std::vector<u64>& x) const {
        std::vector<std::vector<u64>> rows;
        rows.reserve(R_);
        // precompute w_i = A x_i mod p
        std::vector<std::vector<u64>> w(m_, std::vector<u64>(n_, 0));
        for (int i = 0; i < m_; ++i)
            for (int u = 0; u < n_; ++u) {
                u64 s = 0;
                for (int v = 0; v < n_; ++v)
                    s = (s + mulmod(int_mod(a_(u, v), p_), x[i * n_ + v] % p_, p_)) % p_;
                w[i][u] = s;
            }
        for (int i = 0; i < m_; ++i)
            for (int j = i; j < m_; ++j) {
                std::vector<u64> row(n_ * m_, 0);
                if (i == j) {
                    for (int u = 0; u < n_; ++u) row[i * n_ + u] = (2 * w[i][u]) % p_;
                } else {
                    for (int u = 0; u < n_; ++u) {
                        row[i * n_ + u] = w[j][u];
                        row[j * n_ + u] = w[i][u];
                    }
                }
                rows.push_back(std::move(row));
            }
        return rows;
    }

    void enumerate_level1() {
        // column-by-column over F_p: linear system from earlier columns, then
        // the diagonal constraint filter
        std::vector<u64> x(n_ * m_, 0);
        std::vector<std::vector<u64>> found;
        std::size_t visited = 0;
        enumerate_col(0, x, found, visited);
        cls_ = std::move(found);
    }

    void enumerate_col(int k, std::vector<u64>& x, std::vector<std::vector<u64>>& found,
                       std::size_t& visited) const {
        // affine subspace of column k from bilinear constraints with columns < k
        std::vector<std::vector<u64>> rows;
        std::vector<u64> rhs;
        for (int i = 0; i < k; ++i) {
            std::vector<u64> row(n_, 0);
            for (int v = 0; v < n_; ++v) {
                u64 s = 0;
                for (int u = 0; u < n_; ++u)
                    s = (s + mulmod(int_mod(a_(u, v), p_), x[i * n_ + u] % p_, p_)) % p_;
                row[v] = s;
            }
            rows.push_back(std::move(row));
            rhs.push_back(int_mod(b_(i, k), p_));
        }
        AffineModSolutions sol =
            rows.empty()
                ? [&] {
                      AffineModSolutions s0;
                      s0.feasible = true;
                      s0.particular.assign(n_, 0);
                      for (int d = 0; d < n_; ++d) {
                          std::vector<u64> kv(n_, 0);
                          kv[d] = 1;
                          s0.kernel.push_back(kv);
                      }
                      return s0;
                  }()
                : solve_mod_p(rows, rhs, p_);
        if (!sol.feasible) return;
        const std::size_t dim = sol.kernel.size();
        std::vector<u64> coeff(dim, 0);
        const u64 bkk = int_mod(b_(k, k), p_);
        while (true) {
            if (++visited > opt_.level1_scan_cap)
                throw CapExceeded("mod-p solution enumeration exceeded the scan cap");
            // assemble candidate column
            for (int v = 0; v < n_; ++v) {
                u64 s = sol.particular[v];
                for (std::size_t d = 0; d < dim; ++d)
                    s = (s + mulmod(coeff[d], sol.kernel[d][v], p_)) % p_;
                x[k * n_ + v] = s;
            }
            // diagonal constraint
            u64 q = 0;
            for (int u = 0; u < n_; ++u) {
                u64 xu = x[k * n_ + u];
                if (xu) {
                    for (int v = 0; v < n_; ++v)
                        q = (q + mulmod(xu, mulmod(int_mod(a_(u, v), p_), x[k * n_ + v], p_), p_)) %
                            p_;
                }
            }
            if (q == bkk) {
                if (k + 1 == m_) {
                    found.push_back(std::vector<u64>(x.begin(), x.begin() + n_ * m_));
                    if (found.size() > opt_.class_cap)
                        throw CapExceeded("class population exceeded the cap at level 1");
                } else {
                    enumerate_col(k + 1, x, found, visited);
                }
            }
            // odometer over kernel coefficients
            std::size_t d = 0;
            while (d < dim && coeff[d] == p_ - 1) {
                coeff[d] = 0;
                ++d;
            }
            if (d == dim) break;
            ++coeff[d];
        }
    }

    void extend() {
        if (level_ == 0) {
            enumerate_level1();
            if (p_ != 2) {
                // collapse smooth classes (full-rank Jacobian mod p)
                std::vector<std::vector<u64>> keep;
                for (auto& x : cls_) {
                    if (rank_mod_p(jacobian_mod_p(x), p_) == R_)
                        smooth_ += 1;
                    else
                        keep.push_back(std::move(x));
                }
                cls_ = std::move(keep);
            }
            level_ = 1;
            counts_.push_back(smooth_ + Int(cls_.size()));
            return;
        }

        const int s = level_;
        const u64 ps = mod_at(s);
        const u64 ps1 = mod_at(s + 1);
        const Int psI = pow_int(Int(p_), s);
        std::vector<std::vector<u64>> next;
        for (const auto& x : cls_) {
            std::vector<u64> f = constraint_values(x, ps1);
            std::vector<u64> g(R_);
            for (int r = 0; r < R_; ++r) {
                if (f[r] % ps != 0) throw QfError("internal: lifting invariant violated");
                g[r] = (p_ - (f[r] / ps) % p_) % p_;
            }
            auto jac = jacobian_mod_p(x);
            AffineModSolutions sol = solve_mod_p(jac, g, p_);
            if (!sol.feasible) continue;
            const std::size_t dim = sol.kernel.size();
            std::vector<u64> coeff(dim, 0);
            while (true) {
                std::vector<u64> child(x);
                for (int idx = 0; idx < n_ * m_; ++idx) {
                    u64 y = sol.particular[idx];
                    for (std::size_t d = 0; d < dim; ++d)
                        y = (y + mulmod(coeff[d], sol.kernel[d][idx], p_)) % p_;
                    child[idx] = (x[idx] + y % p_ * ps) % ps1;
                }
                next.push_back(std::move(child));
                if (next.size() > opt_.class_cap)
                    throw CapExceeded("class population exceeded the cap at level " +
                                      std::to_string(s + 1));
                std::size_t d = 0;
                while (d < dim && coeff[d] == p_ - 1) {
                    coeff[d] = 0;
                    ++d;
                }
                if (d == dim) break;
                ++coeff[d];
            }
        }
        cls_ = std::move(next);
        level_ = s + 1;
        const unsigned long geom = static_cast<unsigned long>(level_ - 1) *
                                   static_cast<unsigned long>(n_ * m_ - R_);
        counts_.push_back(smooth_ * pow_int(Int(p_), geom) + Int(cls_.size()));
    }
};

// ---------------------------------------------------------------------------
// Unramified counter (p odd, p coprime to 2 det A det B): N(p) by iterated
// Witt fibering.  Nonzero-norm vectors of a nondegenerate space over F_p form
// a single orthogonal-group orbit, so each fiber count is evaluated at one
// representative and multiplied out.
// ---------------------------------------------------------------------------

namespace detail {

inline Int witt_count(std::vector<u64> space_diag, const std::vector<u64>& targets,
                      std::size_t ti, u64 p) {
    if (ti == targets.size()) return 1;
    const u64 d1 = targets[ti] % p;
    Int n1 = modp_diag_count(space_diag, d1, p);
    if (n1 == 0) return 0;

    // representative r with sum a_i r_i^2 = d1 (at most two nonzero coords;
    // a two-coordinate solution always exists for p >= 3, nu >= 2)
    const std::size_t nu = space_diag.size();
    std::vector<u64> r(nu, 0);
    bool have = false;
    std::vector<long long> sqrt_tab(p, -1);
    for (u64 x = 0; x < p; ++x) sqrt_tab[mulmod(x, x, p)] = static_cast<long long>(x);
    for (std::size_t i = 0; i < nu && !have; ++i) {
        u64 want = mulmod(d1, invmod(space_diag[i], p), p);
        if (sqrt_tab[want] >= 0) {
            r[i] = static_cast<u64>(sqrt_tab[want]);
            have = true;
        }
    }
    for (std::size_t i = 0; i < nu && !have; ++i)
        for (std::size_t j = i + 1; j < nu && !have; ++j)
            for (u64 x = 0; x < p && !have; ++x) {
                u64 rem = (d1 + p - mulmod(space_diag[i], mulmod(x, x, p), p) % p) % p;
                u64 want = mulmod(rem, invmod(space_diag[j], p), p);
                if (sqrt_tab[want] >= 0) {
                    r[i] = x;
                    r[j] = static_cast<u64>(sqrt_tab[want]);
                    have = true;
                }
            }
    if (!have) throw QfError("internal: witt representative not found");

    // restrict to r-perp: kernel of x -> sum a_i r_i x_i
    std::vector<std::vector<u64>> lin(1, std::vector<u64>(nu));
    for (std::size_t i = 0; i < nu; ++i) lin[0][i] = mulmod(space_diag[i], r[i], p);
    AffineModSolutions ker = solve_mod_p(lin, {0}, p);
    const std::size_t nv = ker.kernel.size();  // nu - 1
    std::vector<std::vector<u64>> gram(nv, std::vector<u64>(nv, 0));
    for (std::size_t i = 0; i < nv; ++i)
        for (std::size_t j = 0; j < nv; ++j) {
            u64 s = 0;
            for (std::size_t u = 0; u < nu; ++u)
                s = (s + mulmod(space_diag[u], mulmod(ker.kernel[i][u], ker.kernel[j][u], p), p)) %
                    p;
            gram[i][j] = s;
        }
    std::vector<u64> sub = diagonalize_mod_p(gram, p);
    for (u64 v : sub)
        if (v % p == 0) throw QfError("internal: restricted space degenerate");
    return n1 * witt_count(sub, targets, ti + 1, p);
}

}  // namespace detail

inline Int count_modp_unramified(const QuadraticForm& a, const QuadraticForm& b, const Int& p) {
    const u64 pp = p.convert_to<u64>();
    const int n = a.dim(), m = b.dim();
    std::vector<std::vector<u64>> ga(n, std::vector<u64>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ga[i][j] = int_mod(a(i, j), pp);
    std::vector<u64> adiag = diagonalize_mod_p(ga, pp);
    for (u64 v : adiag)
        if (v % pp == 0) throw QfError("internal: A degenerate mod p in unramified path");
    std::vector<std::vector<u64>> gb(m, std::vector<u64>(m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) gb[i][j] = int_mod(b(i, j), pp);
    std::vector<u64> bdiag = diagonalize_mod_p(gb, pp);
    for (u64 v : bdiag)
        if (v % pp == 0) throw QfError("internal: B degenerate mod p in unramified path");
    return detail::witt_count(adiag, bdiag, 0, pp);
}

// ---------------------------------------------------------------------------
// Level-count dispatcher.
// ---------------------------------------------------------------------------

/// Exact N(p^t) = #{X mod p^t : X^T A X == B (mod p^t)}.
class LocalCounter {
public:
    LocalCounter(const QuadraticForm& a, const QuadraticForm& b, const Int& p,
                 LocalCountOptions opt = {})
        : a_(a), b_(b), p_(p), opt_(opt) {
        if (b.dim() > a.dim()) throw QfError("local counts need m <= n");
        if (a.dim() == 0) throw QfError("empty form");
        m1_ = (b.dim() == 1);
        if (m1_) blocks_ = padic_block_diagonalize(a.gram().cast<Rat>(), p);
        if (m1_ && p != 2) {
            for (const auto& blk : blocks_.blocks) {
                detail::DescentVar v;
                if (blk(0, 0) == 0) throw QfError("internal: zero block for PD form");
                v.e = detail::rat_val(blk(0, 0), p);
                v.unit = blk(0, 0) / Rat(pow_int(p, v.e));
                v.u = rat_mod(v.unit, p.convert_to<u64>());
                dvars_.push_back(v);
            }
        }
    }

    Int count(int t) {
        if (t <= 0) return 1;
        if (!m1_) {
            if (!lift_) lift_.emplace(a_, b_, p_, opt_);
            return lift_->count(t);
        }
        if (p_ != 2) return detail::m1_descent_count(dvars_, Int(b_(0, 0)), p_, t);
        // p = 2 convolution engine
        Int pt = pow_int(p_, t);
        bool has2x2 = false;
        for (const auto& blk : blocks_.blocks)
            if (blk.rows() == 2) has2x2 = true;
        if (pt > Int(has2x2 ? opt_.block2_cap : opt_.hist_cap))
            throw CapExceeded("local convolution modulus p^t = " + pt.str() +
                              " exceeds the histogram cap");
        try {
            return detail::m1_conv_count<detail::u128>(blocks_, Int(b_(0, 0)), p_, t);
        } catch (const detail::ConvOverflow&) {
            return detail::m1_conv_count<Int>(blocks_, Int(b_(0, 0)), p_, t);
        }
    }

    /// Normalized level value N(p^t) * p^{-t(mn - R)}.
    Rat normalized(int t) {
        const int expn = a_.dim() * b_.dim() - pair_count(b_.dim());
        return Rat(count(t)) / Rat(pow_int(p_, static_cast<unsigned long>(t) * expn));
    }

private:
    const QuadraticForm& a_;
    const QuadraticForm& b_;
    Int p_;
    LocalCountOptions opt_;
    bool m1_ = false;
    PadicBlocks blocks_;
    std::vector<detail::DescentVar> dvars_;
    std::optional<LiftingCounter> lift_;
};

}  // namespace qfrep
