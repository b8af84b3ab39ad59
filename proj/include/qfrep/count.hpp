#pragma once

#include "forms.hpp"
#include "hnf.hpp"
#include "int_types.hpp"
#include "lattice_enum.hpp"
#include "matrix.hpp"

#include <chrono>
#include <future>
#include <vector>

namespace qfrep {

struct RepresentationProblem {
    QuadraticForm A;  // dim n
    QuadraticForm B;  // dim m
};

struct RepresentationCount {
    Int count = 0;
    unsigned long long nodes_visited = 0;
    double elapsed_ms = 0.0;
};

/// All integer vectors x with x^T A x = t, both signs included.
inline std::vector<std::vector<Int>> vectors_of_norm(const QuadraticForm& a, const Int& t) {
    std::vector<std::vector<Int>> out;
    if (t < 1) return out;
    EnumProblem p{a.gram(), t};
    enumerate_norm_solutions(p, [&](const std::vector<Int>& x) { out.push_back(x); });
    return out;
}

namespace detail {

// floor(sqrt(r)) for a nonnegative rational.
inline Int isqrt_rat_floor(const Rat& r) {
    Int y = isqrt(numerator(r) / denominator(r));
    while (Rat((y + 1) * (y + 1)) <= r) ++y;
    while (y > 0 && Rat(y * y) > r) --y;
    return y;
}

struct ColumnCounter {
    const IntMat* gram = nullptr;
    const QuadraticForm* B = nullptr;
    int n = 0, m = 0;
    unsigned long long nodes = 0;

    // Counts completions of the fixed columns xs[0..k-1] to full solutions.
    Int complete(std::vector<std::vector<Int>>& xs, int k) {
        if (k == static_cast<int>(m)) return 1;
        const Int& target = (*B)(k, k);

        if (k == 0) {
            EnumProblem p{*gram, target};
            if (m == 1) {
                EnumResult r = enumerate_norm_solutions(p);
                nodes += r.nodes;
                return r.count;
            }
            Int total = 0;
            EnumResult r = enumerate_norm_solutions(p, [&](const std::vector<Int>& x) {
                xs.push_back(x);
                total += complete(xs, 1);
                xs.pop_back();
            });
            nodes += r.nodes;
            return total;
        }

        // Bilinear constraints x_i^T A x = B_ik restrict x to a coset of a
        // sublattice; enumerate in that coset.
        IntMat msys(k, n);
        std::vector<Int> rhs(k);
        for (int i = 0; i < k; ++i) {
            std::vector<Int> row = (*gram) * xs[i];
            for (int j = 0; j < n; ++j) msys(i, j) = row[j];
            rhs[i] = (*B)(i, k);
        }
        IntegerAffineSolution sol = solve_integer_linear(msys, rhs);
        if (!sol.feasible) return 0;
        const int d = static_cast<int>(sol.kernel.cols());

        if (d == 0) {
            std::vector<Int> x0 = sol.particular;
            Int q = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) q += x0[i] * (*gram)(i, j) * x0[j];
            if (q != target) return 0;
            xs.push_back(std::move(x0));
            Int r = complete(xs, k + 1);
            xs.pop_back();
            return r;
        }

        // z-coordinates: x = x0 + K z.  Complete the square exactly:
        // with Gz = K^T A K, ell = K^T A x0, L = det Gz,
        //   w := L z + adj(Gz) ell  satisfies  w == adj(Gz) ell (mod L),
        //   w^T Gz w = L^2 (target - x0^T A x0) + L ell^T adj(Gz) ell.
        const IntMat& K = sol.kernel;
        IntMat AK = (*gram) * K;
        IntMat Gz = K.transpose() * AK;
        std::vector<Int> ax0 = (*gram) * sol.particular;
        std::vector<Int> ell(d, 0);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < n; ++j) ell[i] += K(j, i) * ax0[j];
        Int c0 = dot(sol.particular, ax0);

        Int L = bareiss_det(Gz, d);
        RatMat inv = inverse_rational(Gz);
        IntMat adj(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Rat e = inv(i, j) * Rat(L);
                adj(i, j) = numerator(e);  // exact: adjugate of an integer matrix
            }
        std::vector<Int> sigma = adj * ell;
        Int elladj = dot(ell, sigma);
        EnumProblem p;
        p.G = Gz;
        p.T = L * L * (target - c0) + L * elladj;
        p.L = L;
        p.sigma = sigma;

        const bool last = (k == m - 1);
        if (last) {
            EnumResult r = enumerate_norm_solutions(p);
            nodes += r.nodes;
            return r.count;
        }
        Int total = 0;
        EnumResult r = enumerate_norm_solutions(p, [&](const std::vector<Int>& w) {
            std::vector<Int> x = sol.particular;
            for (int i = 0; i < d; ++i) {
                Int zi = (w[i] - sigma[i]) / L;
                for (int j = 0; j < n; ++j) x[j] += K(j, i) * zi;
            }
            xs.push_back(std::move(x));
            total += complete(xs, k + 1);
            xs.pop_back();
        });
        nodes += r.nodes;
        return total;
    }
};

}  // namespace detail

/// Exact N(A,B), column-by-column pruned enumeration.  The search tree may be
/// split at the first-column level; the result is identical for any thread
/// count.
inline RepresentationCount count_representations(const RepresentationProblem& prob,
                                                 int threads = 1) {
    const auto t0 = std::chrono::steady_clock::now();
    RepresentationCount out;
    const int n = prob.A.dim(), m = prob.B.dim();
    auto finish = [&]() {
        out.elapsed_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        return out;
    };
    if (m > n) return finish();  // rank m form cannot embed in rank n < m

    if (m == 1) {
        EnumProblem p{prob.A.gram(), prob.B(0, 0)};
        EnumResult r = enumerate_norm_solutions(p, {}, threads);
        out.count = r.count;
        out.nodes_visited = r.nodes;
        return finish();
    }

    std::vector<std::vector<Int>> first = vectors_of_norm(prob.A, prob.B(0, 0));
    if (threads <= 1 || first.size() < 2) {
        detail::ColumnCounter cc{&prob.A.gram(), &prob.B, n, m};
        Int total = 0;
        std::vector<std::vector<Int>> xs;
        for (const auto& x1 : first) {
            xs.push_back(x1);
            total += cc.complete(xs, 1);
            xs.pop_back();
        }
        out.count = total;
        out.nodes_visited = cc.nodes + first.size();
        return finish();
    }

    int nt = std::min<std::size_t>(threads, first.size());
    std::vector<std::future<std::pair<Int, unsigned long long>>> futs;
    for (int t = 0; t < nt; ++t) {
        std::size_t lo = first.size() * t / nt, hi = first.size() * (t + 1) / nt;
        futs.push_back(std::async(std::launch::async, [&, lo, hi]() {
            detail::ColumnCounter cc{&prob.A.gram(), &prob.B, n, m};
            Int total = 0;
            std::vector<std::vector<Int>> xs;
            for (std::size_t i = lo; i < hi; ++i) {
                xs.push_back(first[i]);
                total += cc.complete(xs, 1);
                xs.pop_back();
            }
            return std::make_pair(total, cc.nodes);
        }));
    }
    Int total = 0;
    unsigned long long nodes = first.size();
    for (auto& f : futs) {
        auto [c, nd] = f.get();
        total += c;
        nodes += nd;
    }
    out.count = total;
    out.nodes_visited = nodes;
    return finish();
}

/// Test oracle: exhaustive scan of the coordinate box |x_i| <= sqrt(B_kk *
/// (A^{-1})_ii) per column.  Independent of the pruned enumeration path.
inline RepresentationCount brute_force_count(const RepresentationProblem& prob,
                                             const Int& cell_cap = Int(1000000000)) {
    const auto t0 = std::chrono::steady_clock::now();
    const int n = prob.A.dim(), m = prob.B.dim();
    RatMat inv = inverse_rational(prob.A.gram());

    std::vector<std::vector<long long>> bounds(m, std::vector<long long>(n));
    Int cells = 1;
    Int maxbound = 0;
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < n; ++i) {
            Int b = detail::isqrt_rat_floor(Rat(prob.B(k, k)) * inv(i, i));
            if (b > maxbound) maxbound = b;
            cells *= 2 * b + 1;
            if (cells > cell_cap)
                throw OracleTooLarge("brute-force box has " + cells.str() + " cells (cap " +
                                     cell_cap.str() + ")");
            bounds[k][i] = b.convert_to<long long>();
        }
    Int maxa = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (abs(prob.A(i, j)) > maxa) maxa = abs(prob.A(i, j));
    if (Int(n) * n * maxa * maxbound * maxbound > (Int(1) << 60))
        throw OracleTooLarge("brute-force values would overflow the scan arithmetic");

    std::vector<std::vector<long long>> a(n, std::vector<long long>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[i][j] = prob.A(i, j).convert_to<long long>();
    std::vector<long long> btarget(m * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) btarget[i * m + j] = prob.B(i, j).convert_to<long long>();

    std::vector<std::vector<long long>> cols(m, std::vector<long long>(n, 0));
    unsigned long long visited = 0;
    Int count = 0;

    auto col_ok = [&](int k) {
        long long q = 0;
        for (int i = 0; i < n; ++i) {
            if (!cols[k][i]) continue;
            for (int j = 0; j < n; ++j) q += cols[k][i] * a[i][j] * cols[k][j];
        }
        if (q != btarget[k * m + k]) return false;
        for (int i = 0; i < k; ++i) {
            long long s = 0;
            for (int u = 0; u < n; ++u) {
                if (!cols[i][u]) continue;
                for (int v = 0; v < n; ++v) s += cols[i][u] * a[u][v] * cols[k][v];
            }
            if (s != btarget[i * m + k]) return false;
        }
        return true;
    };

    // odometer over one column's box
    auto scan = [&](auto&& self, int k) -> void {
        std::vector<long long>& x = cols[k];
        for (int i = 0; i < n; ++i) x[i] = -bounds[k][i];
        while (true) {
            ++visited;
            if (col_ok(k)) {
                if (k + 1 == m)
                    ++count;
                else
                    self(self, k + 1);
            }
            int i = 0;
            while (i < n && x[i] == bounds[k][i]) {
                x[i] = -bounds[k][i];
                ++i;
            }
            if (i == n) break;
            ++x[i];
        }
    };
    scan(scan, 0);

    RepresentationCount out;
    out.count = count;
    out.nodes_visited = visited;
    out.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace qfrep
