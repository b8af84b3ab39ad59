#pragma once

#include "count.hpp"
#include "forms.hpp"
#include "hnf.hpp"
#include "int_types.hpp"
#include "matrix.hpp"

#include <array>
#include <vector>

namespace qfrep {

/// min over nonzero integer x of x^T B x, by exact enumeration; the minimum
/// of the diagonal is an upper bound, so targets 1..min(diag) suffice.
inline Int first_minimum(const QuadraticForm& b) {
    Int bound = b(0, 0);
    for (int i = 1; i < b.dim(); ++i)
        if (b(i, i) < bound) bound = b(i, i);
    for (Int t = 1; t <= bound; ++t) {
        EnumProblem p{b.gram(), t};
        EnumResult r = enumerate_norm_solutions(p);
        if (r.count > 0) return t;
    }
    return bound;  // diagonal unit vector attains it
}

struct ReductionResult {
    QuadraticForm reduced;
    IntMat transform;  // unimodular U with U^T B U = reduced
};

namespace detail {

inline Int round_nearest_div(const Int& a, const Int& b) {  // b > 0
    return floor_div(2 * a + b, 2 * b);
}

// 3x3 unimodular matrices with entries in [-2, 2]; the greedy local search
// neighbourhood.  Built once.
inline const std::vector<std::array<int, 9>>& small_unimodular3() {
    static const std::vector<std::array<int, 9>> table = [] {
        std::vector<std::array<int, 9>> t;
        std::array<int, 9> u{};
        for (u[0] = -2; u[0] <= 2; ++u[0])
            for (u[1] = -2; u[1] <= 2; ++u[1])
                for (u[2] = -2; u[2] <= 2; ++u[2])
                    for (u[3] = -2; u[3] <= 2; ++u[3])
                        for (u[4] = -2; u[4] <= 2; ++u[4])
                            for (u[5] = -2; u[5] <= 2; ++u[5])
                                for (u[6] = -2; u[6] <= 2; ++u[6])
                                    for (u[7] = -2; u[7] <= 2; ++u[7])
                                        for (u[8] = -2; u[8] <= 2; ++u[8]) {
                                            long det = (long)u[0] * (u[4] * u[8] - u[5] * u[7]) -
                                                       (long)u[1] * (u[3] * u[8] - u[5] * u[6]) +
                                                       (long)u[2] * (u[3] * u[7] - u[4] * u[6]);
                                            if (det == 1 || det == -1) t.push_back(u);
                                        }
        return t;
    }();
    return table;
}

}  // namespace detail

inline bool satisfies_reduction_conditions(const QuadraticForm& b) {
    const int m = b.dim();
    if (b(0, 0) <= 0) return false;
    for (int i = 0; i + 1 < m; ++i)
        if (b(i, i) > b(i + 1, i + 1)) return false;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (abs(b(i, j)) > b(i, i)) return false;
    return first_minimum(b) == b(0, 0);
}

/// Minkowski reduction for m <= 3: Lagrange reduction at m = 2, greedy pair
/// reduction plus an exhaustive local unimodular search (entries bounded by
/// 2) at m = 3, with a verified-conditions postcheck.
inline ReductionResult minkowski_reduce(const QuadraticForm& b) {
    const int m = b.dim();
    if (m > 3) throw UnsupportedDimension("reduction implemented for dim <= 3, got " + std::to_string(m));

    IntMat cur = b.gram();
    IntMat trans = IntMat::identity(m);
    auto apply = [&](const IntMat& u) {
        cur = u.transpose() * cur * u;
        trans = trans * u;
    };

    for (int guard = 0; guard < 100000; ++guard) {
        bool changed = false;

        // sort diagonal ascending (stable) with a permutation
        for (int i = 0; i + 1 < m; ++i) {
            int best = i;
            for (int j = i + 1; j < m; ++j)
                if (cur(j, j) < cur(best, best)) best = j;
            if (best != i) {
                IntMat perm = IntMat::identity(m);
                perm(i, i) = 0;
                perm(best, best) = 0;
                perm(i, best) = 1;
                perm(best, i) = 1;
                apply(perm);
                changed = true;
            }
        }

        // pairwise Lagrange steps: col_j -= round(B_ij/B_ii) col_i, applied
        // only when it strictly shrinks the off-diagonal (|2 B_ij| > B_ii)
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                if (2 * abs(cur(i, j)) <= cur(i, i)) continue;
                Int q = detail::round_nearest_div(cur(i, j), cur(i, i));
                IntMat e = IntMat::identity(m);
                e(i, j) = -q;
                apply(e);
                changed = true;
            }
        if (changed) continue;

        // make sure the first basis vector attains the minimum
        QuadraticForm qcur = QuadraticForm::validate(cur);
        Int fmin = first_minimum(qcur);
        if (fmin < cur(0, 0)) {
            auto vs = vectors_of_norm(qcur, fmin);
            apply(complete_to_unimodular(vs.front()));
            continue;
        }

        if (m == 3) {
            // exhaustive local unimodular search, lexicographic diagonal
            bool improved = false;
            for (const auto& u9 : detail::small_unimodular3()) {
                IntMat u(3, 3);
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) u(i, j) = u9[i * 3 + j];
                IntMat cand = u.transpose() * cur * u;
                for (int i = 0; i < 3; ++i) {
                    if (cand(i, i) < cur(i, i)) {
                        apply(u);
                        improved = true;
                        break;
                    }
                    if (cand(i, i) > cur(i, i)) break;
                }
                if (improved) break;
            }
            if (improved) continue;
        }
        break;
    }

    QuadraticForm reduced = QuadraticForm::validate(cur);
    if (!satisfies_reduction_conditions(reduced))
        throw QfError("internal: reduction postcheck failed");
    if (!(trans.transpose() * b.gram() * trans == cur))
        throw QfError("internal: reduction transform identity failed");
    Int dt = bareiss_det(trans, m);
    if (dt != 1 && dt != -1) throw QfError("internal: reduction transform not unimodular");
    return {reduced, trans};
}

}  // namespace qfrep
