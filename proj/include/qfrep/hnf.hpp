#pragma once

#include "int_types.hpp"
#include "matrix.hpp"

#include <optional>
#include <vector>

namespace qfrep {

/// Integer solutions of M x = v (M: k x n, k <= n typically).
/// feasible == false means no integer solution exists.
/// Otherwise x = particular + kernel * z, z in Z^d, parametrizes all of them.
struct IntegerAffineSolution {
    bool feasible = false;
    std::vector<Int> particular;  // length n
    IntMat kernel;                // n x d, columns form a basis of ker_Z(M)
};

/// Column-echelon reduction by unimodular column operations (Hermite-style).
/// Exact; sizes here are tiny so no effort is spent on pivot strategies.
inline IntegerAffineSolution solve_integer_linear(const IntMat& m_in, const std::vector<Int>& v) {
    const std::size_t k = m_in.rows(), n = m_in.cols();
    IntMat m = m_in;
    IntMat u = IntMat::identity(n);

    auto colop_swap = [&](std::size_t a, std::size_t b) {
        for (std::size_t i = 0; i < k; ++i) std::swap(m(i, a), m(i, b));
        for (std::size_t i = 0; i < n; ++i) std::swap(u(i, a), u(i, b));
    };
    // col_a -= q * col_b
    auto colop_axpy = [&](std::size_t a, std::size_t b, const Int& q) {
        if (q == 0) return;
        for (std::size_t i = 0; i < k; ++i) m(i, a) -= q * m(i, b);
        for (std::size_t i = 0; i < n; ++i) u(i, a) -= q * u(i, b);
    };

    std::vector<std::size_t> pivot_col_of_row(k, SIZE_MAX);
    std::size_t c = 0;
    for (std::size_t r = 0; r < k && c < n; ++r) {
        // gcd-chain all columns >= c on row r into column c
        while (true) {
            std::size_t best = SIZE_MAX;
            for (std::size_t j = c; j < n; ++j) {
                if (m(r, j) == 0) continue;
                if (best == SIZE_MAX || abs(m(r, j)) < abs(m(r, best))) best = j;
            }
            if (best == SIZE_MAX) break;  // row r zero on remaining columns
            if (best != c) colop_swap(c, best);
            bool clean = true;
            for (std::size_t j = c + 1; j < n; ++j) {
                if (m(r, j) == 0) continue;
                Int q = m(r, j) / m(r, c);  // truncated is fine here
                colop_axpy(j, c, q);
                if (m(r, j) != 0) clean = false;
            }
            if (clean) break;
        }
        if (c < n && m(r, c) != 0) {
            pivot_col_of_row[r] = c;
            ++c;
        }
    }

    // Forward substitution on the echelon form: E y = v, with y supported on
    // pivot columns; divisibility failures mean no integer solution.
    std::vector<Int> y(n, 0);
    for (std::size_t r = 0; r < k; ++r) {
        Int acc = v[r];
        for (std::size_t j = 0; j < c; ++j) acc -= m(r, j) * y[j];
        std::size_t pc = pivot_col_of_row[r];
        if (pc == SIZE_MAX) {
            if (acc != 0) return {};  // inconsistent row
            continue;
        }
        if (acc % m(r, pc) != 0) return {};  // no integral solution
        y[pc] = acc / m(r, pc);
    }

    IntegerAffineSolution sol;
    sol.feasible = true;
    sol.particular = u * y;
    sol.kernel = IntMat(n, n - c);
    for (std::size_t j = c; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) sol.kernel(i, j - c) = u(i, j);
    return sol;
}

/// Unimodular matrix whose first column is the given primitive vector.
inline IntMat complete_to_unimodular(const std::vector<Int>& v) {
    const std::size_t n = v.size();
    // Column-reduce the row [v^T] to (g, 0, ..., 0); the recorded column ops
    // U satisfy v^T U = (g, 0...), so U^{-1} has last.. first row structure;
    // easier: solve with the echelon machinery on the 1 x n system.
    IntMat m(1, n);
    for (std::size_t j = 0; j < n; ++j) m(0, j) = v[j];
    IntMat u = IntMat::identity(n);
    auto colop_swap = [&](std::size_t a, std::size_t b) {
        std::swap(m(0, a), m(0, b));
        for (std::size_t i = 0; i < n; ++i) std::swap(u(i, a), u(i, b));
    };
    auto colop_axpy = [&](std::size_t a, std::size_t b, const Int& q) {
        if (q == 0) return;
        m(0, a) -= q * m(0, b);
        for (std::size_t i = 0; i < n; ++i) u(i, a) -= q * u(i, b);
    };
    while (true) {
        std::size_t best = SIZE_MAX;
        for (std::size_t j = 0; j < n; ++j) {
            if (m(0, j) == 0) continue;
            if (best == SIZE_MAX || abs(m(0, j)) < abs(m(0, best))) best = j;
        }
        if (best == SIZE_MAX) throw QfError("zero vector cannot be completed");
        if (best != 0) colop_swap(0, best);
        bool clean = true;
        for (std::size_t j = 1; j < n; ++j) {
            if (m(0, j) == 0) continue;
            colop_axpy(j, 0, m(0, j) / m(0, 0));
            if (m(0, j) != 0) clean = false;
        }
        if (clean) break;
    }
    if (abs(m(0, 0)) != 1) throw QfError("vector is not primitive");
    // Now v^T u = (g, 0, ..., 0) with g = +-1, i.e. u^T v = g e_1, so
    // v = g * (first column of u^{-T}).  u^{-T} is unimodular with integer
    // entries; flipping its first column by g puts v there.
    RatMat inv = inverse_rational(u);
    IntMat w(n, n);
    const Int g = m(0, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Rat e = inv(j, i);  // transpose
            if (denominator(e) != 1) throw QfError("unimodular inverse not integral");
            w(i, j) = numerator(e) * (j == 0 ? g : Int(1));
        }
    for (std::size_t i = 0; i < n; ++i)
        if (w(i, 0) != v[i]) throw QfError("unimodular completion failed");
    return w;
}

}  // namespace qfrep
