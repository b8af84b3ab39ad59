#pragma once

#include "int_types.hpp"
#include "matrix.hpp"

#include <string>
#include <vector>

namespace qfrep {

/// A validated symmetric positive definite integer Gram matrix.  Immutable
/// after construction; all operations on it are pure.
class QuadraticForm {
public:
    /// Validates symmetry and positive definiteness (exact leading minors).
    /// Throws NotSymmetric or NotPositiveDefinite (with the 1-based index of
    /// the first failing minor).
    static QuadraticForm validate(const IntMat& entries) {
        if (entries.rows() == 0 || entries.rows() != entries.cols())
            throw NotSymmetric("form must be a non-empty square matrix");
        const std::size_t n = entries.rows();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (entries(i, j) != entries(j, i))
                    throw NotSymmetric("entries[" + std::to_string(i) + "][" + std::to_string(j) +
                                       "] != entries[" + std::to_string(j) + "][" +
                                       std::to_string(i) + "]");
        std::vector<Int> minors(n);
        for (std::size_t k = 1; k <= n; ++k) {
            minors[k - 1] = bareiss_det(entries, k);
            if (minors[k - 1] <= 0)
                throw NotPositiveDefinite(static_cast<int>(k),
                                          "leading minor " + std::to_string(k) +
                                              " is not positive (" + minors[k - 1].str() + ")");
        }
        return QuadraticForm(entries, std::move(minors));
    }

    int dim() const { return static_cast<int>(g_.rows()); }
    const IntMat& gram() const { return g_; }
    const Int& operator()(std::size_t i, std::size_t j) const { return g_(i, j); }

    /// Exact determinant (> 0), cached from validation.
    const Int& determinant() const { return minors_.back(); }

    /// All leading principal minors, 1x1 through dim x dim.
    const std::vector<Int>& leading_minors() const { return minors_; }

    /// x^T G x, exact.
    Int evaluate(const std::vector<Int>& x) const {
        Int s = 0;
        const std::size_t n = g_.rows();
        for (std::size_t i = 0; i < n; ++i) {
            if (x[i] == 0) continue;
            for (std::size_t j = 0; j < n; ++j) s += x[i] * g_(i, j) * x[j];
        }
        return s;
    }

    bool operator==(const QuadraticForm& o) const { return g_ == o.g_; }

private:
    QuadraticForm(IntMat g, std::vector<Int> minors) : g_(std::move(g)), minors_(std::move(minors)) {}
    IntMat g_;
    std::vector<Int> minors_;
};

inline QuadraticForm validate(const IntMat& entries) { return QuadraticForm::validate(entries); }

inline QuadraticForm identity_form(std::size_t n) {
    return QuadraticForm::validate(IntMat::identity(n));
}

inline QuadraticForm diagonal_form(const std::vector<Int>& d) {
    IntMat m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return QuadraticForm::validate(m);
}

inline Int determinant(const QuadraticForm& f) { return f.determinant(); }

// Number of constraints in X^T A X = B for an m-dimensional B.
inline int pair_count(int m) { return m * (m + 1) / 2; }

}  // namespace qfrep
