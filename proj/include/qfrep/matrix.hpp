#pragma once

#include "int_types.hpp"

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace qfrep {

// Minimal dense matrix; dimensions here never exceed a dozen or so, clarity
// beats cleverness.
template <class T>
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), d_(rows * cols) {}

    Mat(std::initializer_list<std::initializer_list<T>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        d_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) throw QfError("ragged initializer");
            for (const auto& v : row) d_.push_back(v);
        }
    }

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t i, std::size_t j) { return d_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return d_[i * cols_ + j]; }

    bool operator==(const Mat& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && d_ == o.d_;
    }

    Mat transpose() const {
        Mat t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Mat operator*(const Mat& o) const {
        if (cols_ != o.rows_) throw QfError("matrix product shape mismatch");
        Mat r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const T& a = (*this)(i, k);
                if (a == T(0)) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
            }
        return r;
    }

    std::vector<T> operator*(const std::vector<T>& v) const {
        if (cols_ != v.size()) throw QfError("matrix-vector shape mismatch");
        std::vector<T> r(rows_, T(0));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
        return r;
    }

    template <class U>
    Mat<U> cast() const {
        Mat<U> r(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(i, j) = U((*this)(i, j));
        return r;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> d_;
};

using IntMat = Mat<Int>;
using RatMat = Mat<Rat>;

template <class T>
std::vector<T> row_of(const Mat<T>& m, std::size_t i) {
    std::vector<T> r(m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) r[j] = m(i, j);
    return r;
}

template <class T>
T dot(const std::vector<T>& a, const std::vector<T>& b) {
    T s(0);
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Determinant of the leading k x k block, fraction-free (Bareiss).  Exact for
// integer entries; row swaps only, so it also handles zero pivots.
inline Int bareiss_det(const IntMat& a, std::size_t k) {
    if (k == 0) return 1;
    IntMat m(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) m(i, j) = a(i, j);
    Int prev = 1;
    int sign = 1;
    for (std::size_t s = 0; s + 1 < k; ++s) {
        if (m(s, s) == 0) {
            std::size_t piv = s + 1;
            while (piv < k && m(piv, s) == 0) ++piv;
            if (piv == k) return 0;
            for (std::size_t j = 0; j < k; ++j) std::swap(m(s, j), m(piv, j));
            sign = -sign;
        }
        for (std::size_t i = s + 1; i < k; ++i)
            for (std::size_t j = s + 1; j < k; ++j)
                m(i, j) = (m(i, j) * m(s, s) - m(i, s) * m(s, j)) / prev;
        prev = m(s, s);
    }
    return sign > 0 ? m(k - 1, k - 1) : -m(k - 1, k - 1);
}

// Exact inverse via Gauss-Jordan over the rationals.
inline RatMat inverse_rational(const IntMat& a) {
    const std::size_t n = a.rows();
    RatMat m(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m(i, j) = Rat(a(i, j));
        m(i, n + i) = 1;
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && m(piv, c) == 0) ++piv;
        if (piv == n) throw QfError("singular matrix");
        if (piv != c)
            for (std::size_t j = 0; j < 2 * n; ++j) std::swap(m(c, j), m(piv, j));
        Rat d = m(c, c);
        for (std::size_t j = 0; j < 2 * n; ++j) m(c, j) /= d;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || m(i, c) == 0) continue;
            Rat f = m(i, c);
            for (std::size_t j = 0; j < 2 * n; ++j) m(i, j) -= f * m(c, j);
        }
    }
    RatMat inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv(i, j) = m(i, n + j);
    return inv;
}

}  // namespace qfrep
