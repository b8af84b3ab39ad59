#pragma once

#include <qfrep/forms.hpp>
#include <qfrep/matrix.hpp>

#include <random>

namespace qfrep::testutil {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Diagonally dominant symmetric integer matrix; positive definite by
// Gershgorin.
inline IntMat random_diag_dominant(Rng& rng, int n, int max_off) {
    IntMat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            int v = uniform_int(rng, -max_off, max_off);
            m(i, j) = v;
            m(j, i) = v;
        }
    for (int i = 0; i < n; ++i) {
        Int s = 0;
        for (int j = 0; j < n; ++j)
            if (j != i) s += abs(m(i, j));
        m(i, i) = s + uniform_int(rng, 1, max_off + 1);
    }
    return m;
}

inline QuadraticForm random_pd_form(Rng& rng, int n, int max_off) {
    return QuadraticForm::validate(random_diag_dominant(rng, n, max_off));
}

// V^T V for a random invertible V; produces smaller, less dominated forms.
inline QuadraticForm random_gram_form(Rng& rng, int n, int spread) {
    while (true) {
        IntMat v(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) v(i, j) = uniform_int(rng, -spread, spread);
        if (bareiss_det(v, n) == 0) continue;
        return QuadraticForm::validate(v.transpose() * v);
    }
}

inline IntMat random_unimodular(Rng& rng, int n, int steps) {
    IntMat u = IntMat::identity(n);
    for (int s = 0; s < steps; ++s) {
        int kind = uniform_int(rng, 0, 2);
        int i = uniform_int(rng, 0, n - 1);
        int j = uniform_int(rng, 0, n - 1);
        if (kind == 0 && i != j) {
            IntMat e = IntMat::identity(n);
            e(i, j) = uniform_int(rng, -2, 2);
            u = u * e;
        } else if (kind == 1 && i != j) {
            IntMat e = IntMat::identity(n);
            e(i, i) = 0;
            e(j, j) = 0;
            e(i, j) = 1;
            e(j, i) = 1;
            u = u * e;
        } else {
            IntMat e = IntMat::identity(n);
            e(i, i) = -1;
            u = u * e;
        }
    }
    return u;
}

}  // namespace qfrep::testutil
