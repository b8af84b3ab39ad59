#pragma once

#include "forms.hpp"
#include "int_types.hpp"
#include "matrix.hpp"
#include "rng.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <cstdint>
#include <future>
#include <string>
#include <vector>

namespace qfrep {

struct ArchimedeanDensity {
    double value = 0;
    std::string method;  // "closed_form" or "shell_estimate"
    double epsilon = 0;
    long long samples = 0;
    double std_error = 0;
    std::uint64_t seed = 0;
};

/// Closed Gamma-function form of the real-solution density:
///   (det A)^{-m/2} (det B)^{(n-m-1)/2} pi^{m(2n-m+1)/4} prod_{n-m<j<=n} Gamma(j/2)^{-1}
inline ArchimedeanDensity alpha_infinity_closed(const QuadraticForm& a, const QuadraticForm& b) {
    using BF = boost::multiprecision::cpp_bin_float_50;
    const int n = a.dim(), m = b.dim();
    if (n <= m)
        throw DimensionRegime("closed form needs n >= m+1, got n = " + std::to_string(n) +
                              ", m = " + std::to_string(m));
    const BF pi = boost::math::constants::pi<BF>();
    BF v = pow(BF(a.determinant().str()), -BF(m) / 2);
    v *= pow(BF(b.determinant().str()), BF(n - m - 1) / 2);
    v *= pow(pi, BF(m) * (2 * n - m + 1) / 4);
    for (int j = n - m + 1; j <= n; ++j) v /= boost::math::tgamma(BF(j) / 2);
    ArchimedeanDensity out;
    out.value = v.convert_to<double>();
    out.method = "closed_form";
    return out;
}

/// Monte Carlo estimate of the shell-volume limit at the paper normalization
/// P_i = B_ii^{1/2}:
///   (2 eps)^{-R} Pi^{-(m+1)} vol{ X : |x_i^T A x_j - B_ij| <= eps P_i P_j }
/// over the coordinate box implied by positive definiteness.  Deterministic
/// for a fixed seed, independent of the worker count.
inline ArchimedeanDensity alpha_infinity_shell(const QuadraticForm& a, const QuadraticForm& b,
                                               double epsilon, long long samples,
                                               std::uint64_t seed, int threads = 1) {
    const int n = a.dim(), m = b.dim();
    const int R = pair_count(m);
    if (epsilon <= 0 || epsilon > 0.1) throw QfError("shell epsilon must lie in (0, 0.1]");
    if (samples < 10000) throw QfError("shell estimator needs at least 10^4 samples");

    std::vector<double> P(m), target(R);
    {
        int idx = 0;
        for (int i = 0; i < m; ++i) {
            P[i] = std::sqrt(b(i, i).convert_to<double>());
            for (int j = i; j < m; ++j) target[idx++] = b(i, j).convert_to<double>();
        }
    }
    double Pi = 1;
    for (double v : P) Pi *= v;

    // per-column coordinate bounds: x^T A x <= B_ii + eps P_i^2 confines
    // coordinate j to |x_j| <= sqrt((B_ii + eps P_i^2) (A^{-1})_jj)
    RatMat inv = inverse_rational(a.gram());
    std::vector<double> bound(m * n);
    double logvol = 0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            double r = std::sqrt((b(i, i).convert_to<double>() + epsilon * P[i] * P[i]) *
                                 inv(j, j).convert_to<double>()) *
                       (1 + 1e-12);
            bound[i * n + j] = r;
            logvol += std::log(2 * r);
        }
    const double boxvol = std::exp(logvol);

    std::vector<double> am(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) am[i * n + j] = a(i, j).convert_to<double>();

    auto run_range = [&](long long lo, long long hi) {
        long long hits = 0;
        std::vector<double> x(m * n), w(m * n);
        for (long long s = lo; s < hi; ++s) {
            const std::uint64_t base = static_cast<std::uint64_t>(s) *
                                       static_cast<std::uint64_t>(m * n);
            for (int c = 0; c < m * n; ++c)
                x[c] = (2 * uniform01(seed, base + c) - 1) * bound[c];
            for (int i = 0; i < m; ++i)
                for (int u = 0; u < n; ++u) {
                    double acc = 0;
                    for (int v = 0; v < n; ++v) acc += am[u * n + v] * x[i * n + v];
                    w[i * n + u] = acc;
                }
            bool ok = true;
            int idx = 0;
            for (int i = 0; i < m && ok; ++i)
                for (int j = i; j < m && ok; ++j) {
                    double g = 0;
                    for (int u = 0; u < n; ++u) g += x[i * n + u] * w[j * n + u];
                    if (std::fabs(g - target[idx]) > epsilon * P[i] * P[j]) ok = false;
                    ++idx;
                }
            if (ok) ++hits;
        }
        return hits;
    };

    long long hits = 0;
    if (threads <= 1) {
        hits = run_range(0, samples);
    } else {
        std::vector<std::future<long long>> futs;
        for (int t = 0; t < threads; ++t) {
            long long lo = samples * t / threads, hi = samples * (t + 1) / threads;
            futs.push_back(std::async(std::launch::async, run_range, lo, hi));
        }
        for (auto& f : futs) hits += f.get();
    }

    const double f = static_cast<double>(hits) / static_cast<double>(samples);
    const double norm = std::pow(2 * epsilon, R) * std::pow(Pi, m + 1);
    ArchimedeanDensity out;
    out.method = "shell_estimate";
    out.value = boxvol * f / norm;
    out.std_error = boxvol * std::sqrt(f * (1 - f) / static_cast<double>(samples)) / norm;
    out.epsilon = epsilon;
    out.samples = samples;
    out.seed = seed;
    return out;
}

/// c_ij = B_ij / (P_i P_j); the symmetrized matrix is D B D with
/// D = diag(1/P_i), positive definite because B is and the P_i are positive.
struct NormalizedTarget {
    std::vector<double> c;  // upper triangle, row-major
};

inline NormalizedTarget normalized_target(const QuadraticForm& b, const std::vector<long double>& P) {
    const int m = b.dim();
    if (static_cast<int>(P.size()) != m) throw QfError("normalized_target: wrong P length");
    for (long double p : P)
        if (!(p > 0) || !std::isfinite((double)p))
            throw DegenerateGamma("normalized target needs positive finite P_i");
    NormalizedTarget out;
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j)
            out.c.push_back(b(i, j).convert_to<double>() / (double)(P[i] * P[j]));
    // positive definiteness sanity on the symmetrized matrix (floating
    // leading minors; exactness already guaranteed by the D B D factorization)
    std::vector<std::vector<double>> cm(m, std::vector<double>(m));
    int idx = 0;
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            cm[i][j] = out.c[idx];
            cm[j][i] = out.c[idx];
            ++idx;
        }
    for (int k = 1; k <= m; ++k) {
        // tiny determinants via Laplace on k <= 3
        double det = 0;
        if (k == 1)
            det = cm[0][0];
        else if (k == 2)
            det = cm[0][0] * cm[1][1] - cm[0][1] * cm[1][0];
        else if (k == 3)
            det = cm[0][0] * (cm[1][1] * cm[2][2] - cm[1][2] * cm[2][1]) -
                  cm[0][1] * (cm[1][0] * cm[2][2] - cm[1][2] * cm[2][0]) +
                  cm[0][2] * (cm[1][0] * cm[2][1] - cm[1][1] * cm[2][0]);
        else
            break;
        if (det <= 0) throw QfError("internal: normalized target not positive definite");
    }
    return out;
}

}  // namespace qfrep
