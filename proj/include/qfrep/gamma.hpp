#pragma once

#include "forms.hpp"
#include "int_types.hpp"
#include "reduction.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace qfrep {

/// Exponents gamma_i with B_11 = B_ii^{gamma_i}, and gamma = sum 1/gamma_i.
/// degenerate marks B_11 = 1 < B_ii, where the defining equation forces
/// gamma_i -> 0 and gamma is reported as +infinity.
struct GammaProfile {
    std::vector<long double> gamma_i;
    long double gamma = 0;
    bool degenerate = false;
};

inline GammaProfile gamma_profile(const QuadraticForm& reduced) {
    if (!satisfies_reduction_conditions(reduced))
        throw NotReduced("gamma profile requires a Minkowski-reduced form");
    const int m = reduced.dim();
    const Int& b11 = reduced(0, 0);
    GammaProfile out;
    out.gamma_i.resize(m);
    const long double log_b11 = std::log(b11.convert_to<long double>());
    for (int i = 0; i < m; ++i) {
        const Int& bii = reduced(i, i);
        if (bii == b11) {
            out.gamma_i[i] = 1.0L;  // equation is b11 = b11^g; take g = 1
        } else if (b11 == 1) {
            out.gamma_i[i] = 0.0L;  // forced limit; form is degenerate for the Theorem
            out.degenerate = true;
        } else {
            long double g = log_b11 / std::log(bii.convert_to<long double>());
            // residual check: the defining equation must hold to 1e-12
            long double resid = std::fabs(g * std::log(bii.convert_to<long double>()) - log_b11);
            if (resid > 1e-12L * std::max<long double>(1.0L, std::fabs(log_b11)))
                throw QfError("internal: gamma residual check failed");
            out.gamma_i[i] = g;
        }
    }
    if (out.degenerate) {
        out.gamma = std::numeric_limits<long double>::infinity();
    } else {
        long double s = 0;
        for (long double g : out.gamma_i) s += 1.0L / g;
        out.gamma = s;
    }
    return out;
}

/// Smallest n with n > (2 gamma + m(m-1)) (m(m+1)/2 + 1), plus R = m(m+1)/2.
struct TheoremThreshold {
    long long n_min = 0;
    int R = 0;
    long double bound = 0;
};

inline TheoremThreshold theorem_threshold(const GammaProfile& profile, int m) {
    if (profile.degenerate)
        throw DegenerateGamma("theorem threshold undefined for degenerate gamma");
    TheoremThreshold out;
    out.R = m * (m + 1) / 2;
    out.bound = (2.0L * profile.gamma + (long double)m * (m - 1)) * (out.R + 1);
    // strict inequality: if the bound is (numerically) an integer, the next
    // integer qualifies; otherwise ceil does
    long double nearest = std::round(out.bound);
    if (std::fabs(out.bound - nearest) < 1e-9L)
        out.n_min = static_cast<long long>(nearest) + 1;
    else
        out.n_min = static_cast<long long>(std::ceil(out.bound));
    return out;
}

/// Box scaling P_i = C^{1/gamma_i} B_ii^{1/2} and Pi = prod P_i.
struct ScalingData {
    long double C = 1;
    std::vector<long double> P;
    long double Pi_product = 1;
};

inline ScalingData scaling_data(const GammaProfile& profile, const QuadraticForm& reduced,
                                long double box_constant) {
    if (profile.degenerate) throw DegenerateGamma("scaling data undefined for degenerate gamma");
    ScalingData out;
    out.C = box_constant;
    const int m = reduced.dim();
    out.P.resize(m);
    for (int i = 0; i < m; ++i) {
        out.P[i] = std::pow(box_constant, 1.0L / profile.gamma_i[i]) *
                   std::sqrt(reduced(i, i).convert_to<long double>());
        out.Pi_product *= out.P[i];
    }
    for (int i = 0; i + 1 < m; ++i)
        if (out.P[i] > out.P[i + 1] * (1 + 1e-15L)) throw QfError("internal: P_i not sorted");
    return out;
}

/// Default box constant: 4 * (Gershgorin eigenvalue upper bound of A) /
/// (smallest leading-minor ratio of A).  A knob, not a canonical value; it
/// only affects scaling reports, never counts or densities.
inline long double default_box_constant(const QuadraticForm& a) {
    const int n = a.dim();
    Int row_max = 0;
    for (int i = 0; i < n; ++i) {
        Int s = 0;
        for (int j = 0; j < n; ++j) s += abs(a(i, j));
        if (s > row_max) row_max = s;
    }
    const auto& minors = a.leading_minors();
    Rat min_ratio(minors[0]);
    for (int k = 1; k < n; ++k) {
        Rat r = Rat(minors[k]) / Rat(minors[k - 1]);
        if (r < min_ratio) min_ratio = r;
    }
    long double c = 4.0L * row_max.convert_to<long double>() /
                    min_ratio.convert_to<long double>();
    return c > 2.0L ? c : 2.0L;
}

}  // namespace qfrep
