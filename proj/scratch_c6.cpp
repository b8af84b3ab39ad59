// scratch: main-theorem desk-scale check for I_8, B = (N)
#include <qfrep/count.hpp>
#include <qfrep/local.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>

using namespace qfrep;

static long long jacobi_r8(long long n) {  // 16 (-1)^n sum_{d|n} (-1)^d d^3
    long long s = 0;
    for (long long d = 1; d <= n; ++d)
        if (n % d == 0) s += ((d % 2) ? -1 : 1) * d * d * d;
    if (n % 2) s = -s;
    return 16 * s;
}

int main() {
    QuadraticForm A = identity_form(8);
    AlphaOptions opt;
    opt.t_cap = 18;
    double prev_rel = 1e9;
    for (long long N : {64, 100, 144, 196}) {
        auto t0 = std::chrono::steady_clock::now();
        QuadraticForm B = diagonal_form({N});
        auto cnt = count_representations({A, B}, 4);
        double ms_count =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        printf("N=%lld exact=%s jacobi=%lld (%.0f ms, %llu nodes)\n", N, cnt.count.str().c_str(),
               jacobi_r8(N), ms_count, cnt.nodes_visited);

        t0 = std::chrono::steady_clock::now();
        double euler = 1;
        for (Int p = 2; p <= 100; ++p) {
            if (!is_prime(p)) continue;
            LocalDensity d = alpha_p(A, B, p, opt);
            euler *= d.value.convert_to<double>();
            if (p <= 7)
                printf("  alpha_%s = %s/%s (t=%d)\n", p.str().c_str(),
                       numerator(d.value).str().c_str(), denominator(d.value).str().c_str(),
                       d.t_used);
        }
        double ms_alpha =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        double alpha_inf = std::pow((double)N, 3.0) * std::pow(M_PI, 4.0) / 6.0;
        double main = alpha_inf * euler;
        double exact = cnt.count.convert_to<double>();
        double rel = std::fabs(exact - main) / main;
        printf("  alpha_inf=%.4f euler=%.8f main=%.2f rel=%.5f (alpha time %.0f ms) %s\n",
               alpha_inf, euler, main, rel, ms_alpha, rel < prev_rel ? "DECREASING" : "NOT-DECR");
        prev_rel = rel;
    }
    return 0;
}
