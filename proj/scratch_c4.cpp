// scratch: exact tail analysis for the singular series truncation
#include <qfrep/local.hpp>
#include <qfrep/local_count.hpp>

#include <cmath>
#include <cstdio>
#include <map>
#include <vector>

using namespace qfrep;

int main() {
    QuadraticForm A = identity_form(5);
    QuadraticForm B = diagonal_form({4});

    // prime power normalized counts c_r and the q-terms A_{p^r} = c_r - c_{r-1}
    std::map<long long, Rat> aq;  // q -> A_q for prime powers
    aq[1] = 1;
    for (long long p : {2, 3, 5, 7, 11, 13, 17, 19}) {
        LocalCounter lc(A, B, Int(p), {});
        Rat prev = 1;
        printf("p=%lld: ", p);
        for (int r = 1; (long long)std::pow((double)p, r) <= 64; ++r) {
            Rat cr = lc.normalized(r);
            long long q = 1;
            for (int i = 0; i < r; ++i) q *= p;
            aq[q] = cr - prev;
            printf("c_%d=%s/%s A=%s/%s  ", r, numerator(cr).str().c_str(),
                   denominator(cr).str().c_str(), numerator(aq[q]).str().c_str(),
                   denominator(aq[q]).str().c_str());
            prev = cr;
        }
        printf("\n");
    }

    // S(20) = sum over q <= 20 of multiplicative A_q
    auto a_of = [&](long long q) -> Rat {
        Rat prod = 1;
        for (long long p : {2, 3, 5, 7, 11, 13, 17, 19}) {
            if (q % p) continue;
            long long pr = 1;
            while (q % p == 0) {
                q /= p;
                pr *= p;
            }
            prod *= aq.at(pr);
        }
        return q == 1 ? prod : Rat(0);
    };
    Rat s20 = 0;
    for (long long q = 1; q <= 20; ++q) s20 += a_of(q);

    // Euler partial: product over p <= 20 of alpha_p
    AlphaOptions opt;
    opt.t_cap = 16;
    Rat euler = 1;
    for (long long p : {2, 3, 5, 7, 11, 13, 17, 19}) {
        LocalDensity d = alpha_p(A, B, Int(p), opt);
        printf("alpha_%lld = %s/%s (t=%d) = %.6f\n", p, numerator(d.value).str().c_str(),
               denominator(d.value).str().c_str(), d.t_used,
               d.value.convert_to<double>());
        euler *= d.value;
    }
    printf("S(20)  = %.10f\n", s20.convert_to<double>());
    printf("Euler  = %.10f\n", euler.convert_to<double>());
    double rel = std::fabs((s20 - euler).convert_to<double>()) / euler.convert_to<double>();
    printf("rel discrepancy = %.6f\n", rel);
    return 0;
}
