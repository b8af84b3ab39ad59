#include <catch_amalgamated.hpp>

#include <qfrep/forms.hpp>
#include <qfrep/gamma.hpp>
#include <qfrep/reduction.hpp>

#include "test_util.hpp"

using namespace qfrep;

TEST_CASE("validate accepts positive definite symmetric matrices") {
    QuadraticForm f = QuadraticForm::validate({{2, 1}, {1, 2}});
    CHECK(f.determinant() == 3);
    QuadraticForm id5 = identity_form(5);
    CHECK(id5.determinant() == 1);
}

TEST_CASE("validate rejects asymmetric and indefinite input") {
    CHECK_THROWS_AS(QuadraticForm::validate({{1, 2}, {3, 1}}), NotSymmetric);
    try {
        QuadraticForm::validate({{1, 2}, {2, 1}});
        FAIL("expected NotPositiveDefinite");
    } catch (const NotPositiveDefinite& e) {
        CHECK(e.minor_index == 2);  // second minor is -3
    }
    CHECK_THROWS_AS(QuadraticForm::validate({{0, 0}, {0, 1}}), NotPositiveDefinite);
}

TEST_CASE("determinant examples") {
    CHECK(identity_form(4).determinant() == 1);
    CHECK(QuadraticForm::validate({{2, 1}, {1, 2}}).determinant() == 3);
    CHECK(QuadraticForm::validate({{5, 1}, {1, 5}}).determinant() == 24);
}

namespace {
// brute-force first minimum over a small coordinate box
Int brute_min(const QuadraticForm& f, int box) {
    const int n = f.dim();
    std::vector<Int> x(n, -box);
    Int best = 0;
    while (true) {
        bool zero = true;
        for (const Int& v : x)
            if (v != 0) zero = false;
        if (!zero) {
            Int q = f.evaluate(x);
            if (best == 0 || q < best) best = q;
        }
        int i = 0;
        while (i < n && x[i] == box) {
            x[i] = -box;
            ++i;
        }
        if (i == n) break;
        ++x[i];
    }
    return best;
}
}  // namespace

TEST_CASE("first minimum") {
    CHECK(first_minimum(identity_form(5)) == 1);
    QuadraticForm f = QuadraticForm::validate({{2, 1}, {1, 2}});
    CHECK(first_minimum(f) == 2);
    CHECK(first_minimum(f) == brute_min(f, 2));
    CHECK(first_minimum(QuadraticForm::validate({{5, 0}, {0, 1}})) == 1);
}

TEST_CASE("minkowski reduction examples") {
    SECTION("diagonal swap") {
        auto r = minkowski_reduce(QuadraticForm::validate({{5, 0}, {0, 1}}));
        CHECK(r.reduced.gram() == IntMat{{1, 0}, {0, 5}});
        CHECK(r.transform == IntMat{{0, 1}, {1, 0}});
    }
    SECTION("already reduced stays put") {
        auto r = minkowski_reduce(QuadraticForm::validate({{2, 1}, {1, 2}}));
        CHECK(r.reduced.gram() == IntMat{{2, 1}, {1, 2}});
        CHECK(r.transform == IntMat::identity(2));
    }
    SECTION("Lagrange step") {
        auto r = minkowski_reduce(QuadraticForm::validate({{1, 1}, {1, 2}}));
        CHECK(r.reduced.gram() == IntMat::identity(2));
        CHECK(r.transform == IntMat{{1, -1}, {0, 1}});
    }
    SECTION("dimension limit") {
        CHECK_THROWS_AS(minkowski_reduce(identity_form(4)), UnsupportedDimension);
    }
}

TEST_CASE("reduction invariants on random forms") {
    testutil::Rng rng(20240901);
    for (int iter = 0; iter < 60; ++iter) {
        int m = testutil::uniform_int(rng, 1, 3);
        QuadraticForm b = testutil::random_gram_form(rng, m, 3);
        auto r = minkowski_reduce(b);
        // transform identity and determinant preservation
        CHECK(r.transform.transpose() * b.gram() * r.transform == r.reduced.gram());
        CHECK(r.reduced.determinant() == b.determinant());
        Int dt = bareiss_det(r.transform, m);
        CHECK((dt == 1 || dt == -1));
        // displayed reduction conditions
        for (int i = 0; i + 1 < m; ++i) CHECK(r.reduced(i, i) <= r.reduced(i + 1, i + 1));
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) CHECK(abs(r.reduced(i, j)) <= r.reduced(i, i));
        // min B = B_11
        CHECK(first_minimum(r.reduced) == r.reduced(0, 0));
        // reduced determinant comparison: det B <= prod B_ii <= K_m det B
        Int prod = 1;
        for (int i = 0; i < m; ++i) prod *= r.reduced(i, i);
        CHECK(prod >= r.reduced.determinant());
        Int km = m == 3 ? 4 : 2;
        CHECK(prod <= km * r.reduced.determinant());
    }
}

TEST_CASE("gamma profile examples") {
    SECTION("diag(4,16)") {
        auto g = gamma_profile(QuadraticForm::validate({{4, 0}, {0, 16}}));
        CHECK_FALSE(g.degenerate);
        CHECK(g.gamma_i[0] == 1.0L);
        CHECK(std::fabs((double)(g.gamma_i[1] - 0.5L)) < 1e-15);
        CHECK(std::fabs((double)(g.gamma - 3.0L)) < 1e-14);
    }
    SECTION("equal diagonal") {
        for (int k : {2, 3, 7}) {
            auto g = gamma_profile(diagonal_form({Int(k), Int(k)}));
            CHECK(g.gamma_i == std::vector<long double>{1.0L, 1.0L});
            CHECK(g.gamma == 2.0L);
        }
    }
    SECTION("degenerate") {
        auto g = gamma_profile(QuadraticForm::validate({{1, 0}, {0, 7}}));
        CHECK(g.degenerate);
        CHECK(std::isinf((double)g.gamma));
    }
    SECTION("all ones") {
        auto g = gamma_profile(identity_form(3));
        CHECK_FALSE(g.degenerate);
        CHECK(g.gamma == 3.0L);
    }
    SECTION("rejects unreduced input") {
        CHECK_THROWS_AS(gamma_profile(QuadraticForm::validate({{7, 0}, {0, 1}})), NotReduced);
    }
}

TEST_CASE("gamma monotone on random reduced forms") {
    testutil::Rng rng(77);
    for (int iter = 0; iter < 40; ++iter) {
        int m = testutil::uniform_int(rng, 2, 3);
        auto r = minkowski_reduce(testutil::random_gram_form(rng, m, 3));
        auto g = gamma_profile(r.reduced);
        if (g.degenerate) continue;
        CHECK(g.gamma_i[0] == 1.0L);
        for (int i = 0; i + 1 < m; ++i) CHECK(g.gamma_i[i] >= g.gamma_i[i + 1] - 1e-15L);
    }
}

TEST_CASE("theorem threshold") {
    GammaProfile g1;
    g1.gamma_i = {1.0L};
    g1.gamma = 1.0L;
    auto t1 = theorem_threshold(g1, 1);
    CHECK(t1.n_min == 5);
    CHECK(t1.R == 1);

    GammaProfile g2;
    g2.gamma_i = {1.0L, 1.0L};
    g2.gamma = 2.0L;
    auto t2 = theorem_threshold(g2, 2);
    CHECK(t2.n_min == 25);
    CHECK(t2.R == 3);

    auto g3 = gamma_profile(QuadraticForm::validate({{4, 0}, {0, 16}}));
    auto t3 = theorem_threshold(g3, 2);
    CHECK(t3.n_min == 33);

    GammaProfile bad;
    bad.degenerate = true;
    CHECK_THROWS_AS(theorem_threshold(bad, 2), DegenerateGamma);

    // monotone nondecreasing in gamma
    long long prev = 0;
    for (double gv = 1.0; gv < 6.0; gv += 0.13) {
        GammaProfile g;
        g.gamma = gv;
        auto t = theorem_threshold(g, 2);
        CHECK(t.n_min >= prev);
        prev = t.n_min;
    }
}

TEST_CASE("scaling data") {
    auto b = QuadraticForm::validate({{4, 0}, {0, 16}});
    auto g = gamma_profile(b);
    SECTION("C = 1") {
        auto s = scaling_data(g, b, 1.0L);
        CHECK(std::fabs((double)(s.P[0] - 2.0L)) < 1e-12);
        CHECK(std::fabs((double)(s.P[1] - 4.0L)) < 1e-12);
        CHECK(std::fabs((double)(s.Pi_product - 8.0L)) < 1e-12);
    }
    SECTION("C = 4") {
        auto s = scaling_data(g, b, 4.0L);
        CHECK(std::fabs((double)(s.P[0] - 8.0L)) < 1e-11);
        CHECK(std::fabs((double)(s.P[1] - 64.0L)) < 1e-10);
    }
    SECTION("identity form, C = 4") {
        // gamma_i = 1 for an all-ones diagonal, so P_i = C^{1/1} * 1 = C
        auto id = identity_form(3);
        auto gi = gamma_profile(id);
        auto s = scaling_data(gi, id, 4.0L);
        for (int i = 0; i < 3; ++i) CHECK(std::fabs((double)(s.P[i] - 4.0L)) < 1e-12);
    }
    SECTION("degenerate profile refuses") {
        auto gd = gamma_profile(QuadraticForm::validate({{1, 0}, {0, 7}}));
        CHECK_THROWS_AS(scaling_data(gd, b, 2.0L), DegenerateGamma);
    }
}

TEST_CASE("default box constant is at least 2 and finite") {
    testutil::Rng rng(5);
    for (int iter = 0; iter < 10; ++iter) {
        auto a = testutil::random_pd_form(rng, testutil::uniform_int(rng, 2, 5), 4);
        long double c = default_box_constant(a);
        CHECK(c >= 2.0L);
        CHECK(std::isfinite((double)c));
    }
}
