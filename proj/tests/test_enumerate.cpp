#include <catch_amalgamated.hpp>

#include <qfrep/count.hpp>
#include <qfrep/lattice_enum.hpp>

#include "test_util.hpp"

#include <algorithm>
#include <set>

using namespace qfrep;

TEST_CASE("fraction-free LDL identity") {
    testutil::Rng rng(12);
    for (int iter = 0; iter < 30; ++iter) {
        int n = testutil::uniform_int(rng, 1, 6);
        QuadraticForm g = testutil::random_gram_form(rng, n, 3);
        FracFreeLDL ldl = fraction_free_ldl(g.gram());
        std::vector<Int> x(n);
        for (auto& v : x) v = testutil::uniform_int(rng, -5, 5);
        Rat q = 0;
        Int prev = 1;
        for (int k = 0; k < n; ++k) {
            Int y = ldl.delta[k] * x[k];
            for (int j = k + 1; j < n; ++j) y += ldl.m(k, j) * x[j];
            q += Rat(y * y) / Rat(ldl.delta[k] * prev);
            prev = ldl.delta[k];
        }
        CHECK(q == Rat(g.evaluate(x)));
    }
}

TEST_CASE("vectors_of_norm examples") {
    CHECK(vectors_of_norm(identity_form(4), 1).size() == 8);
    auto v12 = vectors_of_norm(identity_form(3), 2);
    CHECK(v12.size() == 12);  // signed permutations of (1,1,0)
    CHECK(vectors_of_norm(identity_form(3), 7).empty());
    // both signs present
    std::set<std::vector<Int>> vs(v12.begin(), v12.end());
    for (const auto& v : v12) {
        std::vector<Int> neg(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) neg[i] = -v[i];
        CHECK(vs.count(neg) == 1);
    }
}

TEST_CASE("count_representations examples") {
    auto cnt = [](const QuadraticForm& a, const QuadraticForm& b) {
        return count_representations({a, b}).count;
    };
    CHECK(cnt(identity_form(4), diagonal_form({4})) == 24);
    CHECK(cnt(identity_form(2), identity_form(2)) == 8);
    CHECK(cnt(identity_form(3), diagonal_form({7})) == 0);
}

TEST_CASE("brute force oracle examples") {
    CHECK(brute_force_count({identity_form(2), diagonal_form({5})}).count == 8);
    CHECK(brute_force_count({identity_form(4), diagonal_form({1})}).count == 8);
    CHECK(brute_force_count({QuadraticForm::validate({{2, 1}, {1, 2}}), diagonal_form({2})}).count ==
          6);
    CHECK_THROWS_AS(brute_force_count({identity_form(4), diagonal_form({100})}, Int(1000)),
                    OracleTooLarge);
}

TEST_CASE("degenerate query m > n returns zero") {
    CHECK(count_representations({identity_form(2), identity_form(3)}).count == 0);
}

TEST_CASE("oracle equivalence on a randomized corpus") {
    testutil::Rng rng(31337);
    int done = 0;
    while (done < 40) {
        int m = testutil::uniform_int(rng, 1, 2);
        int n = testutil::uniform_int(rng, 2, 5);
        if (m > n) continue;
        QuadraticForm a =
            testutil::uniform_int(rng, 0, 1) ? identity_form(n) : testutil::random_pd_form(rng, n, 2);
        IntMat bm(m, m);
        if (m == 1) {
            bm(0, 0) = testutil::uniform_int(rng, 1, 12);
        } else {
            bm(0, 0) = testutil::uniform_int(rng, 1, 8);
            bm(1, 1) = testutil::uniform_int(rng, (int)bm(0, 0).convert_to<long long>(), 12);
            int off = testutil::uniform_int(rng, -2, 2);
            bm(0, 1) = off;
            bm(1, 0) = off;
        }
        QuadraticForm b = [&]() -> QuadraticForm {
            try {
                return QuadraticForm::validate(bm);
            } catch (const NotPositiveDefinite&) {
                return identity_form(m);
            }
        }();
        RepresentationProblem prob{a, b};
        Int fast = count_representations(prob).count;
        Int slow;
        try {
            slow = brute_force_count(prob, Int(3000000)).count;
        } catch (const OracleTooLarge&) {
            continue;
        }
        CHECK(fast == slow);
        ++done;
    }
}

TEST_CASE("unimodular invariance in both arguments") {
    testutil::Rng rng(99);
    QuadraticForm a = identity_form(3);
    QuadraticForm b = QuadraticForm::validate({{2, 1}, {1, 2}});
    Int base = count_representations({a, b}).count;
    CHECK(base > 0);
    for (int iter = 0; iter < 8; ++iter) {
        IntMat u = testutil::random_unimodular(rng, 2, 6);
        QuadraticForm bu = QuadraticForm::validate(u.transpose() * b.gram() * u);
        CHECK(count_representations({a, bu}).count == base);
        IntMat v = testutil::random_unimodular(rng, 3, 6);
        QuadraticForm av = QuadraticForm::validate(v.transpose() * a.gram() * v);
        CHECK(count_representations({av, b}).count == base);
    }
}

TEST_CASE("sign symmetry for m = 1") {
    testutil::Rng rng(7);
    for (int iter = 0; iter < 15; ++iter) {
        int n = testutil::uniform_int(rng, 2, 4);
        QuadraticForm a = testutil::random_pd_form(rng, n, 2);
        Int t = testutil::uniform_int(rng, 1, 10);
        auto c = count_representations({a, diagonal_form({t})});
        CHECK(c.count % 2 == 0);  // x <-> -x pairing (x = 0 impossible for t >= 1)
        CHECK(c.count == Int(vectors_of_norm(a, t).size()));
    }
}

TEST_CASE("column order consistency") {
    QuadraticForm a = identity_form(4);
    QuadraticForm b = QuadraticForm::validate({{2, 1}, {1, 4}});
    Int base = count_representations({a, b}).count;
    IntMat p{{0, 1}, {1, 0}};
    QuadraticForm bp = QuadraticForm::validate(p.transpose() * b.gram() * p);
    CHECK(count_representations({a, bp}).count == base);
}

TEST_CASE("determinism across thread counts") {
    QuadraticForm a = identity_form(5);
    QuadraticForm b1 = diagonal_form({30});
    Int c1 = count_representations({a, b1}, 1).count;
    CHECK(count_representations({a, b1}, 2).count == c1);
    CHECK(count_representations({a, b1}, 4).count == c1);

    QuadraticForm b2 = identity_form(2);
    Int c2 = count_representations({a, b2}, 1).count;
    CHECK(count_representations({a, b2}, 3).count == c2);
}

TEST_CASE("congruent enumeration agrees with direct filtering") {
    // solutions of w^T G w = T with w == sigma (mod L), checked by scanning
    testutil::Rng rng(55);
    for (int iter = 0; iter < 10; ++iter) {
        int n = testutil::uniform_int(rng, 1, 3);
        QuadraticForm g = testutil::random_gram_form(rng, n, 2);
        EnumProblem p;
        p.G = g.gram();
        p.T = testutil::uniform_int(rng, 0, 40);
        p.L = testutil::uniform_int(rng, 1, 3);
        p.sigma.assign(n, 0);
        for (auto& s : p.sigma) s = testutil::uniform_int(rng, 0, 2);
        Int got = enumerate_norm_solutions(p).count;

        RatMat inv = inverse_rational(p.G);
        std::vector<Int> box(n);
        for (int i = 0; i < n; ++i) {
            Rat b = Rat(p.T) * inv(i, i);
            box[i] = isqrt(numerator(b) / denominator(b)) + 2;
        }
        Int want = 0;
        std::vector<Int> x(n);
        for (int i = 0; i < n; ++i) x[i] = -box[i];
        while (true) {
            bool ok = true;
            for (int i = 0; i < n; ++i)
                if ((x[i] - p.sigma[i]) % p.L != 0) ok = false;
            if (ok && g.evaluate(x) == p.T) ++want;
            int i = 0;
            while (i < n && x[i] == box[i]) {
                x[i] = -box[i];
                ++i;
            }
            if (i == n) break;
            ++x[i];
        }
        CHECK(got == want);
    }
}
