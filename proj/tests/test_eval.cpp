#include <doctest.h>

#include <cmath>

#include "l1tree/eval.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

using namespace l1tree;

TEST_CASE("classify assigns the boundary to class 0") {
    DecisionConfig cfg{0.4, ThresholdSource::Fixed};
    CHECK(classify(0.4, cfg) == 0);
    CHECK(classify(0.41, cfg) == 1);
    CHECK(classify(0.39, cfg) == 0);
    DecisionConfig visceral{0.79, ThresholdSource::Fixed};
    CHECK(classify(0.79, visceral) == 0);
    CHECK(classify(0.7900001, visceral) == 1);
}

TEST_CASE("classify flips exactly once along increasing p_hat") {
    DecisionConfig cfg{0.37, ThresholdSource::Fixed};
    int flips = 0;
    int prev = classify(0.0, cfg);
    for (int i = 1; i <= 1000; ++i) {
        int cur = classify(double(i) / 1000.0, cfg);
        CHECK(cur >= prev);
        if (cur != prev) ++flips;
        prev = cur;
    }
    CHECK(flips == 1);
}

TEST_CASE("proportion_threshold reproduces study thresholds") {
    auto cohort = [](int positives, int n) {
        std::vector<int> y(std::size_t(n), 0);
        std::vector<double> x(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            if (i < positives) y[std::size_t(i)] = 1;
            x[std::size_t(i)] = double(i);
        }
        return testutil::make_dataset({testutil::numeric_column("x", x)}, y);
    };
    CHECK(std::fabs(proportion_threshold(cohort(49, 343)).threshold - 0.15) <= 0.01);
    CHECK(std::fabs(proportion_threshold(cohort(271, 343)).threshold - 0.79) <= 0.01);
    CHECK(proportion_threshold(cohort(50, 100)).threshold == 0.5);
    CHECK(proportion_threshold(cohort(49, 343)).source == ThresholdSource::ClassProportion);
    CHECK_THROWS_AS(proportion_threshold(cohort(0, 10)), DataError);
}

TEST_CASE("confusion counts") {
    SUBCASE("all correct") {
        std::vector<int> d{1, 0, 1, 0}, t{1, 0, 1, 0};
        ConfusionCounts c = confusion(d, t);
        CHECK(c.tp == 2);
        CHECK(c.tn == 2);
        CHECK(c.fp == 0);
        CHECK(c.fn == 0);
    }
    SUBCASE("all inverted") {
        std::vector<int> d{0, 1, 0, 1}, t{1, 0, 1, 0};
        ConfusionCounts c = confusion(d, t);
        CHECK(c.tp == 0);
        CHECK(c.tn == 0);
        CHECK(c.fp == 2);
        CHECK(c.fn == 2);
    }
    SUBCASE("hand-tallied 10-row table") {
        std::vector<int> t{1, 1, 1, 1, 0, 0, 0, 0, 0, 0};
        std::vector<int> d{1, 1, 1, 0, 0, 0, 0, 0, 1, 1};
        ConfusionCounts c = confusion(d, t);
        CHECK(c.tp == 3);
        CHECK(c.fn == 1);
        CHECK(c.tn == 4);
        CHECK(c.fp == 2);
        CHECK(c.total() == 10);
    }
    SUBCASE("length mismatch") {
        std::vector<int> d{1}, t{1, 0};
        CHECK_THROWS_AS(confusion(d, t), DataError);
    }
}

TEST_CASE("scores") {
    SUBCASE("perfect classification") {
        ScoreBlock s = scores({5, 0, 7, 0});
        CHECK(s.recall == 1.0);
        CHECK(s.specificity == 1.0);
        CHECK(s.accuracy == 1.0);
    }
    SUBCASE("worked example") {
        ScoreBlock s = scores({3, 1, 8, 2});
        CHECK(s.recall == doctest::Approx(0.75));
        CHECK(s.specificity == doctest::Approx(0.8));
        CHECK(s.accuracy == doctest::Approx(0.775));
    }
    SUBCASE("accuracy is exactly the mean of recall and specificity") {
        Rng rng(3);
        for (int rep = 0; rep < 50; ++rep) {
            ConfusionCounts c{long(1 + rng.below(50)), long(rng.below(50)),
                              long(1 + rng.below(50)), long(rng.below(50))};
            ScoreBlock s = scores(c);
            CHECK(s.accuracy == (s.recall + s.specificity) / 2.0);
        }
    }
    SUBCASE("random coin flips on a balanced cohort sit near 0.5") {
        Rng rng(99);
        int n = 10000;
        std::vector<int> t(static_cast<std::size_t>(n)), d(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            t[std::size_t(i)] = i < n / 2 ? 1 : 0;
            d[std::size_t(i)] = rng.bernoulli(0.5) ? 1 : 0;
        }
        ScoreBlock s = scores(confusion(d, t));
        CHECK(std::fabs(s.accuracy - 0.5) < 0.02);
    }
    SUBCASE("relabeling swaps recall and specificity, accuracy unchanged") {
        ConfusionCounts c{13, 4, 22, 9};
        ConfusionCounts swapped{c.tn, c.fp, c.tp, c.fn};
        ScoreBlock a = scores(c), b = scores(swapped);
        CHECK(a.recall == b.specificity);
        CHECK(a.specificity == b.recall);
        CHECK(a.accuracy == b.accuracy);
    }
    SUBCASE("absent class is an error") {
        CHECK_THROWS_AS(scores({0, 0, 3, 1}), DataError);
    }
}

TEST_CASE("binomial significance") {
    SUBCASE("all successes out of 10") {
        auto [p, stars] = binomial_significance(10, 10, 0.5);
        CHECK(p == doctest::Approx(std::pow(2.0, -10)).epsilon(1e-12));
        CHECK(stars == "***");
    }
    SUBCASE("five of ten is not significant") {
        auto [p, stars] = binomial_significance(5, 10, 0.5);
        CHECK(p == doctest::Approx(0.623046875).epsilon(1e-9));
        CHECK(stars == "");
    }
    SUBCASE("zero successes gives p = 1") {
        auto [p, stars] = binomial_significance(0, 25, 0.5);
        CHECK(p == 1.0);
        CHECK(stars == "");
    }
    SUBCASE("matches the direct mass-summation oracle for all n <= 30") {
        for (int n = 1; n <= 30; ++n) {
            for (int k = 0; k <= n; ++k) {
                for (double p0 : {0.5, 0.3, 0.85}) {
                    auto [p, stars] = binomial_significance(k, n, p0);
                    double expected = oracle::binomial_upper_tail(k, n, p0);
                    CHECK(p == doctest::Approx(expected).epsilon(1e-10));
                }
            }
        }
    }
    SUBCASE("star cutoffs are non-strict") {
        // P(X >= 5 | n=5, p=0.5) = 2^-5 = 0.03125 -> *
        CHECK(binomial_significance(5, 5, 0.5).second == "*");
        // P(X >= 17 | n=20) ~ 0.00129 -> ** (just above 0.001)
        CHECK(binomial_significance(17, 20, 0.5).second == "**");
        // P(X >= 18 | n=20) ~ 0.000201 -> ***
        CHECK(binomial_significance(18, 20, 0.5).second == "***");
    }
}

TEST_CASE("scores_with_significance fills p-values and stars") {
    ScoreBlock s = scores_with_significance({9, 1, 2, 8}, 0.5);
    CHECK(s.recall_p == doctest::Approx(oracle::binomial_upper_tail(9, 10, 0.5)));
    CHECK(s.specificity_p == doctest::Approx(oracle::binomial_upper_tail(2, 10, 0.5)));
    CHECK(s.recall_stars == "*");  // 11/1024 ~ 0.0107
    CHECK(s.specificity_stars == "");
}
