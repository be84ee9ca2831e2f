#include <doctest.h>

#include <cmath>

#include "l1tree/data.hpp"
#include "support/builders.hpp"

using namespace l1tree;
using testutil::categorical_column;
using testutil::make_dataset;
using testutil::numeric_column;

namespace {

const char* kSchemaText =
    "target outcome\n"
    "positive yes\n"
    "feature GB numeric\n"
    "feature Serology categorical\n";

bool datasets_equal(const Dataset& a, const Dataset& b) {
    if (a.n != b.n || a.target != b.target || a.columns.size() != b.columns.size()) return false;
    for (std::size_t c = 0; c < a.columns.size(); ++c) {
        const auto& x = a.columns[c];
        const auto& y = b.columns[c];
        if (x.name != y.name || x.kind != y.kind || x.missing != y.missing) return false;
        for (int i = 0; i < a.n; ++i) {
            if (x.is_missing(i)) continue;
            if (x.kind == FeatureKind::Numeric) {
                if (x.numeric[std::size_t(i)] != y.numeric[std::size_t(i)]) return false;
            } else {
                if (x.level(i) != y.level(i)) return false;
            }
        }
    }
    return true;
}

}  // namespace

TEST_CASE("load_csv parses a small cohort") {
    std::string csv =
        "GB,Serology,outcome\n"
        "7.5,Positive,yes\n"
        "3.25,Negative,no\n"
        "11,Positive,no\n"
        "4,Negative,yes\n";
    Dataset ds = parse_csv(csv, Schema::parse(kSchemaText));
    CHECK(ds.n == 4);
    CHECK(ds.columns.size() == 2);
    CHECK(ds.columns[0].kind == FeatureKind::Numeric);
    CHECK(ds.columns[0].numeric[1] == 3.25);
    CHECK(ds.columns[1].vocabulary == std::vector<std::string>{"Positive", "Negative"});
    CHECK(ds.target == std::vector<int>{1, 0, 0, 1});
}

TEST_CASE("load_csv maps empty cells and NA to missing") {
    std::string csv =
        "GB,Serology,outcome\n"
        ",Positive,yes\n"
        "NA,Negative,no\n"
        "5,Positive,no\n";
    Dataset ds = parse_csv(csv, Schema::parse(kSchemaText));
    CHECK(ds.columns[0].is_missing(0));
    CHECK(ds.columns[0].is_missing(1));
    CHECK_FALSE(ds.columns[0].is_missing(2));
}

TEST_CASE("load_csv rejects non-binary targets") {
    std::string csv =
        "GB,Serology,outcome\n"
        "1,Positive,yes\n"
        "2,Negative,no\n"
        "3,Positive,maybe\n";
    CHECK_THROWS_WITH_AS(parse_csv(csv, Schema::parse(kSchemaText)),
                         doctest::Contains("non-binary target"), DataError);
}

TEST_CASE("load_csv errors name the offending column") {
    std::string csv = "GB,outcome\n1,yes\n2,no\n";
    CHECK_THROWS_WITH_AS(parse_csv(csv, Schema::parse(kSchemaText)),
                         doctest::Contains("Serology"), DataError);
}

TEST_CASE("load_csv enforces the categorical level cap") {
    std::string schema_text =
        "target outcome\npositive yes\nmax_levels 3\nfeature Serology categorical\n";
    std::string csv = "Serology,outcome\nA,yes\nB,no\nC,yes\nD,no\n";
    CHECK_THROWS_WITH_AS(parse_csv(csv, Schema::parse(schema_text)), doctest::Contains("levels"),
                         DataError);
}

TEST_CASE("canonical CSV round-trips datasets exactly") {
    Rng rng(2024);
    for (int rep = 0; rep < 20; ++rep) {
        Dataset ds = testutil::random_dataset(rng, 30, 3, 2, rep % 2 ? 0.2 : 0.0);
        Schema schema;
        schema.target_name = "target";
        schema.positive_label = "1";
        for (const auto& col : ds.columns) schema.features.push_back({col.name, col.kind});
        Dataset back = parse_csv(ds.canonical_csv(), schema);
        CHECK(datasets_equal(ds, back));
        CHECK(back.fingerprint() == ds.fingerprint());
    }
}

TEST_CASE("complete_features keeps only fully observed columns") {
    SUBCASE("transcriptomic-style block of 12 incomplete columns among 29") {
        std::vector<FeatureColumn> cols;
        for (int f = 0; f < 29; ++f) {
            std::vector<double> v(40, 1.0 * f);
            v[5] = 2.0;
            std::vector<int> miss = f >= 17 ? std::vector<int>{3} : std::vector<int>{};
            cols.push_back(numeric_column("f" + std::to_string(f), v, miss));
        }
        std::vector<int> y(40, 0);
        for (int i = 0; i < 20; ++i) y[std::size_t(i)] = 1;
        Dataset ds = make_dataset(cols, y);
        auto names = complete_features(ds);
        CHECK(names.size() == 17);
        CHECK(names.front() == "f0");
        CHECK(names.back() == "f16");
    }
    SUBCASE("no missing values selects everything, order preserved") {
        Dataset ds = make_dataset({numeric_column("a", {1, 2}), numeric_column("b", {3, 4})},
                                  {0, 1});
        CHECK(complete_features(ds) == std::vector<std::string>{"a", "b"});
    }
    SUBCASE("every column incomplete gives an empty list") {
        Dataset ds = make_dataset(
            {numeric_column("a", {1, 2}, {0}), numeric_column("b", {3, 4}, {1})}, {0, 1});
        CHECK(complete_features(ds).empty());
    }
}

TEST_CASE("default_fold_count follows floor(n/10)") {
    CHECK(default_fold_count(353) == 35);
    CHECK(default_fold_count(151) == 15);
    CHECK(default_fold_count(20) == 2);
    CHECK_THROWS_WITH_AS(default_fold_count(19), doctest::Contains("too small"), DataError);
}

TEST_CASE("stratified_folds balances classes") {
    SUBCASE("exact divisibility gives 2+2 per fold") {
        std::vector<int> y;
        std::vector<double> x;
        for (int i = 0; i < 20; ++i) {
            y.push_back(i < 10 ? 1 : 0);
            x.push_back(double(i));
        }
        Dataset ds = make_dataset({numeric_column("x", x)}, y);
        FoldAssignment fa = stratified_folds(ds, 5, 7);
        std::vector<int> pos(5, 0), neg(5, 0);
        for (int i = 0; i < 20; ++i)
            (y[std::size_t(i)] ? pos : neg)[std::size_t(fa.fold_of_row[std::size_t(i)])] += 1;
        for (int f = 0; f < 5; ++f) {
            CHECK(pos[std::size_t(f)] == 2);
            CHECK(neg[std::size_t(f)] == 2);
        }
    }
    SUBCASE("deterministic for a fixed seed") {
        Rng rng(5);
        Dataset ds = testutil::random_dataset(rng, 57, 2, 0);
        FoldAssignment a = stratified_folds(ds, 5, 99);
        FoldAssignment b = stratified_folds(ds, 5, 99);
        CHECK(a.fold_of_row == b.fold_of_row);
        FoldAssignment c = stratified_folds(ds, 5, 100);
        CHECK(a.fold_of_row != c.fold_of_row);
    }
    SUBCASE("353-row cohort at K=35 meets the proportion bound") {
        std::vector<int> y;
        std::vector<double> x;
        for (int i = 0; i < 353; ++i) {
            y.push_back(i < 151 ? 1 : 0);
            x.push_back(double(i % 17));
        }
        Dataset ds = make_dataset({numeric_column("x", x)}, y);
        FoldAssignment fa = stratified_folds(ds, 35, 11);
        double global = 151.0 / 353.0;
        std::vector<int> size(35, 0), pos(35, 0);
        for (int i = 0; i < 353; ++i) {
            int f = fa.fold_of_row[std::size_t(i)];
            size[std::size_t(f)] += 1;
            pos[std::size_t(f)] += y[std::size_t(i)];
        }
        int total = 0;
        for (int f = 0; f < 35; ++f) {
            total += size[std::size_t(f)];
            REQUIRE(size[std::size_t(f)] > 0);
            double prop = double(pos[std::size_t(f)]) / double(size[std::size_t(f)]);
            CHECK(std::fabs(prop - global) <= 1.0 / double(size[std::size_t(f)]));
        }
        CHECK(total == 353);  // partition
    }
    SUBCASE("fold sizes differ by at most one per class") {
        Rng rng(17);
        for (int rep = 0; rep < 10; ++rep) {
            Dataset ds = testutil::random_dataset(rng, 40 + int(rng.below(60)), 2, 1);
            int minority = std::min(ds.positives(), ds.n - ds.positives());
            int k = 2 + int(rng.below(std::uint64_t(std::max(1, minority - 1))));
            FoldAssignment fa = stratified_folds(ds, k, rep);
            std::vector<std::vector<int>> counts(2, std::vector<int>(std::size_t(k), 0));
            for (int i = 0; i < ds.n; ++i)
                counts[std::size_t(ds.target[std::size_t(i)])]
                      [std::size_t(fa.fold_of_row[std::size_t(i)])] += 1;
            for (int cls = 0; cls < 2; ++cls) {
                auto [mn, mx] = std::minmax_element(counts[std::size_t(cls)].begin(),
                                                    counts[std::size_t(cls)].end());
                CHECK(*mx - *mn <= 1);
            }
        }
    }
    SUBCASE("K above the minority class size is rejected") {
        std::vector<int> y(30, 0);
        std::vector<double> x(30, 0.0);
        for (int i = 0; i < 4; ++i) y[std::size_t(i)] = 1;
        for (int i = 0; i < 30; ++i) x[std::size_t(i)] = double(i);
        Dataset ds = make_dataset({numeric_column("x", x)}, y);
        CHECK_THROWS_AS(stratified_folds(ds, 5, 1), DataError);
        CHECK_NOTHROW(stratified_folds(ds, 4, 1));
    }
}

TEST_CASE("build_design encodes and standardizes") {
    Dataset ds = make_dataset(
        {numeric_column("age", {10, 20, 30, 40}),
         categorical_column("sex", {"M", "F"}, {0, 1, 0, 1})},
        {0, 1, 0, 1});

    SUBCASE("one-hot uses one column per level") {
        DesignMatrix dm = build_design(ds, {"age", "sex"}, false);
        REQUIRE(dm.q == 3);
        CHECK(dm.column_map[0].label() == "age");
        CHECK(dm.column_map[1].label() == "sex=M");
        CHECK(dm.column_map[2].label() == "sex=F");
        CHECK(dm.raw(2, 0) == 30.0);
        CHECK(dm.raw(2, 1) == 1.0);
        CHECK(dm.raw(1, 2) == 1.0);
    }
    SUBCASE("standardized columns have mean 0 and sd 1 within 1e-10") {
        DesignMatrix dm = build_design(ds, {"age", "sex"}, true);
        for (int j = 0; j < dm.q; ++j) {
            auto col = dm.col(j);
            double mean = 0.0;
            for (double v : col) mean += v;
            mean /= double(dm.n);
            double var = 0.0;
            for (double v : col) var += (v - mean) * (v - mean);
            var /= double(dm.n);
            CHECK(std::fabs(mean) < 1e-10);
            CHECK(std::fabs(std::sqrt(var) - 1.0) < 1e-10);
        }
    }
    SUBCASE("constant columns are dropped and recorded") {
        Dataset ds2 = make_dataset(
            {numeric_column("flat", {5, 5, 5, 5}), numeric_column("x", {1, 2, 3, 4})},
            {0, 1, 0, 1});
        DesignMatrix dm = build_design(ds2, {"flat", "x"}, true);
        CHECK(dm.q == 1);
        REQUIRE(dm.dropped.size() == 1);
        CHECK(dm.dropped[0] == "flat");
    }
    SUBCASE("missing values are rejected") {
        Dataset ds2 = make_dataset({numeric_column("a", {1, 2, 3, 4}, {2})}, {0, 1, 0, 1});
        CHECK_THROWS_AS(build_design(ds2, {"a"}, true), DataError);
    }
}

TEST_CASE("design built over complete features never contains missingness") {
    Rng rng(31);
    for (int rep = 0; rep < 15; ++rep) {
        Dataset ds = testutil::random_dataset(rng, 25, 3, 2, 0.3);
        auto feats = complete_features(ds);
        if (feats.empty()) continue;
        DesignMatrix dm = build_design(ds, feats, true);
        for (double v : dm.values) CHECK(std::isfinite(v));
    }
}

TEST_CASE("subset recomputes categorical vocabularies") {
    Dataset ds = make_dataset({categorical_column("c", {"A", "B", "C"}, {0, 1, 2, 0})},
                              {0, 1, 0, 1});
    Dataset sub = ds.subset({0, 1, 3});
    CHECK(sub.columns[0].vocabulary == std::vector<std::string>{"A", "B"});
    CHECK(sub.columns[0].level(0) == "A");
    CHECK(sub.columns[0].level(1) == "B");
    CHECK(sub.columns[0].level(2) == "A");
}
