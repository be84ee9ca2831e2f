#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "l1tree/common.hpp"

namespace l1tree {

enum class FeatureKind { Numeric, Categorical };

// One feature of the cohort. Numeric columns use `numeric`, categorical
// columns store level codes into `vocabulary` (observed order). Entries at
// rows where `missing[i] != 0` are unspecified.
struct FeatureColumn {
    std::string name;
    FeatureKind kind = FeatureKind::Numeric;
    std::vector<double> numeric;
    std::vector<int> codes;
    std::vector<std::string> vocabulary;
    std::vector<std::uint8_t> missing;

    int n() const { return int(missing.size()); }
    bool is_missing(int row) const { return missing[std::size_t(row)] != 0; }
    bool has_missing() const;
    const std::string& level(int row) const { return vocabulary[std::size_t(codes[std::size_t(row)])]; }
};

struct Dataset {
    std::vector<FeatureColumn> columns;
    std::vector<int> target;  // 0/1, never missing
    std::string target_name = "target";
    int n = 0;

    int column_index(const std::string& name) const;  // -1 when absent
    const FeatureColumn& column(const std::string& name) const;

    int positives() const;

    // New dataset holding the given rows (in the given order). Categorical
    // vocabularies are recomputed to the observed levels, preserving order.
    Dataset subset(const std::vector<int>& rows) const;
    Dataset without_row(int row) const;

    // Canonical CSV form: header, quoted cells where needed, numerics in
    // shortest round-trip form, missing as empty cells, target as 0/1.
    std::string canonical_csv() const;
    std::string fingerprint() const { return hex64(fnv1a(canonical_csv())); }

    void check_valid() const;  // throws DataError on invariant violations
};

// Feature-kind declarations plus target coding for CSV ingestion.
struct Schema {
    struct Entry {
        std::string name;
        FeatureKind kind;
    };
    std::vector<Entry> features;
    std::string target_name;
    std::string positive_label;
    std::vector<std::string> missing_tokens = {"", "NA"};
    int max_levels = 64;

    static Schema parse(const std::string& text);
    static Schema parse_file(const std::string& path);
    std::string to_text() const;
};

Dataset load_csv(const std::string& path, const Schema& schema);
Dataset parse_csv(const std::string& content, const Schema& schema);

// Column names with zero missing entries, dataset order.
std::vector<std::string> complete_features(const Dataset& ds);

// floor(n/10); the protocol needs n >= 20 so that K >= 2.
int default_fold_count(int n);

struct FoldAssignment {
    std::vector<int> fold_of_row;
    int k = 0;
    std::uint64_t seed = 0;
};

// Class-stratified assignment: within each class, rows are shuffled by a
// seeded permutation and dealt round-robin, so per-fold class counts differ
// from proportional by less than one row.
FoldAssignment stratified_folds(const Dataset& ds, int k, std::uint64_t seed);

struct DesignColumn {
    std::string feature;
    int feature_column = -1;                // index into Dataset::columns
    std::optional<std::string> level;       // set for one-hot columns
    std::string label() const { return level ? feature + "=" + *level : feature; }
};

// Dense column-major design matrix over complete features. Categorical
// features are one-hot encoded with one column per vocabulary level (the
// intercept absorbs the redundancy under L1 shrinkage). Zero-variance
// columns are dropped and recorded.
struct DesignMatrix {
    int n = 0;
    int q = 0;
    std::vector<double> values;             // column-major, n * q
    std::vector<DesignColumn> column_map;
    std::vector<double> means, sds;         // identity (0,1) when unstandardized
    std::vector<std::string> dropped;       // labels of dropped constant columns
    bool standardized = false;

    std::span<const double> col(int j) const {
        return {values.data() + std::size_t(j) * std::size_t(n), std::size_t(n)};
    }
    double raw(int i, int j) const {
        return values[std::size_t(j) * std::size_t(n) + std::size_t(i)] * sds[std::size_t(j)] +
               means[std::size_t(j)];
    }
};

DesignMatrix build_design(const Dataset& ds, const std::vector<std::string>& features,
                          bool standardize);

}  // namespace l1tree
