#pragma once

#include <string>
#include <vector>

#include "l1tree/eval.hpp"
#include "l1tree/tree.hpp"

namespace l1tree {

// One conjunct of a rule. Numeric conditions are half-open intervals
// (lo, hi] matching the tree convention (left child <= t, right child > t);
// categorical conditions are level sets over the growth-time vocabulary.
struct Condition {
    enum class Form { Interval, InLevels, MissingRouted };
    Form form = Form::Interval;
    std::string feature;
    int universe_index = -1;
    double lo = 0.0, hi = 0.0;  // interval bounds, +-inf allowed
    std::vector<std::string> levels;
    std::string note;  // MissingRouted annotation text

    std::string describe() const;
};

struct Rule {
    std::vector<Condition> conditions;  // one canonical conjunct per feature
    int predicted_class = 0;
    double leaf_prob = 0.0;
    int support = 0;
};

// Mutually exclusive, exhaustive rules over complete feature vectors.
struct RuleSet {
    std::vector<Rule> rules;
    double threshold = 0.5;
    std::vector<FeatureInfo> universe;
};

// Merges per-feature conjuncts into single intervals / level sets, ordered
// by universe position. Idempotent.
std::vector<Condition> canonicalize_conditions(std::vector<Condition> conditions);

// One rule per leaf; conditions are the canonicalized path conjunctions and
// the class comes from classify(leaf_prob, cfg). Rules are sorted by their
// leading condition (feature, then bounds).
RuleSet rules_from_tree(const Tree& tree, const DecisionConfig& cfg);

bool rule_matches(const Rule& rule, std::span<const CellValue> cells);

struct RuleValidationReport {
    int rows_checked = 0;
    int rows_skipped_missing = 0;
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

// Checks that every complete row matches exactly one rule and that the rule
// reproduces the tree's prediction. Rows with missing universe values are
// skipped and counted.
RuleValidationReport validate(const RuleSet& rs, const Tree& tree, const Dataset& ds);

// Markdown two-column table (class 0 conjunctions vs class 1 conjunctions).
std::string render(const RuleSet& rs, const std::string& class0_label = "Class 0",
                   const std::string& class1_label = "Class 1");

}  // namespace l1tree
