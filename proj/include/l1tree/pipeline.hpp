#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "l1tree/data.hpp"
#include "l1tree/eval.hpp"
#include "l1tree/l1lr.hpp"
#include "l1tree/tree.hpp"

namespace l1tree {

enum class MethodKind { L1lrMin, L1lr1se, TreeMethod, Prune, L1lrTree };

std::string method_name(MethodKind kind);
MethodKind parse_method(const std::string& name);

struct MethodSpec {
    MethodKind kind = MethodKind::L1lrTree;
    std::uint64_t seed = 0;
    int n_lambda = 100;
    double lambda_eps = 1e-3;
    FitOptions fit_options;
    GrowParams grow_params;
    int folds = 0;  // 0: floor(n/10), clamped to >= 2
};

int effective_fold_count(const MethodSpec& spec, int n);

struct FittedModel {
    MethodKind kind = MethodKind::L1lrTree;
    std::optional<RegularizedLogisticModel> linear;  // l1lr kinds; stage 1 of l1lr_tree
    std::optional<Tree> tree;                        // tree kinds; stage 2 of l1lr_tree
    std::optional<CvCurve> cv_curve;
    std::optional<double> alpha_star;
    std::vector<std::string> feature_subset;  // features handed to the final learner
    bool constant_fallback = false;           // empty stage-1 selection
    double constant_prob = 0.0;

    std::vector<std::string> selected() const;
    double predict_row(const Dataset& ds, int row) const;
};

// Fits one method on the full dataset. l1lr kinds run on the complete
// features with lambda chosen by stratified K-fold CV; prune optimizes alpha
// the same way; l1lr_tree grows an unpruned tree on the lambda_1se
// selection, falling back to a flagged constant model when nothing is
// selected.
FittedModel fit_method(const Dataset& ds, const MethodSpec& spec);

struct LooResult {
    std::vector<double> yhat;                            // held-out probabilities
    std::vector<std::vector<std::string>> selected_per_row;
    std::vector<std::uint64_t> train_hash;               // hash of each replicate's row indices
    std::vector<std::uint8_t> constant_fallback;
    MethodSpec spec;
    std::string fingerprint;
    std::vector<std::string> feature_names;
    int n = 0;
};

// Leave-one-out: refits the whole method (hyperparameter selection
// included) on each n-1 subset with K = floor((n-1)/10). Replicates are
// pure and may run on `jobs` threads; results are identical for any jobs.
LooResult loo_evaluate(const Dataset& ds, const MethodSpec& spec, int jobs = 1);

struct StabilityTable {
    std::vector<std::pair<std::string, int>> counts;  // every feature, dataset order
    int n_models = 0;

    int count_at_least(int threshold) const;
};

StabilityTable stability(const LooResult& loo);

struct MethodReport {
    MethodSpec spec;
    LooResult loo;
    ConfusionCounts confusion_counts;
    ScoreBlock score_block;
    StabilityTable stability_table;
    FittedModel full_fit;
};

struct ComparisonReport {
    std::string fingerprint;
    int n = 0;
    int positives = 0;
    DecisionConfig decision;
    double null_p = 0.5;
    std::vector<MethodReport> methods;
};

ComparisonReport compare_methods(const Dataset& ds, const std::vector<MethodSpec>& specs,
                                 const DecisionConfig& decision, int jobs = 1,
                                 double null_p = 0.5);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace l1tree
