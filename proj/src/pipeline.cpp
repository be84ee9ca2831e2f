#include "l1tree/pipeline.hpp"

#include <algorithm>

#include "l1tree/parallel.hpp"

namespace l1tree {

std::string method_name(MethodKind kind) {
    switch (kind) {
        case MethodKind::L1lrMin: return "l1lr_min";
        case MethodKind::L1lr1se: return "l1lr_1se";
        case MethodKind::TreeMethod: return "tree";
        case MethodKind::Prune: return "prune";
        case MethodKind::L1lrTree: return "l1lr_tree";
    }
    return "?";
}

MethodKind parse_method(const std::string& name) {
    if (name == "l1lr_min") return MethodKind::L1lrMin;
    if (name == "l1lr_1se") return MethodKind::L1lr1se;
    if (name == "tree") return MethodKind::TreeMethod;
    if (name == "prune") return MethodKind::Prune;
    if (name == "l1lr_tree") return MethodKind::L1lrTree;
    throw ConfigError("unknown method: " + name +
                      " (expected l1lr_min, l1lr_1se, tree, prune or l1lr_tree)");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = stream;
    return seed ^ splitmix64(s);
}

int effective_fold_count(const MethodSpec& spec, int n) {
    if (spec.folds > 0) return spec.folds;
    return std::max(2, n / 10);
}

namespace {

constexpr std::uint64_t kFoldStream = 0x63762D666F6C6473ULL;  // "cv-folds"
constexpr std::uint64_t kLooStream = 0x6C6F6F2D72657000ULL;   // "loo-rep"

std::vector<std::string> all_feature_names(const Dataset& ds) {
    std::vector<std::string> names;
    names.reserve(ds.columns.size());
    for (const auto& col : ds.columns) names.push_back(col.name);
    return names;
}

struct LinearStage {
    RegularizedLogisticModel model;
    CvCurve curve;
};

LinearStage fit_l1lr_cv(const Dataset& ds, const MethodSpec& spec, bool one_se) {
    auto feats = complete_features(ds);
    if (feats.empty())
        throw DataError("l1lr: no complete features (every column has missing values)");
    DesignMatrix design = build_design(ds, feats, true);
    auto grid = lambda_grid(design, ds.target, spec.n_lambda, spec.lambda_eps);
    FoldAssignment folds =
        stratified_folds(ds, effective_fold_count(spec, ds.n), derive_seed(spec.seed, kFoldStream));
    CvCurve curve = cv_lambda(design, ds.target, folds, grid, spec.fit_options);
    auto path = fit_path(design, ds.target, grid, spec.fit_options);
    int pick = one_se ? curve.index_1se : curve.index_min;
    return {path[std::size_t(pick)], curve};
}

}  // namespace

std::vector<std::string> FittedModel::selected() const {
    switch (kind) {
        case MethodKind::L1lrMin:
        case MethodKind::L1lr1se:
            return selected_features(*linear);
        case MethodKind::TreeMethod:
        case MethodKind::Prune:
            return selected_variables(*tree);
        case MethodKind::L1lrTree:
            return tree ? selected_variables(*tree) : std::vector<std::string>{};
    }
    return {};
}

double FittedModel::predict_row(const Dataset& ds, int row) const {
    if (constant_fallback) return constant_prob;
    switch (kind) {
        case MethodKind::L1lrMin:
        case MethodKind::L1lr1se:
            return predict_dataset_row(*linear, ds, row);
        default:
            return predict(*tree, ds, row);
    }
}

FittedModel fit_method(const Dataset& ds, const MethodSpec& spec) {
    FittedModel out;
    out.kind = spec.kind;
    switch (spec.kind) {
        case MethodKind::L1lrMin:
        case MethodKind::L1lr1se: {
            LinearStage stage = fit_l1lr_cv(ds, spec, spec.kind == MethodKind::L1lr1se);
            out.feature_subset = complete_features(ds);
            out.linear = std::move(stage.model);
            out.cv_curve = std::move(stage.curve);
            break;
        }
        case MethodKind::TreeMethod: {
            out.feature_subset = all_feature_names(ds);
            out.tree = grow(ds, out.feature_subset, spec.grow_params);
            break;
        }
        case MethodKind::Prune: {
            out.feature_subset = all_feature_names(ds);
            FoldAssignment folds = stratified_folds(ds, effective_fold_count(spec, ds.n),
                                                    derive_seed(spec.seed, kFoldStream));
            auto [alpha_star, pruned] = cv_alpha(ds, out.feature_subset, folds, spec.grow_params);
            out.alpha_star = alpha_star;
            out.tree = std::move(pruned);
            break;
        }
        case MethodKind::L1lrTree: {
            LinearStage stage = fit_l1lr_cv(ds, spec, true);
            out.linear = std::move(stage.model);
            out.cv_curve = std::move(stage.curve);
            out.feature_subset = selected_features(*out.linear);
            if (out.feature_subset.empty()) {
                out.constant_fallback = true;
                out.constant_prob = double(ds.positives()) / double(ds.n);
            } else {
                out.tree = grow(ds, out.feature_subset, spec.grow_params);
            }
            break;
        }
    }
    return out;
}

LooResult loo_evaluate(const Dataset& ds, const MethodSpec& spec, int jobs) {
    if (ds.n < 20) throw DataError("leave-one-out needs n >= 20");
    LooResult result;
    result.spec = spec;
    result.fingerprint = ds.fingerprint();
    result.feature_names = all_feature_names(ds);
    result.n = ds.n;
    result.yhat.assign(std::size_t(ds.n), 0.0);
    result.selected_per_row.assign(std::size_t(ds.n), {});
    result.train_hash.assign(std::size_t(ds.n), 0);
    result.constant_fallback.assign(std::size_t(ds.n), 0);

    parallel_for(ds.n, jobs, [&](int i) {
        std::vector<int> train;
        train.reserve(std::size_t(ds.n) - 1);
        for (int r = 0; r < ds.n; ++r)
            if (r != i) train.push_back(r);
        result.train_hash[std::size_t(i)] = hash_indices(train);
        Dataset sub = ds.subset(train);
        MethodSpec rspec = spec;
        rspec.seed = derive_seed(spec.seed, kLooStream + std::uint64_t(i));
        try {
            FittedModel model = fit_method(sub, rspec);
            result.yhat[std::size_t(i)] = model.predict_row(ds, i);
            result.selected_per_row[std::size_t(i)] = model.selected();
            result.constant_fallback[std::size_t(i)] = model.constant_fallback ? 1 : 0;
        } catch (const std::exception& e) {
            throw NumericError("leave-one-out replicate " + std::to_string(i) +
                               " failed: " + e.what());
        }
    });
    return result;
}

int StabilityTable::count_at_least(int threshold) const {
    int k = 0;
    for (const auto& [name, c] : counts)
        if (c >= threshold) ++k;
    return k;
}

StabilityTable stability(const LooResult& loo) {
    StabilityTable table;
    table.n_models = loo.n;
    for (const auto& name : loo.feature_names) table.counts.push_back({name, 0});
    for (const auto& selected : loo.selected_per_row) {
        for (const auto& name : selected) {
            for (auto& [fname, count] : table.counts)
                if (fname == name) count += 1;
        }
    }
    return table;
}

ComparisonReport compare_methods(const Dataset& ds, const std::vector<MethodSpec>& specs,
                                 const DecisionConfig& decision, int jobs, double null_p) {
    if (specs.empty()) throw ConfigError("compare_methods: at least one method required");
    ComparisonReport report;
    report.fingerprint = ds.fingerprint();
    report.n = ds.n;
    report.positives = ds.positives();
    report.decision = decision;
    report.null_p = null_p;
    for (const auto& spec : specs) {
        MethodReport mr;
        mr.spec = spec;
        mr.loo = loo_evaluate(ds, spec, jobs);
        std::vector<int> decisions(static_cast<std::size_t>(ds.n));
        for (int i = 0; i < ds.n; ++i)
            decisions[std::size_t(i)] = classify(mr.loo.yhat[std::size_t(i)], decision);
        mr.confusion_counts = confusion(decisions, ds.target);
        mr.score_block = scores_with_significance(mr.confusion_counts, null_p);
        mr.stability_table = stability(mr.loo);
        mr.full_fit = fit_method(ds, spec);
        report.methods.push_back(std::move(mr));
    }
    return report;
}

}  // namespace l1tree
