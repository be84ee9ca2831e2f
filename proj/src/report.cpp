#include "l1tree/report.hpp"

#include <cmath>

namespace l1tree {

using nlohmann::json;

namespace {

json tool_json() {
    return json{{"name", kToolName}, {"version", kToolVersion}};
}

json rules_to_json(const RuleSet& rs) {
    json arr = json::array();
    for (const auto& rule : rs.rules) {
        json conditions = json::array();
        for (const auto& c : rule.conditions) conditions.push_back(c.describe());
        arr.push_back(json{{"class", rule.predicted_class},
                           {"prob", rule.leaf_prob},
                           {"support", rule.support},
                           {"conditions", conditions}});
    }
    return arr;
}

json scores_to_json(const ScoreBlock& s, const ConfusionCounts& c) {
    return json{{"recall", s.recall},
                {"recall_p", s.recall_p},
                {"recall_stars", s.recall_stars},
                {"specificity", s.specificity},
                {"specificity_p", s.specificity_p},
                {"specificity_stars", s.specificity_stars},
                {"accuracy", s.accuracy},
                {"confusion", json{{"tp", c.tp}, {"fn", c.fn}, {"tn", c.tn}, {"fp", c.fp}}}};
}

std::string stars_suffix(const std::string& stars) {
    return stars.empty() ? "" : " " + stars;
}

}  // namespace

json decision_to_json(const DecisionConfig& decision) {
    return json{{"threshold", decision.threshold},
                {"source", decision.source == ThresholdSource::Fixed ? "fixed" : "proportion"}};
}

json spec_to_json(const MethodSpec& spec) {
    return json{{"method", method_name(spec.kind)},
                {"seed", spec.seed},
                {"n_lambda", spec.n_lambda},
                {"lambda_eps", spec.lambda_eps},
                {"tol", spec.fit_options.tol},
                {"max_sweeps", spec.fit_options.max_sweeps},
                {"min_leaf", spec.grow_params.min_leaf},
                {"min_split", spec.grow_params.min_split},
                {"max_depth", spec.grow_params.max_depth},
                {"folds", spec.folds == 0 ? "auto" : json(spec.folds)}};
}

json model_to_json(const FittedModel& model, const DecisionConfig& decision) {
    json out;
    out["method"] = method_name(model.kind);
    out["feature_subset"] = model.feature_subset;
    out["selected"] = model.selected();
    out["constant_fallback"] = model.constant_fallback;
    if (model.constant_fallback) out["constant_prob"] = model.constant_prob;
    if (model.linear) {
        const auto& m = *model.linear;
        json coefs = json::array();
        auto raw = m.coefficients_raw();
        for (std::size_t j = 0; j < raw.size(); ++j)
            if (std::fabs(m.coefficients[j]) > 1e-12)
                coefs.push_back(json{{"term", m.column_map[j].label()}, {"value", raw[j]}});
        out["linear"] = json{{"lambda", m.lambda},
                             {"intercept", m.intercept_raw()},
                             {"coefficients", coefs},
                             {"kkt_residual", m.kkt_residual},
                             {"separation_capped", m.separation_capped}};
    }
    if (model.cv_curve) {
        const auto& c = *model.cv_curve;
        out["cv_lambda"] = json{{"lambda_min", c.lambda_min},
                                {"lambda_1se", c.lambda_1se},
                                {"lambdas", c.lambdas},
                                {"mean_error", c.mean_error},
                                {"se_error", c.se_error}};
    }
    if (model.alpha_star) out["alpha_star"] = *model.alpha_star;
    if (model.tree) {
        RuleSet rs = rules_from_tree(*model.tree, decision);
        out["tree"] = json{{"text", model.tree->to_text()},
                           {"leaves", model.tree->leaf_count()},
                           {"risk", model.tree->risk()},
                           {"degenerate", model.tree->degenerate},
                           {"rules", rules_to_json(rs)}};
    }
    return out;
}

std::string model_to_markdown(const FittedModel& model, const DecisionConfig& decision) {
    std::string out;
    if (model.constant_fallback)
        out += "**Constant fallback**: stage-1 selection empty; predicts base rate " +
               format_double(model.constant_prob) + ".\n\n";
    if (model.linear) {
        out += "Linear model (raw scale):\n\n```\n" + model.linear->to_text() + "```\n\n";
        if (model.cv_curve)
            out += "lambda_min = " + format_double(model.cv_curve->lambda_min) +
                   ", lambda_1se = " + format_double(model.cv_curve->lambda_1se) + "\n\n";
    }
    if (model.alpha_star) out += "alpha_star = " + format_double(*model.alpha_star) + "\n\n";
    if (model.tree) {
        out += "Tree (" + std::to_string(model.tree->leaf_count()) + " leaves):\n\n```\n" +
               model.tree->to_text() + "```\n\n";
        RuleSet rs = rules_from_tree(*model.tree, decision);
        out += render(rs) + "\n";
    }
    return out;
}

json comparison_to_json(const ComparisonReport& report, const json& resolved_config) {
    json methods = json::array();
    for (const auto& mr : report.methods) {
        json entry;
        entry["spec"] = spec_to_json(mr.spec);
        entry["scores"] = scores_to_json(mr.score_block, mr.confusion_counts);
        json stab = json::array();
        for (const auto& [name, count] : mr.stability_table.counts)
            stab.push_back(json{{"feature", name}, {"count", count}});
        entry["stability"] = stab;
        entry["loo"] = json{
            {"yhat", mr.loo.yhat},
            {"constant_fallback_replicates",
             int(std::count(mr.loo.constant_fallback.begin(), mr.loo.constant_fallback.end(), 1))}};
        entry["model"] = model_to_json(mr.full_fit, report.decision);
        methods.push_back(std::move(entry));
    }
    return json{{"tool", tool_json()},
                {"config", resolved_config},
                {"dataset",
                 json{{"fingerprint", report.fingerprint},
                      {"n", report.n},
                      {"positives", report.positives}}},
                {"decision", decision_to_json(report.decision)},
                {"null_p", report.null_p},
                {"methods", methods}};
}

std::string comparison_to_markdown(const ComparisonReport& report, int min_display_count) {
    std::string out;
    out += "# Method comparison\n\n";
    out += "Dataset fingerprint `" + report.fingerprint + "`, n = " + std::to_string(report.n) +
           ", positives = " + std::to_string(report.positives) + ".\n";
    out += "Decision threshold " + format_double(report.decision.threshold) +
           (report.decision.source == ThresholdSource::ClassProportion
                ? " (class proportion)"
                : " (fixed)") +
           "; binomial null p0 = " + format_double(report.null_p) + ".\n\n";

    out += "## Leave-one-out scores (percent)\n\n";
    out += "| method | recall | specificity | accuracy |\n";
    out += "| --- | --- | --- | --- |\n";
    for (const auto& mr : report.methods) {
        const auto& s = mr.score_block;
        out += "| " + method_name(mr.spec.kind) + " | " + format_percent(s.recall) +
               stars_suffix(s.recall_stars) + " | " + format_percent(s.specificity) +
               stars_suffix(s.specificity_stars) + " | " + format_percent(s.accuracy) + " |\n";
    }
    out += "\nSignificance: `*` p <= 0.05, `**` p <= 0.01, `***` p <= 0.001 (one-sided binomial"
           " test).\n\n";

    out += "## Selection stability (features selected at least " +
           std::to_string(min_display_count) + " times)\n\n";
    for (const auto& mr : report.methods) {
        out += "### " + method_name(mr.spec.kind) + "\n\n";
        out += "| feature | count / " + std::to_string(mr.stability_table.n_models) + " |\n";
        out += "| --- | --- |\n";
        int shown = 0;
        for (const auto& [name, count] : mr.stability_table.counts) {
            if (count >= min_display_count) {
                out += "| " + name + " | " + std::to_string(count) + " |\n";
                ++shown;
            }
        }
        if (shown == 0) out += "| (none) | |\n";
        out += "\n";
    }

    out += "## Full-data models\n\n";
    for (const auto& mr : report.methods) {
        out += "### " + method_name(mr.spec.kind) + "\n\n";
        out += model_to_markdown(mr.full_fit, report.decision);
    }
    return out;
}

json fit_to_json(const FitReport& report, const json& resolved_config) {
    json methods = json::array();
    for (const auto& [spec, model] : report.fits) {
        methods.push_back(json{{"spec", spec_to_json(spec)},
                               {"model", model_to_json(model, report.decision)}});
    }
    return json{{"tool", tool_json()},
                {"config", resolved_config},
                {"dataset",
                 json{{"fingerprint", report.fingerprint},
                      {"n", report.n},
                      {"positives", report.positives}}},
                {"decision", decision_to_json(report.decision)},
                {"methods", methods}};
}

std::string fit_to_markdown(const FitReport& report) {
    std::string out;
    out += "# Fitted models\n\n";
    out += "Dataset fingerprint `" + report.fingerprint + "`, n = " + std::to_string(report.n) +
           ", positives = " + std::to_string(report.positives) + ".\n";
    out += "Decision threshold " + format_double(report.decision.threshold) + ".\n\n";
    for (const auto& [spec, model] : report.fits) {
        out += "## " + method_name(spec.kind) + "\n\n";
        out += "Selected: ";
        auto sel = model.selected();
        if (sel.empty()) {
            out += "(none)";
        } else {
            for (std::size_t i = 0; i < sel.size(); ++i) {
                if (i) out += ", ";
                out += sel[i];
            }
        }
        out += "\n\n";
        out += model_to_markdown(model, report.decision);
    }
    return out;
}

}  // namespace l1tree
