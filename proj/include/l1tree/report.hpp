#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "l1tree/pipeline.hpp"
#include "l1tree/rules.hpp"

namespace l1tree {

// Model dump shared by the fit and comparison reports. Tree-backed methods
// include their rule set at the decision threshold.
nlohmann::json model_to_json(const FittedModel& model, const DecisionConfig& decision);
std::string model_to_markdown(const FittedModel& model, const DecisionConfig& decision);

nlohmann::json comparison_to_json(const ComparisonReport& report,
                                  const nlohmann::json& resolved_config);
std::string comparison_to_markdown(const ComparisonReport& report, int min_display_count);

struct FitReport {
    std::string fingerprint;
    int n = 0;
    int positives = 0;
    DecisionConfig decision;
    std::vector<std::pair<MethodSpec, FittedModel>> fits;
};

nlohmann::json fit_to_json(const FitReport& report, const nlohmann::json& resolved_config);
std::string fit_to_markdown(const FitReport& report);

nlohmann::json decision_to_json(const DecisionConfig& decision);
nlohmann::json spec_to_json(const MethodSpec& spec);

}  // namespace l1tree
