#pragma once

#include <span>
#include <string>
#include <utility>

#include "l1tree/data.hpp"

namespace l1tree {

enum class ThresholdSource { Fixed, ClassProportion };

struct DecisionConfig {
    double threshold = 0.5;
    ThresholdSource source = ThresholdSource::Fixed;
};

// 1 iff p_hat is strictly above the threshold; ties go to class 0.
int classify(double p_hat, const DecisionConfig& cfg);

// Threshold equal to the class-1 proportion of the cohort.
DecisionConfig proportion_threshold(const Dataset& ds);

struct ConfusionCounts {
    long tp = 0, fn = 0, tn = 0, fp = 0;
    long positives() const { return tp + fn; }
    long negatives() const { return tn + fp; }
    long total() const { return tp + fn + tn + fp; }
};

ConfusionCounts confusion(std::span<const int> decisions, std::span<const int> truths);

struct ScoreBlock {
    double recall = 0.0;
    double specificity = 0.0;
    double accuracy = 0.0;  // (recall + specificity) / 2
    double recall_p = -1.0;          // -1 when significance not computed
    double specificity_p = -1.0;
    std::string recall_stars;
    std::string specificity_stars;
};

ScoreBlock scores(const ConfusionCounts& c);

// Exact one-sided upper-tail binomial test: P(X >= k), X ~ Binomial(n, p0).
// Stars per cutoffs 0.05 / 0.01 / 0.001 (non-strict).
std::pair<double, std::string> binomial_significance(long k, long n, double p0 = 0.5);

ScoreBlock scores_with_significance(const ConfusionCounts& c, double null_p = 0.5);

}  // namespace l1tree
