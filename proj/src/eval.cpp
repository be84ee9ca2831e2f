#include "l1tree/eval.hpp"

#include <cmath>

namespace l1tree {

int classify(double p_hat, const DecisionConfig& cfg) {
    return p_hat > cfg.threshold ? 1 : 0;
}

DecisionConfig proportion_threshold(const Dataset& ds) {
    int pos = ds.positives();
    if (pos == 0 || pos == ds.n)
        throw DataError("proportion threshold undefined: target has a single class");
    return {double(pos) / double(ds.n), ThresholdSource::ClassProportion};
}

ConfusionCounts confusion(std::span<const int> decisions, std::span<const int> truths) {
    if (decisions.size() != truths.size())
        throw DataError("confusion: decisions and truths differ in length");
    ConfusionCounts c;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        if (truths[i] == 1)
            (decisions[i] == 1 ? c.tp : c.fn) += 1;
        else
            (decisions[i] == 0 ? c.tn : c.fp) += 1;
    }
    return c;
}

ScoreBlock scores(const ConfusionCounts& c) {
    if (c.positives() == 0 || c.negatives() == 0)
        throw DataError("scores undefined: a class is absent");
    ScoreBlock s;
    s.recall = double(c.tp) / double(c.positives());
    s.specificity = double(c.tn) / double(c.negatives());
    s.accuracy = (s.recall + s.specificity) / 2.0;
    return s;
}

std::pair<double, std::string> binomial_significance(long k, long n, double p0) {
    if (k < 0 || n < 0 || k > n) throw DataError("binomial_significance: need 0 <= k <= n");
    if (!(p0 > 0.0 && p0 < 1.0)) throw ConfigError("binomial_significance: p0 must be in (0,1)");
    double p;
    if (k <= 0) {
        p = 1.0;
    } else {
        // Upper tail via log-factorial terms; exact within double rounding.
        double log_p0 = std::log(p0);
        double log_q0 = std::log1p(-p0);
        double lgn = std::lgamma(double(n) + 1.0);
        double sum = 0.0;
        for (long j = k; j <= n; ++j) {
            double lt = lgn - std::lgamma(double(j) + 1.0) - std::lgamma(double(n - j) + 1.0) +
                        double(j) * log_p0 + double(n - j) * log_q0;
            sum += std::exp(lt);
        }
        p = std::min(sum, 1.0);
    }
    std::string stars;
    if (p <= 0.001) stars = "***";
    else if (p <= 0.01) stars = "**";
    else if (p <= 0.05) stars = "*";
    return {p, stars};
}

ScoreBlock scores_with_significance(const ConfusionCounts& c, double null_p) {
    ScoreBlock s = scores(c);
    auto [rp, rs] = binomial_significance(c.tp, c.positives(), null_p);
    auto [sp, ss] = binomial_significance(c.tn, c.negatives(), null_p);
    s.recall_p = rp;
    s.recall_stars = rs;
    s.specificity_p = sp;
    s.specificity_stars = ss;
    return s;
}

}  // namespace l1tree
