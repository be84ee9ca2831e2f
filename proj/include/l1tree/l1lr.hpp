#pragma once

#include <span>
#include <string>
#include <vector>

#include "l1tree/data.hpp"

namespace l1tree {

struct FitOptions {
    double tol = 1e-7;      // KKT residual target
    int max_sweeps = 10000; // total coordinate sweeps per fit
};

// L1-penalized logistic model at one lambda. Coefficients live on the scale
// of the design it was fitted on; the raw-scale view undoes standardization.
struct RegularizedLogisticModel {
    double lambda = 0.0;
    double intercept = 0.0;
    std::vector<double> coefficients;
    std::vector<DesignColumn> column_map;
    std::vector<double> means, sds;
    double kkt_residual = 0.0;
    int sweeps = 0;
    bool separation_capped = false;

    double intercept_raw() const;
    std::vector<double> coefficients_raw() const;

    // Key-value dump: lambda, intercept and nonzero raw-scale coefficients.
    std::string to_text() const;
};

// Minimizes mean negative log-likelihood + lambda * ||beta||_1 by outer
// quadratic approximation with inner cyclic coordinate descent and
// soft-thresholding. The intercept is never penalized. Throws NumericError
// on non-convergence; flags (rather than throws) perfect-separation blowup.
RegularizedLogisticModel fit(const DesignMatrix& design, const std::vector<int>& y, double lambda,
                             const FitOptions& opts = {});

// Warm-started fits along a descending lambda grid.
std::vector<RegularizedLogisticModel> fit_path(const DesignMatrix& design,
                                               const std::vector<int>& y,
                                               std::span<const double> grid,
                                               const FitOptions& opts = {});

// Mean log-likelihood of the model on (design, y), overflow-safe.
double log_likelihood(const RegularizedLogisticModel& model, const DesignMatrix& design,
                      const std::vector<int>& y);

// Penalized objective the fit minimizes (for tests and monotonicity checks).
double objective_value(const RegularizedLogisticModel& model, const DesignMatrix& design,
                       const std::vector<int>& y);

// sigmoid(intercept + row . coefficients); row in design space.
double predict_proba(const RegularizedLogisticModel& model, std::span<const double> row);

// Probability for a dataset row. A value missing at prediction time (the
// training side saw the feature complete) contributes the standardized
// mean, i.e. nothing beyond the intercept.
double predict_dataset_row(const RegularizedLogisticModel& model, const Dataset& ds, int row);

// Descending log-spaced grid from lambda_max (smallest all-zero penalty)
// down to eps * lambda_max. Requires a standardized design.
std::vector<double> lambda_grid(const DesignMatrix& design, const std::vector<int>& y,
                                int n_lambda = 100, double eps = 1e-3);

struct CvCurve {
    std::vector<double> lambdas;     // descending
    std::vector<double> mean_error;  // CV mean squared prediction error
    std::vector<double> se_error;    // standard error of fold means
    int index_min = 0;
    int index_1se = 0;
    double lambda_min = 0.0;
    double lambda_1se = 0.0;
};

// K-fold CV of squared prediction error over the grid; standardization is
// recomputed on each training complement. Ties on the minimum resolve to
// the largest lambda; lambda_1se is the largest lambda within one standard
// error of the minimum.
CvCurve cv_lambda(const DesignMatrix& design, const std::vector<int>& y,
                  const FoldAssignment& folds, std::span<const double> grid,
                  const FitOptions& opts = {});

// Original-feature names with any nonzero coefficient (one-hot groups
// collapse to their source feature), in design-build order.
std::vector<std::string> selected_features(const RegularizedLogisticModel& model);

double sigmoid(double eta);
double log1p_exp(double eta);  // log(1 + e^eta) without overflow

}  // namespace l1tree
