#include "l1tree/l1lr.hpp"

#include <algorithm>
#include <cmath>

namespace l1tree {

namespace {

constexpr double kWeightFloor = 1e-5;
constexpr double kCoefCap = 1e3;
constexpr double kZeroCoef = 1e-12;

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

struct FitState {
    double beta0 = 0.0;
    std::vector<double> beta;
    std::vector<double> eta;
};

double mean_log_likelihood(std::span<const double> eta, const std::vector<int>& y) {
    double ll = 0.0;
    for (std::size_t i = 0; i < eta.size(); ++i)
        ll += double(y[i]) * eta[i] - log1p_exp(eta[i]);
    return ll / double(eta.size());
}

double penalized_objective(const FitState& s, const std::vector<int>& y, double lambda) {
    double l1 = 0.0;
    for (double b : s.beta) l1 += std::fabs(b);
    return -mean_log_likelihood(s.eta, y) + lambda * l1;
}

void recompute_eta(const DesignMatrix& design, FitState& s) {
    const int n = design.n;
    std::fill(s.eta.begin(), s.eta.end(), s.beta0);
    for (int j = 0; j < design.q; ++j) {
        double b = s.beta[std::size_t(j)];
        if (b == 0.0) continue;
        auto x = design.col(j);
        for (int i = 0; i < n; ++i) s.eta[std::size_t(i)] += b * x[std::size_t(i)];
    }
}

// Gradient of the mean negative log-likelihood, plus the KKT residual of
// the penalized problem at the current point.
double kkt_residual(const DesignMatrix& design, const std::vector<int>& y, const FitState& s,
                    double lambda, std::vector<double>& grad) {
    const int n = design.n;
    std::vector<double> resid(static_cast<std::size_t>(n));
    double g0 = 0.0;
    for (int i = 0; i < n; ++i) {
        double d = sigmoid(s.eta[std::size_t(i)]) - double(y[std::size_t(i)]);
        resid[std::size_t(i)] = d;
        g0 += d;
    }
    g0 /= double(n);
    double worst = std::fabs(g0);
    grad.assign(std::size_t(design.q), 0.0);
    for (int j = 0; j < design.q; ++j) {
        auto x = design.col(j);
        double g = 0.0;
        for (int i = 0; i < n; ++i) g += resid[std::size_t(i)] * x[std::size_t(i)];
        g /= double(n);
        grad[std::size_t(j)] = g;
        double b = s.beta[std::size_t(j)];
        double r = (std::fabs(b) > kZeroCoef) ? std::fabs(g + lambda * (b > 0 ? 1.0 : -1.0))
                                              : std::max(0.0, std::fabs(g) - lambda);
        worst = std::max(worst, r);
    }
    return worst;
}

RegularizedLogisticModel finish(const DesignMatrix& design, FitState& s, double lambda,
                                double residual, int sweeps, bool capped) {
    // Snap numerical dust to exact zeros; the penalty treats it as zero and
    // the null model at lambda >= lambda_max must be exact.
    for (double& b : s.beta)
        if (std::fabs(b) <= kZeroCoef) b = 0.0;
    RegularizedLogisticModel m;
    m.lambda = lambda;
    m.intercept = s.beta0;
    m.coefficients = s.beta;
    m.column_map = design.column_map;
    m.means = design.means;
    m.sds = design.sds;
    m.kkt_residual = residual;
    m.sweeps = sweeps;
    m.separation_capped = capped;
    return m;
}

RegularizedLogisticModel fit_warm(const DesignMatrix& design, const std::vector<int>& y,
                                  double lambda, const FitOptions& opts, FitState& s) {
    const int n = design.n;
    const int q = design.q;
    if (n < 2) throw DataError("fit: need at least two rows");
    {
        bool has0 = false, has1 = false;
        for (int v : y) (v ? has1 : has0) = true;
        if (!has0 || !has1) throw DataError("fit: both classes must be present");
    }
    if (int(y.size()) != n) throw DataError("fit: label length mismatch");
    if (lambda < 0.0) throw ConfigError("fit: lambda must be non-negative");

    std::vector<double> grad, w(static_cast<std::size_t>(n)), r(static_cast<std::size_t>(n)), d(static_cast<std::size_t>(q));
    std::vector<int> working;
    int sweeps = 0;
    double objective = penalized_objective(s, y, lambda);

    for (int outer = 0; outer < 1000; ++outer) {
        double residual = kkt_residual(design, y, s, lambda, grad);
        if (residual <= opts.tol) return finish(design, s, lambda, residual, sweeps, false);
        if (sweeps >= opts.max_sweeps)
            throw NumericError("l1lr fit did not converge: KKT residual " +
                               format_double(residual) + " after " + std::to_string(sweeps) +
                               " sweeps");

        // Quadratic (IRLS) approximation at the current point.
        double wsum = 0.0;
        for (int i = 0; i < n; ++i) {
            double p = sigmoid(s.eta[std::size_t(i)]);
            double wi = std::max(p * (1.0 - p), kWeightFloor);
            w[std::size_t(i)] = wi;
            r[std::size_t(i)] = (double(y[std::size_t(i)]) - p) / wi;  // z - eta
            wsum += wi;
        }

        // Coefficients currently active plus KKT violators at this point.
        working.clear();
        for (int j = 0; j < q; ++j)
            if (std::fabs(s.beta[std::size_t(j)]) > kZeroCoef ||
                std::fabs(grad[std::size_t(j)]) >= lambda - opts.tol)
                working.push_back(j);
        for (int j : working) {
            auto x = design.col(j);
            double dj = 0.0;
            for (int i = 0; i < n; ++i)
                dj += w[std::size_t(i)] * x[std::size_t(i)] * x[std::size_t(i)];
            d[std::size_t(j)] = dj / double(n);
        }

        FitState prev = s;
        double max_delta = 0.0;
        for (int pass = 0; pass < 1000; ++pass) {
            max_delta = 0.0;
            double num0 = 0.0;
            for (int i = 0; i < n; ++i) num0 += w[std::size_t(i)] * r[std::size_t(i)];
            double delta0 = num0 / wsum;
            s.beta0 += delta0;
            for (int i = 0; i < n; ++i) r[std::size_t(i)] -= delta0;
            max_delta = std::fabs(delta0);
            for (int j : working) {
                double dj = d[std::size_t(j)];
                if (dj < 1e-12) continue;
                auto x = design.col(j);
                double num = 0.0;
                for (int i = 0; i < n; ++i)
                    num += w[std::size_t(i)] * x[std::size_t(i)] * r[std::size_t(i)];
                num = num / double(n) + dj * s.beta[std::size_t(j)];
                double bnew = soft_threshold(num, lambda) / dj;
                double delta = bnew - s.beta[std::size_t(j)];
                if (delta != 0.0) {
                    s.beta[std::size_t(j)] = bnew;
                    for (int i = 0; i < n; ++i) r[std::size_t(i)] -= delta * x[std::size_t(i)];
                    max_delta = std::max(max_delta, std::fabs(delta));
                }
            }
            ++sweeps;
            if (max_delta < opts.tol || sweeps >= opts.max_sweeps) break;
        }
        recompute_eta(design, s);

        // The quadratic step is not a guaranteed majorizer; keep the outer
        // objective monotone by stepping back toward the previous iterate.
        double new_objective = penalized_objective(s, y, lambda);
        int halvings = 0;
        while (new_objective > objective + 1e-12 * (1.0 + std::fabs(objective)) &&
               halvings < 40) {
            s.beta0 = 0.5 * (s.beta0 + prev.beta0);
            for (int j = 0; j < q; ++j)
                s.beta[std::size_t(j)] = 0.5 * (s.beta[std::size_t(j)] + prev.beta[std::size_t(j)]);
            recompute_eta(design, s);
            new_objective = penalized_objective(s, y, lambda);
            ++halvings;
        }
        if (halvings == 40) {
            s = prev;
            double rem = kkt_residual(design, y, s, lambda, grad);
            throw NumericError("l1lr fit stalled: KKT residual " + format_double(rem));
        }
        objective = new_objective;

        double maxabs = std::fabs(s.beta0);
        for (double b : s.beta) maxabs = std::max(maxabs, std::fabs(b));
        if (maxabs > kCoefCap) {
            // Perfect-separation blowup: cap and flag instead of diverging.
            s.beta0 = std::clamp(s.beta0, -kCoefCap, kCoefCap);
            for (double& b : s.beta) b = std::clamp(b, -kCoefCap, kCoefCap);
            recompute_eta(design, s);
            double rem = kkt_residual(design, y, s, lambda, grad);
            return finish(design, s, lambda, rem, sweeps, true);
        }
    }
    throw NumericError("l1lr fit did not converge within outer iteration limit");
}

}  // namespace

double sigmoid(double eta) {
    if (eta >= 0.0) {
        double e = std::exp(-eta);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(eta);
    return e / (1.0 + e);
}

double log1p_exp(double eta) {
    if (eta > 0.0) return eta + std::log1p(std::exp(-eta));
    return std::log1p(std::exp(eta));
}

double RegularizedLogisticModel::intercept_raw() const {
    double b0 = intercept;
    for (std::size_t j = 0; j < coefficients.size(); ++j)
        b0 -= coefficients[j] * means[j] / sds[j];
    return b0;
}

std::vector<double> RegularizedLogisticModel::coefficients_raw() const {
    std::vector<double> out(coefficients.size());
    for (std::size_t j = 0; j < coefficients.size(); ++j) out[j] = coefficients[j] / sds[j];
    return out;
}

std::string RegularizedLogisticModel::to_text() const {
    std::string out;
    out += "lambda " + format_double(lambda) + "\n";
    out += "intercept " + format_double(intercept_raw()) + "\n";
    auto raw = coefficients_raw();
    for (std::size_t j = 0; j < raw.size(); ++j)
        if (std::fabs(coefficients[j]) > kZeroCoef)
            out += column_map[j].label() + " " + format_double(raw[j]) + "\n";
    if (separation_capped) out += "warning separation_capped\n";
    return out;
}

RegularizedLogisticModel fit(const DesignMatrix& design, const std::vector<int>& y, double lambda,
                             const FitOptions& opts) {
    FitState s;
    s.beta.assign(std::size_t(design.q), 0.0);
    s.eta.assign(std::size_t(design.n), 0.0);
    return fit_warm(design, y, lambda, opts, s);
}

std::vector<RegularizedLogisticModel> fit_path(const DesignMatrix& design,
                                               const std::vector<int>& y,
                                               std::span<const double> grid,
                                               const FitOptions& opts) {
    std::vector<RegularizedLogisticModel> path;
    path.reserve(grid.size());
    FitState s;
    s.beta.assign(std::size_t(design.q), 0.0);
    s.eta.assign(std::size_t(design.n), 0.0);
    for (double lambda : grid) path.push_back(fit_warm(design, y, lambda, opts, s));
    return path;
}

double log_likelihood(const RegularizedLogisticModel& model, const DesignMatrix& design,
                      const std::vector<int>& y) {
    if (int(y.size()) != design.n || int(model.coefficients.size()) != design.q)
        throw DataError("log_likelihood: dimension mismatch");
    std::vector<double> eta(std::size_t(design.n), model.intercept);
    for (int j = 0; j < design.q; ++j) {
        double b = model.coefficients[std::size_t(j)];
        if (b == 0.0) continue;
        auto x = design.col(j);
        for (int i = 0; i < design.n; ++i) eta[std::size_t(i)] += b * x[std::size_t(i)];
    }
    return mean_log_likelihood(eta, y);
}

double objective_value(const RegularizedLogisticModel& model, const DesignMatrix& design,
                       const std::vector<int>& y) {
    double l1 = 0.0;
    for (double b : model.coefficients) l1 += std::fabs(b);
    return -log_likelihood(model, design, y) + model.lambda * l1;
}

double predict_proba(const RegularizedLogisticModel& model, std::span<const double> row) {
    if (row.size() != model.coefficients.size())
        throw DataError("predict_proba: row dimension mismatch");
    double eta = model.intercept;
    for (std::size_t j = 0; j < row.size(); ++j) eta += model.coefficients[j] * row[j];
    return sigmoid(eta);
}

double predict_dataset_row(const RegularizedLogisticModel& model, const Dataset& ds, int row) {
    double eta = model.intercept;
    for (std::size_t j = 0; j < model.coefficients.size(); ++j) {
        double b = model.coefficients[j];
        if (b == 0.0) continue;
        const DesignColumn& dc = model.column_map[j];
        int ci = ds.column_index(dc.feature);
        if (ci < 0) throw DataError("predict: feature " + dc.feature + " absent from dataset");
        const FeatureColumn& col = ds.columns[std::size_t(ci)];
        if (col.is_missing(row)) continue;  // standardized mean: no contribution
        double raw;
        if (dc.level) {
            raw = (col.kind == FeatureKind::Categorical && col.level(row) == *dc.level) ? 1.0 : 0.0;
        } else {
            raw = col.numeric[std::size_t(row)];
        }
        eta += b * (raw - model.means[j]) / model.sds[j];
    }
    return sigmoid(eta);
}

std::vector<double> lambda_grid(const DesignMatrix& design, const std::vector<int>& y,
                                int n_lambda, double eps) {
    if (design.q == 0) throw DataError("lambda_grid: design has no usable columns");
    if (n_lambda < 2) throw ConfigError("lambda_grid: need at least two grid points");
    if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("lambda_grid: eps must be in (0,1)");
    const int n = design.n;
    double ybar = 0.0;
    for (int v : y) ybar += double(v);
    ybar /= double(n);
    double lambda_max = 0.0;
    for (int j = 0; j < design.q; ++j) {
        auto x = design.col(j);
        double dot = 0.0;
        for (int i = 0; i < n; ++i) dot += x[std::size_t(i)] * (double(y[std::size_t(i)]) - ybar);
        lambda_max = std::max(lambda_max, std::fabs(dot) / double(n));
    }
    if (lambda_max <= 0.0) throw DataError("lambda_grid: all design columns are uncorrelated constants");
    std::vector<double> grid(static_cast<std::size_t>(n_lambda));
    double log_max = std::log(lambda_max);
    double step = std::log(eps) / double(n_lambda - 1);
    for (int k = 0; k < n_lambda; ++k) grid[std::size_t(k)] = std::exp(log_max + step * double(k));
    grid[0] = lambda_max;  // exact endpoint
    return grid;
}

CvCurve cv_lambda(const DesignMatrix& design, const std::vector<int>& y,
                  const FoldAssignment& folds, std::span<const double> grid,
                  const FitOptions& opts) {
    const int n = design.n;
    const int q = design.q;
    const int k = folds.k;
    if (int(folds.fold_of_row.size()) != n) throw DataError("cv_lambda: fold assignment mismatch");
    const int m = int(grid.size());

    // fold_errors[g][f]: held-out mean squared error of fold f at grid[g].
    std::vector<std::vector<double>> fold_errors(std::size_t(m),
                                                 std::vector<double>(std::size_t(k), 0.0));

    for (int f = 0; f < k; ++f) {
        std::vector<int> train, test;
        for (int i = 0; i < n; ++i)
            (folds.fold_of_row[std::size_t(i)] == f ? test : train).push_back(i);
        if (test.empty()) continue;
        std::vector<int> ytr;
        ytr.reserve(train.size());
        bool has0 = false, has1 = false;
        for (int i : train) {
            ytr.push_back(y[std::size_t(i)]);
            (y[std::size_t(i)] ? has1 : has0) = true;
        }
        if (!has0 || !has1)
            throw DataError("cv_lambda: training complement of fold " + std::to_string(f) +
                            " lacks a class");

        // Re-standardize raw columns on the training rows.
        DesignMatrix fold_design;
        fold_design.n = int(train.size());
        fold_design.q = q;
        fold_design.standardized = true;
        fold_design.column_map = design.column_map;
        fold_design.values.resize(std::size_t(q) * train.size());
        fold_design.means.resize(std::size_t(q));
        fold_design.sds.resize(std::size_t(q));
        for (int j = 0; j < q; ++j) {
            double mean = 0.0;
            for (int i : train) mean += design.raw(i, j);
            mean /= double(train.size());
            double var = 0.0;
            for (int i : train) {
                double d = design.raw(i, j) - mean;
                var += d * d;
            }
            var /= double(train.size());
            double sd = std::sqrt(var);
            if (sd < 1e-12) sd = 1.0;  // in-fold constant: centered column is 0
            fold_design.means[std::size_t(j)] = mean;
            fold_design.sds[std::size_t(j)] = sd;
            double* out = fold_design.values.data() + std::size_t(j) * train.size();
            for (std::size_t t = 0; t < train.size(); ++t)
                out[t] = (design.raw(train[t], j) - mean) / sd;
        }

        auto path = fit_path(fold_design, ytr, grid, opts);
        for (int g = 0; g < m; ++g) {
            const auto& model = path[std::size_t(g)];
            double err = 0.0;
            for (int i : test) {
                double eta = model.intercept;
                for (int j = 0; j < q; ++j) {
                    double b = model.coefficients[std::size_t(j)];
                    if (b == 0.0) continue;
                    eta += b * (design.raw(i, j) - fold_design.means[std::size_t(j)]) /
                           fold_design.sds[std::size_t(j)];
                }
                double p = sigmoid(eta);
                double d = p - double(y[std::size_t(i)]);
                err += d * d;
            }
            fold_errors[std::size_t(g)][std::size_t(f)] = err / double(test.size());
        }
    }

    CvCurve curve;
    curve.lambdas.assign(grid.begin(), grid.end());
    curve.mean_error.resize(std::size_t(m));
    curve.se_error.resize(std::size_t(m));
    for (int g = 0; g < m; ++g) {
        const auto& fe = fold_errors[std::size_t(g)];
        double mean = 0.0;
        for (double e : fe) mean += e;
        mean /= double(k);
        double var = 0.0;
        for (double e : fe) var += (e - mean) * (e - mean);
        double se = k > 1 ? std::sqrt(var / double(k - 1)) / std::sqrt(double(k)) : 0.0;
        curve.mean_error[std::size_t(g)] = mean;
        curve.se_error[std::size_t(g)] = se;
    }
    curve.index_min = 0;
    for (int g = 1; g < m; ++g)
        if (curve.mean_error[std::size_t(g)] < curve.mean_error[std::size_t(curve.index_min)])
            curve.index_min = g;  // strict: ties keep the larger lambda
    double bound = curve.mean_error[std::size_t(curve.index_min)] +
                   curve.se_error[std::size_t(curve.index_min)];
    curve.index_1se = curve.index_min;
    for (int g = 0; g <= curve.index_min; ++g) {
        if (curve.mean_error[std::size_t(g)] <= bound) {
            curve.index_1se = g;
            break;
        }
    }
    curve.lambda_min = curve.lambdas[std::size_t(curve.index_min)];
    curve.lambda_1se = curve.lambdas[std::size_t(curve.index_1se)];
    return curve;
}

std::vector<std::string> selected_features(const RegularizedLogisticModel& model) {
    std::vector<std::string> out;
    for (std::size_t j = 0; j < model.coefficients.size(); ++j) {
        if (std::fabs(model.coefficients[j]) > kZeroCoef) {
            const std::string& name = model.column_map[j].feature;
            if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
        }
    }
    return out;
}

}  // namespace l1tree
