#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "pavi/dataset.hpp"
#include "pavi/variable_set.hpp"

namespace pavi {

/// Maximum-likelihood fit restricted to a support, intercept always included.
/// The intercept is never counted in the support.
struct FittedModel {
    VariableSet support;
    double intercept = 0.0;
    Eigen::VectorXd coefficients;       // one per support index, in support order
    std::optional<double> sigma_hat;    // gaussian only; MLE scale, floored at 1e-8
    double log_lik = 0.0;
    bool converged = true;
    Family family = Family::gaussian;

    /// intercept + x_support * coefficients for every row of x.
    Eigen::VectorXd linear_predictor(const Eigen::MatrixXd& x) const;
};

/// Least squares on [1, x_support]. Rank-deficient designs get the
/// minimal-norm solution and converged=false. sigma_hat uses the MLE divisor
/// n. Throws Error("support-capacity") when |support| > n - 2.
FittedModel fit_gaussian(const Dataset& data, const VariableSet& support);

/// Logistic MLE by IRLS with step-halving; fitted probabilities are clamped
/// to [1e-10, 1-1e-10] inside every log-likelihood. converged=false when the
/// iteration cap is hit or step-halving stalls (separation).
/// `log_lik_trace`, when given, records the log-likelihood after each
/// accepted IRLS step.
FittedModel fit_logistic(const Dataset& data, const VariableSet& support,
                         std::vector<double>* log_lik_trace = nullptr);

/// Dispatch on data.family.
FittedModel fit_model(const Dataset& data, const VariableSet& support);

/// Held-out log-likelihood of `model` on `test`.
/// binomial: sum of y log p + (1-y) log(1-p), clamped.
/// gaussian: sum of -log(sigma_hat) - (y - yhat)^2 / (2 sigma_hat^2), i.e.
/// the training-scale likelihood kernel without the shared 2*pi constant.
double holdout_log_lik(const FittedModel& model, const Dataset& test);

struct FitDiagnostics {
    double aic = 0.0;       // -2 log_lik + 2 (|support| + 1)
    double bic = 0.0;       // -2 log_lik + (|support| + 1) log n
    double deviance = 0.0;  // binomial: -2 log_lik; gaussian: RSS (unit dispersion)
};

FitDiagnostics diagnostics(const FittedModel& model, const Dataset& data);

}  // namespace pavi
