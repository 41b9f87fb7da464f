#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "pavi/dataset.hpp"
#include "pavi/penalty.hpp"
#include "pavi/variable_set.hpp"

namespace pavi {

inline constexpr int kDefaultGridLength = 100;

/// Strictly decreasing positive tuning values; values[0] leaves every
/// penalized coefficient at zero.
struct LambdaGrid {
    std::vector<double> values;
    int length() const { return static_cast<int>(values.size()); }
};

/// Per-lambda solutions of one penalized solver run, on the original scale.
struct PathSolution {
    LambdaGrid grid;
    std::vector<double> intercepts;
    std::vector<Eigen::VectorXd> coefficients;  // length p each
    std::vector<VariableSet> supports;          // nonzero indices per lambda
    std::vector<char> converged;
    Family family = Family::gaussian;
    PenaltySpec penalty;
};

/// Solver diagnostics for property tests: each segment holds the objective
/// the solver is descending, recorded after every sweep (convex inner
/// problems) or after every majorization step (SCAD/MCP outer loop).
struct FitTrace {
    std::vector<std::vector<double>> descent_segments;
};

/// Log-spaced grid from lambda_max down to ratio * lambda_max with
/// ratio = 0.01 when n < p and 1e-4 otherwise. lambda_max is the smallest
/// value whose null-model KKT conditions hold for every variable.
/// Throws Error("constant-design") when no column varies.
LambdaGrid lambda_grid(const Dataset& data, const PenaltySpec& penalty,
                       int length = kDefaultGridLength);

/// Cyclic coordinate descent with warm starts along the grid. Columns are
/// standardized internally (population moments); the intercept is
/// unpenalized; reported coefficients are on the original scale. Binomial
/// fits wrap the inner solver in a quadratic-approximation loop with working
/// weights floored at 1e-5. SCAD/MCP run up to five local-linear-approximation
/// re-weightings per lambda. Non-convergence at a lambda is flagged, never
/// fatal.
PathSolution fit_path(const Dataset& data, const PenaltySpec& penalty, const LambdaGrid& grid,
                      FitTrace* trace = nullptr);

struct CvResult {
    double chosen_lambda = 0.0;
    int chosen_index = 0;
    std::vector<double> cv_losses;     // per lambda, mean over held-out points
    std::vector<int> fold_assignment;  // per observation
    LambdaGrid grid;
};

/// K-fold cross-validation over the full-data grid; squared error loss for
/// gaussian, deviance for binomial. Folds are a seeded partition, stratified
/// by class for binomial. Ties prefer the larger lambda.
CvResult cv_select(const Dataset& data, const PenaltySpec& penalty, int folds, uint64_t seed);

/// w_j = |pilot_j|^-gamma, +inf where pilot_j = 0.
Eigen::VectorXd adaptive_weights_from_pilot(const Eigen::VectorXd& pilot, double gamma);

/// Pilot is a cross-validated lasso; weights are computed from the pilot's
/// standardized coefficients. An empty pilot yields all-infinite weights
/// (the adaptive path is then intercept-only).
Eigen::VectorXd adaptive_weights(const Dataset& data, double gamma, int folds = 5,
                                 uint64_t seed = 0);

}  // namespace pavi
