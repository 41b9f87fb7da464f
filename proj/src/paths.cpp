#include "pavi/paths.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pavi/errors.hpp"
#include "pavi/rng.hpp"

namespace pavi {

namespace {

constexpr double kCoefTol = 1e-7;
constexpr double kWeightFloor = 1e-5;
constexpr double kProbClamp = 1e-10;
constexpr int kMaxSweeps = 5000;   // per convex solve
constexpr int kMaxOuterIrls = 50;  // quadratic approximations per solve
constexpr int kLlaSteps = 5;       // re-weightings per lambda for SCAD/MCP
const double kInf = std::numeric_limits<double>::infinity();

struct StandardizedDesign {
    Eigen::MatrixXd xs;   // centered, unit population variance; constant cols zeroed
    Eigen::VectorXd mean;
    Eigen::VectorXd sd;   // 1.0 placeholder for constant columns
    std::vector<char> constant;
    int n = 0;
    int p = 0;
};

StandardizedDesign standardize(const Eigen::MatrixXd& x) {
    StandardizedDesign d;
    d.n = static_cast<int>(x.rows());
    d.p = static_cast<int>(x.cols());
    d.mean = x.colwise().mean();
    d.xs = x.rowwise() - d.mean.transpose();
    d.sd.resize(d.p);
    d.constant.assign(d.p, 0);
    bool any_varying = false;
    for (int j = 0; j < d.p; ++j) {
        double var = d.xs.col(j).squaredNorm() / d.n;
        if (var <= 0.0) {
            d.constant[j] = 1;
            d.sd[j] = 1.0;
            d.xs.col(j).setZero();
        } else {
            d.sd[j] = std::sqrt(var);
            d.xs.col(j) /= d.sd[j];
            any_varying = true;
        }
    }
    if (!any_varying) throw Error("constant-design", "every design column is constant");
    return d;
}

Eigen::VectorXd base_factors(const PenaltySpec& spec, int p) {
    if (spec.kind == PenaltyKind::adaptive_lasso) {
        if (!spec.adaptive_weights) {
            throw Error("bad-penalty", "adaptive lasso weights are missing");
        }
        if (spec.adaptive_weights->size() != p) {
            throw Error("dimension-mismatch", "adaptive weight length differs from p",
                        std::to_string(spec.adaptive_weights->size()));
        }
        return *spec.adaptive_weights;
    }
    return Eigen::VectorXd::Ones(p);
}

double penalty_value(const PenaltySpec& spec, double t, double lambda) {
    switch (spec.kind) {
        case PenaltyKind::lasso:
        case PenaltyKind::adaptive_lasso:
            return lambda * t;
        case PenaltyKind::scad: {
            double a = spec.a;
            if (t <= lambda) return lambda * t;
            if (t <= a * lambda) {
                return (2.0 * a * lambda * t - t * t - lambda * lambda) / (2.0 * (a - 1.0));
            }
            return lambda * lambda * (a + 1.0) / 2.0;
        }
        case PenaltyKind::mcp: {
            double a = spec.a;
            if (t <= a * lambda) return lambda * t - t * t / (2.0 * a);
            return a * lambda * lambda / 2.0;
        }
    }
    return 0.0;
}

double clamp_prob(double p) { return std::min(std::max(p, kProbClamp), 1.0 - kProbClamp); }

// Coordinate descent for the penalized gaussian objective
//   ||y - b0 - Xs b||^2 / (2n) + lambda sum_j pf_j |b_j|
// on the standardized design, with the intercept absorbed by centering y.
struct GaussianCd {
    const StandardizedDesign& d;
    Eigen::VectorXd resid;  // y_centered - Xs beta, maintained incrementally
    Eigen::VectorXd beta;
    double y_mean = 0.0;

    GaussianCd(const StandardizedDesign& design, const Eigen::VectorXd& y)
        : d(design), beta(Eigen::VectorXd::Zero(design.p)) {
        y_mean = y.mean();
        resid = y.array() - y_mean;
    }

    double surrogate_objective(double lambda, const Eigen::VectorXd& pf) const {
        double pen = 0.0;
        for (int j = 0; j < d.p; ++j) {
            if (beta[j] != 0.0) pen += pf[j] * lambda * std::abs(beta[j]);
        }
        return resid.squaredNorm() / (2.0 * d.n) + pen;
    }

    double true_objective(const PenaltySpec& spec, double lambda) const {
        double pen = 0.0;
        for (int j = 0; j < d.p; ++j) pen += penalty_value(spec, std::abs(beta[j]), lambda);
        return resid.squaredNorm() / (2.0 * d.n) + pen;
    }

    bool solve(double lambda, const Eigen::VectorXd& pf, FitTrace* trace) {
        std::vector<double>* seg = nullptr;
        if (trace) {
            trace->descent_segments.emplace_back();
            seg = &trace->descent_segments.back();
            seg->push_back(surrogate_objective(lambda, pf));
        }
        int sweeps = 0;
        auto sweep = [&](bool full) {
            double max_change = 0.0;
            for (int j = 0; j < d.p; ++j) {
                if (d.constant[j]) continue;
                double threshold = pf[j] * lambda;
                if (!(threshold < kInf)) continue;
                double old = beta[j];
                if (!full && old == 0.0) continue;
                double z = old + d.xs.col(j).dot(resid) / d.n;
                double next = soft_threshold(z, threshold);
                if (next != old) {
                    beta[j] = next;
                    resid -= (next - old) * d.xs.col(j);
                    max_change = std::max(max_change, std::abs(next - old));
                }
            }
            ++sweeps;
            if (seg) seg->push_back(surrogate_objective(lambda, pf));
            return max_change;
        };
        while (sweeps < kMaxSweeps) {
            if (sweep(true) < kCoefTol) return true;
            while (sweeps < kMaxSweeps && sweep(false) >= kCoefTol) {
            }
        }
        return false;
    }

    double intercept_original(const Eigen::VectorXd& coef_original) const {
        return y_mean - coef_original.dot(d.mean);
    }
};

// Quadratic-approximation loop around weighted coordinate descent for
//   -loglik(b0, b)/n + lambda sum_j pf_j |b_j|.
struct BinomialCd {
    const StandardizedDesign& d;
    const Eigen::VectorXd& y;
    Eigen::VectorXd beta;
    double beta0 = 0.0;

    BinomialCd(const StandardizedDesign& design, const Eigen::VectorXd& response)
        : d(design), y(response), beta(Eigen::VectorXd::Zero(design.p)) {}

    Eigen::VectorXd linear_predictor() const {
        Eigen::VectorXd eta = Eigen::VectorXd::Constant(d.n, beta0);
        for (int j = 0; j < d.p; ++j) {
            if (beta[j] != 0.0) eta += beta[j] * d.xs.col(j);
        }
        return eta;
    }

    double mean_log_lik() const {
        Eigen::VectorXd eta = linear_predictor();
        double ll = 0.0;
        for (int i = 0; i < d.n; ++i) {
            double p = clamp_prob(1.0 / (1.0 + std::exp(-eta[i])));
            ll += y[i] * std::log(p) + (1.0 - y[i]) * std::log(1.0 - p);
        }
        return ll / d.n;
    }

    double true_objective(const PenaltySpec& spec, double lambda) const {
        double pen = 0.0;
        for (int j = 0; j < d.p; ++j) pen += penalty_value(spec, std::abs(beta[j]), lambda);
        return -mean_log_lik() + pen;
    }

    bool solve(double lambda, const Eigen::VectorXd& pf, FitTrace* trace) {
        const int n = d.n;
        Eigen::VectorXd w(n), wr(n);
        std::vector<double> vcache(d.p, 0.0);
        std::vector<char> vok(d.p, 0);

        for (int outer = 0; outer < kMaxOuterIrls; ++outer) {
            Eigen::VectorXd eta = linear_predictor();
            double sum_w = 0.0;
            for (int i = 0; i < n; ++i) {
                double p = 1.0 / (1.0 + std::exp(-eta[i]));
                w[i] = std::max(p * (1.0 - p), kWeightFloor);
                wr[i] = y[i] - p;  // w * working residual
                sum_w += w[i];
            }
            std::fill(vok.begin(), vok.end(), 0);
            auto vj = [&](int j) {
                if (!vok[j]) {
                    vcache[j] = (d.xs.col(j).array().square() * w.array()).sum() / n;
                    vok[j] = 1;
                }
                return vcache[j];
            };

            std::vector<double>* seg = nullptr;
            if (trace) {
                trace->descent_segments.emplace_back();
                seg = &trace->descent_segments.back();
            }
            auto surrogate = [&]() {
                double pen = 0.0;
                for (int j = 0; j < d.p; ++j) {
                    if (beta[j] != 0.0) pen += pf[j] * lambda * std::abs(beta[j]);
                }
                double loss = 0.0;
                for (int i = 0; i < n; ++i) loss += wr[i] * wr[i] / w[i];
                return loss / (2.0 * n) + pen;
            };
            if (seg) seg->push_back(surrogate());

            Eigen::VectorXd beta_before = beta;
            double beta0_before = beta0;
            int sweeps = 0;
            auto sweep = [&](bool full) {
                double max_change = 0.0;
                double d0 = wr.sum() / sum_w;
                if (d0 != 0.0) {
                    beta0 += d0;
                    wr -= d0 * w;
                    max_change = std::abs(d0);
                }
                for (int j = 0; j < d.p; ++j) {
                    if (d.constant[j]) continue;
                    double threshold = pf[j] * lambda;
                    if (!(threshold < kInf)) continue;
                    double old = beta[j];
                    if (!full && old == 0.0) continue;
                    double u = d.xs.col(j).dot(wr) / n + vj(j) * old;
                    double next = soft_threshold(u, threshold) / vj(j);
                    if (next != old) {
                        beta[j] = next;
                        wr -= (next - old) * (w.array() * d.xs.col(j).array()).matrix();
                        max_change = std::max(max_change, std::abs(next - old));
                    }
                }
                ++sweeps;
                if (seg) seg->push_back(surrogate());
                return max_change;
            };
            bool inner_ok = false;
            while (sweeps < kMaxSweeps) {
                if (sweep(true) < kCoefTol) {
                    inner_ok = true;
                    break;
                }
                while (sweeps < kMaxSweeps && sweep(false) >= kCoefTol) {
                }
            }

            double outer_change =
                std::max((beta - beta_before).lpNorm<Eigen::Infinity>(),
                         std::abs(beta0 - beta0_before));
            if (inner_ok && outer_change < kCoefTol) return true;
        }
        return false;
    }

    double intercept_original(const Eigen::VectorXd& coef_original) const {
        return beta0 - coef_original.dot(d.mean);
    }
};

template <typename Solver>
bool solve_at_lambda(Solver& solver, const PenaltySpec& spec, double lambda,
                     const Eigen::VectorXd& base_pf, FitTrace* trace) {
    if (spec.kind == PenaltyKind::lasso || spec.kind == PenaltyKind::adaptive_lasso) {
        return solver.solve(lambda, base_pf, trace);
    }
    // Local linear approximation: repeatedly solve the lasso surrogate whose
    // per-variable levels are the penalty derivative at the current iterate.
    const int p = static_cast<int>(solver.beta.size());
    auto factors = [&]() {
        Eigen::VectorXd pf(p);
        for (int j = 0; j < p; ++j) {
            pf[j] = penalty_derivative(spec, std::abs(solver.beta[j]), lambda) / lambda;
        }
        return pf;
    };
    std::vector<double>* seg = nullptr;
    if (trace) {
        trace->descent_segments.emplace_back();
        seg = &trace->descent_segments.back();
        seg->push_back(solver.true_objective(spec, lambda));
    }
    Eigen::VectorXd pf = factors();
    bool ok = true;
    for (int step = 0; step < kLlaSteps; ++step) {
        ok = solver.solve(lambda, pf, nullptr);
        if (seg) seg->push_back(solver.true_objective(spec, lambda));
        Eigen::VectorXd next = factors();
        if ((next - pf).lpNorm<Eigen::Infinity>() < 1e-8) break;
        pf = next;
    }
    return ok;
}

void check_grid(const LambdaGrid& grid) {
    if (grid.values.empty()) throw Error("bad-grid", "empty lambda grid");
    for (size_t i = 0; i < grid.values.size(); ++i) {
        if (!(grid.values[i] > 0.0)) throw Error("bad-grid", "lambda values must be positive");
        if (i > 0 && !(grid.values[i] < grid.values[i - 1])) {
            throw Error("bad-grid", "lambda values must be strictly decreasing");
        }
    }
}

}  // namespace

LambdaGrid lambda_grid(const Dataset& data, const PenaltySpec& penalty, int length) {
    if (length < 2) throw Error("bad-grid", "grid length must be at least 2");
    data.validate();
    PenaltySpec spec = penalty;
    spec.validate();
    if (spec.kind == PenaltyKind::adaptive_lasso && !spec.adaptive_weights) {
        spec.adaptive_weights = adaptive_weights(data, spec.gamma);
    }
    StandardizedDesign d = standardize(data.x);
    Eigen::VectorXd pf = base_factors(spec, d.p);
    Eigen::VectorXd r0 = data.y.array() - data.y.mean();

    double lambda_max = 0.0;
    for (int j = 0; j < d.p; ++j) {
        if (d.constant[j] || !(pf[j] > 0.0) || !(pf[j] < kInf)) continue;
        lambda_max = std::max(lambda_max, std::abs(d.xs.col(j).dot(r0)) / (d.n * pf[j]));
    }
    if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) lambda_max = 1.0;

    double ratio = d.n < d.p ? 1e-2 : 1e-4;
    LambdaGrid grid;
    grid.values.resize(length);
    for (int i = 0; i < length; ++i) {
        grid.values[i] = lambda_max * std::pow(ratio, static_cast<double>(i) / (length - 1));
    }
    return grid;
}

PathSolution fit_path(const Dataset& data, const PenaltySpec& penalty, const LambdaGrid& grid,
                      FitTrace* trace) {
    data.validate();
    check_grid(grid);
    PenaltySpec spec = penalty;
    spec.validate();
    if (spec.kind == PenaltyKind::adaptive_lasso && !spec.adaptive_weights) {
        spec.adaptive_weights = adaptive_weights(data, spec.gamma);
    }
    StandardizedDesign d = standardize(data.x);
    Eigen::VectorXd base_pf = base_factors(spec, d.p);

    PathSolution out;
    out.grid = grid;
    out.family = data.family;
    out.penalty = spec;
    const int len = grid.length();
    out.intercepts.reserve(len);
    out.coefficients.reserve(len);
    out.supports.reserve(len);
    out.converged.reserve(len);

    auto run = [&](auto& solver) {
        for (double lambda : grid.values) {
            bool ok = solve_at_lambda(solver, spec, lambda, base_pf, trace);
            Eigen::VectorXd coef = solver.beta.array() / d.sd.array();
            std::vector<int> nonzero;
            for (int j = 0; j < d.p; ++j) {
                if (solver.beta[j] != 0.0) nonzero.push_back(j + 1);
            }
            out.intercepts.push_back(solver.intercept_original(coef));
            out.coefficients.push_back(std::move(coef));
            out.supports.emplace_back(std::move(nonzero));
            out.converged.push_back(ok ? 1 : 0);
        }
    };
    if (data.family == Family::gaussian) {
        GaussianCd solver(d, data.y);
        run(solver);
    } else {
        BinomialCd solver(d, data.y);
        run(solver);
    }
    return out;
}

namespace {

std::vector<int> make_folds(const Dataset& data, int folds, uint64_t seed) {
    const int n = data.n();
    if (folds < 2) throw Error("bad-folds", "cross-validation needs at least 2 folds");
    if (n < folds) throw Error("bad-folds", "more folds than observations");
    std::vector<int> assignment(n, 0);
    if (data.family == Family::gaussian) {
        Rng rng = Rng::derive(seed, {0});
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        rng.shuffle(order);
        for (int i = 0; i < n; ++i) assignment[order[i]] = i % folds;
        return assignment;
    }
    // Stratified: deal each class round-robin, then require every training
    // side to contain both classes.
    for (int attempt = 0; attempt < 20; ++attempt) {
        Rng rng = Rng::derive(seed, {static_cast<uint64_t>(attempt)});
        std::vector<int> class0, class1;
        for (int i = 0; i < n; ++i) (data.y[i] == 1.0 ? class1 : class0).push_back(i);
        rng.shuffle(class0);
        rng.shuffle(class1);
        for (size_t i = 0; i < class0.size(); ++i) assignment[class0[i]] = i % folds;
        for (size_t i = 0; i < class1.size(); ++i) assignment[class1[i]] = i % folds;
        std::vector<int> fold0(folds, 0), fold1(folds, 0);
        for (int i = 0; i < n; ++i) (data.y[i] == 1.0 ? fold1 : fold0)[assignment[i]]++;
        bool ok = true;
        int c0 = static_cast<int>(class0.size());
        int c1 = static_cast<int>(class1.size());
        for (int f = 0; f < folds && ok; ++f) {
            if (c0 - fold0[f] < 1 || c1 - fold1[f] < 1) ok = false;
        }
        if (ok) return assignment;
    }
    throw Error("fold-stratification", "cannot build folds whose training sides keep both classes");
}

}  // namespace

CvResult cv_select(const Dataset& data, const PenaltySpec& penalty, int folds, uint64_t seed) {
    data.validate();
    PenaltySpec spec = penalty;
    spec.validate();
    if (spec.kind == PenaltyKind::adaptive_lasso && !spec.adaptive_weights) {
        spec.adaptive_weights = adaptive_weights(data, spec.gamma, folds, Rng::derive(seed, {1}).below(1ull << 62));
    }

    CvResult result;
    result.grid = lambda_grid(data, spec);
    result.fold_assignment = make_folds(data, folds, seed);
    const int len = result.grid.length();
    const int n = data.n();
    result.cv_losses.assign(len, 0.0);

    for (int f = 0; f < folds; ++f) {
        std::vector<int> train_rows, test_rows;
        for (int i = 0; i < n; ++i) {
            (result.fold_assignment[i] == f ? test_rows : train_rows).push_back(i);
        }
        Dataset train = data.subset(train_rows);
        PathSolution path = fit_path(train, spec, result.grid);
        for (int li = 0; li < len; ++li) {
            const auto& support = path.supports[li].indices();
            const Eigen::VectorXd& coef = path.coefficients[li];
            for (int row : test_rows) {
                double eta = path.intercepts[li];
                for (int j : support) eta += coef[j - 1] * data.x(row, j - 1);
                if (data.family == Family::gaussian) {
                    double r = data.y[row] - eta;
                    result.cv_losses[li] += r * r;
                } else {
                    double p = clamp_prob(1.0 / (1.0 + std::exp(-eta)));
                    result.cv_losses[li] +=
                        -2.0 * (data.y[row] * std::log(p) + (1.0 - data.y[row]) * std::log(1.0 - p));
                }
            }
        }
    }
    for (double& loss : result.cv_losses) loss /= n;

    int best = 0;
    for (int li = 1; li < len; ++li) {
        if (result.cv_losses[li] < result.cv_losses[best]) best = li;  // ties keep larger lambda
    }
    result.chosen_index = best;
    result.chosen_lambda = result.grid.values[best];
    return result;
}

Eigen::VectorXd adaptive_weights_from_pilot(const Eigen::VectorXd& pilot, double gamma) {
    Eigen::VectorXd w(pilot.size());
    for (int j = 0; j < pilot.size(); ++j) {
        w[j] = pilot[j] == 0.0 ? kInf : std::pow(std::abs(pilot[j]), -gamma);
    }
    return w;
}

Eigen::VectorXd adaptive_weights(const Dataset& data, double gamma, int folds, uint64_t seed) {
    CvResult cv = cv_select(data, PenaltySpec::lasso(), folds, seed);
    PathSolution path = fit_path(data, PenaltySpec::lasso(), cv.grid);
    StandardizedDesign d = standardize(data.x);
    Eigen::VectorXd pilot_standardized =
        path.coefficients[cv.chosen_index].array() * d.sd.array();
    return adaptive_weights_from_pilot(pilot_standardized, gamma);
}

}  // namespace pavi
