#include "pavi/glm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>

#include "pavi/errors.hpp"

namespace pavi {

namespace {

constexpr double kProbClamp = 1e-10;
constexpr double kSigmaFloor = 1e-8;
constexpr double kIrlsTol = 1e-8;
constexpr int kIrlsMaxIter = 100;
constexpr int kMaxHalvings = 20;

double clamp_prob(double p) { return std::min(std::max(p, kProbClamp), 1.0 - kProbClamp); }

// [1, x_support] design for a restricted fit.
Eigen::MatrixXd restricted_design(const Dataset& data, const VariableSet& support) {
    const int n = data.n();
    const int s = support.size();
    if (support.max_index() > data.p()) {
        throw Error("dimension-mismatch", "support index exceeds design dimension",
                    std::to_string(support.max_index()) + " > p=" + std::to_string(data.p()));
    }
    Eigen::MatrixXd z(n, s + 1);
    z.col(0).setOnes();
    for (int j = 0; j < s; ++j) z.col(j + 1) = data.x.col(support.indices()[j] - 1);
    return z;
}

void check_capacity(const Dataset& data, const VariableSet& support) {
    if (support.size() > data.n() - 2) {
        throw Error("support-capacity", "support exceeds capacity",
                    std::to_string(support.size()) + " > n-2=" + std::to_string(data.n() - 2));
    }
}

double binomial_log_lik(const Eigen::VectorXd& y, const Eigen::VectorXd& eta) {
    double ll = 0.0;
    for (int i = 0; i < y.size(); ++i) {
        double p = clamp_prob(1.0 / (1.0 + std::exp(-eta[i])));
        ll += y[i] * std::log(p) + (1.0 - y[i]) * std::log(1.0 - p);
    }
    return ll;
}

}  // namespace

Eigen::VectorXd FittedModel::linear_predictor(const Eigen::MatrixXd& x) const {
    if (support.max_index() > x.cols()) {
        throw Error("dimension-mismatch", "support index exceeds design dimension",
                    std::to_string(support.max_index()) + " > p=" + std::to_string(x.cols()));
    }
    Eigen::VectorXd eta = Eigen::VectorXd::Constant(x.rows(), intercept);
    for (int j = 0; j < support.size(); ++j) {
        eta += coefficients[j] * x.col(support.indices()[j] - 1);
    }
    return eta;
}

FittedModel fit_gaussian(const Dataset& data, const VariableSet& support) {
    if (data.family != Family::gaussian) {
        throw Error("family-mismatch", "fit_gaussian requires a gaussian dataset");
    }
    check_capacity(data, support);
    const int n = data.n();
    const int s = support.size();

    Eigen::MatrixXd z = restricted_design(data, support);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(z);
    Eigen::VectorXd beta = cod.solve(data.y);  // minimal-norm when rank-deficient

    FittedModel model;
    model.family = Family::gaussian;
    model.support = support;
    model.intercept = beta[0];
    model.coefficients = beta.tail(s);
    model.converged = cod.rank() == s + 1;

    double rss = (data.y - z * beta).squaredNorm();
    double sigma = std::max(std::sqrt(rss / n), kSigmaFloor);
    model.sigma_hat = sigma;
    model.log_lik = -0.5 * n * std::log(2.0 * M_PI) - n * std::log(sigma) -
                    rss / (2.0 * sigma * sigma);
    return model;
}

FittedModel fit_logistic(const Dataset& data, const VariableSet& support,
                         std::vector<double>* log_lik_trace) {
    if (data.family != Family::binomial) {
        throw Error("family-mismatch", "fit_logistic requires a binomial dataset");
    }
    for (int i = 0; i < data.n(); ++i) {
        if (data.y[i] != 0.0 && data.y[i] != 1.0) {
            throw Error("non-binary-response", "binomial response must be 0 or 1",
                        "row " + std::to_string(i + 1));
        }
    }
    check_capacity(data, support);
    const int n = data.n();
    const int s = support.size();

    Eigen::MatrixXd z = restricted_design(data, support);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_probe(z);
    const bool full_rank = rank_probe.rank() == s + 1;

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(s + 1);
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
    double ll = binomial_log_lik(data.y, eta);
    if (log_lik_trace) log_lik_trace->push_back(ll);

    bool converged = false;
    bool stalled = false;
    Eigen::VectorXd prob(n), w(n), work(n);
    for (int iter = 0; iter < kIrlsMaxIter; ++iter) {
        for (int i = 0; i < n; ++i) {
            prob[i] = clamp_prob(1.0 / (1.0 + std::exp(-eta[i])));
            w[i] = prob[i] * (1.0 - prob[i]);
            work[i] = eta[i] + (data.y[i] - prob[i]) / w[i];
        }
        Eigen::VectorXd proposal;
        if (full_rank) {
            Eigen::MatrixXd ztwz = z.transpose() * w.asDiagonal() * z;
            Eigen::VectorXd ztwy = z.transpose() * (w.asDiagonal() * work);
            proposal = ztwz.ldlt().solve(ztwy);
        } else {
            Eigen::VectorXd sw = w.cwiseSqrt();
            Eigen::MatrixXd zw = sw.asDiagonal() * z;
            proposal = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(zw).solve(
                sw.asDiagonal() * work);
        }

        // Step-halving toward the previous iterate whenever the proposal
        // decreases the likelihood; keeps the per-iteration trace monotone.
        Eigen::VectorXd candidate = proposal;
        Eigen::VectorXd candidate_eta = z * candidate;
        double candidate_ll = binomial_log_lik(data.y, candidate_eta);
        int halvings = 0;
        while (candidate_ll < ll && halvings < kMaxHalvings) {
            candidate = 0.5 * (candidate + beta);
            candidate_eta = z * candidate;
            candidate_ll = binomial_log_lik(data.y, candidate_eta);
            ++halvings;
        }
        if (candidate_ll < ll) {
            stalled = true;  // separation or numerical limit
            break;
        }

        double change = candidate_ll - ll;
        beta = candidate;
        eta = candidate_eta;
        ll = candidate_ll;
        if (log_lik_trace) log_lik_trace->push_back(ll);

        if (ll > -1e-6) break;  // perfect fit under clamping: separation
        if (change < kIrlsTol * (std::abs(ll) + kIrlsTol)) {
            converged = true;
            break;
        }
    }

    FittedModel model;
    model.family = Family::binomial;
    model.support = support;
    model.intercept = beta[0];
    model.coefficients = beta.tail(s);
    model.log_lik = ll;
    model.converged = converged && full_rank && !stalled;
    return model;
}

FittedModel fit_model(const Dataset& data, const VariableSet& support) {
    return data.family == Family::gaussian ? fit_gaussian(data, support)
                                           : fit_logistic(data, support);
}

double holdout_log_lik(const FittedModel& model, const Dataset& test) {
    if (model.family != test.family) {
        throw Error("family-mismatch", "holdout family differs from model family");
    }
    Eigen::VectorXd eta = model.linear_predictor(test.x);
    if (model.family == Family::binomial) {
        return binomial_log_lik(test.y, eta);
    }
    if (!model.sigma_hat) {
        throw Error("bad-model", "gaussian model is missing sigma_hat");
    }
    double sigma = *model.sigma_hat;
    double ll = 0.0;
    for (int i = 0; i < test.n(); ++i) {
        double r = test.y[i] - eta[i];
        ll += -std::log(sigma) - r * r / (2.0 * sigma * sigma);
    }
    return ll;
}

FitDiagnostics diagnostics(const FittedModel& model, const Dataset& data) {
    FitDiagnostics d;
    const double k = model.support.size() + 1;
    d.aic = -2.0 * model.log_lik + 2.0 * k;
    d.bic = -2.0 * model.log_lik + k * std::log(static_cast<double>(data.n()));
    if (model.family == Family::binomial) {
        d.deviance = -2.0 * model.log_lik;  // saturated log-likelihood is 0
    } else {
        Eigen::VectorXd eta = model.linear_predictor(data.x);
        d.deviance = (data.y - eta).squaredNorm();  // unit-dispersion convention
    }
    return d;
}

}  // namespace pavi
