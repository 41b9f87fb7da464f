#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <set>
#include <vector>

#include "pavi/ensemble.hpp"
#include "pavi/errors.hpp"
#include "pavi/glm.hpp"
#include "pavi/rng.hpp"
#include "pavi/simharness.hpp"

using namespace pavi;

namespace {

VariableSet vs(std::initializer_list<int> indices) {
    return VariableSet(std::vector<int>(indices));
}

PathSolution synthetic_path(PenaltyKind kind, const std::vector<VariableSet>& supports) {
    PathSolution path;
    path.penalty.kind = kind;
    path.family = Family::gaussian;
    for (size_t i = 0; i < supports.size(); ++i) {
        path.grid.values.push_back(1.0 / (i + 1));
        path.supports.push_back(supports[i]);
        path.intercepts.push_back(0.0);
        path.coefficients.emplace_back();
        path.converged.push_back(1);
    }
    return path;
}

Dataset binomial_toy(Rng& rng, int n, int p, double strength = 1.5) {
    Eigen::MatrixXd x(n, p);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) x(i, j) = rng.normal();
        double eta = strength * x(i, 0);
        y[i] = rng.bernoulli(1.0 / (1.0 + std::exp(-eta))) ? 1.0 : 0.0;
    }
    return Dataset{x, y, Family::binomial, {}};
}

}  // namespace

TEST_CASE("candidate collection unions, dedups and keeps the empty model") {
    PathSolution a =
        synthetic_path(PenaltyKind::lasso, {vs({}), vs({1}), vs({1, 2}), vs({1, 2})});
    PathSolution b = synthetic_path(PenaltyKind::mcp, {vs({1}), vs({3}), vs({1, 2, 3})});
    CandidateSet set = collect_candidates({a, b});

    std::set<VariableSet> expected = {vs({}), vs({1}), vs({1, 2}), vs({3}), vs({1, 2, 3})};
    std::set<VariableSet> got(set.members.begin(), set.members.end());
    CHECK(got == expected);
    CHECK(set.members.size() == 5);

    // max_size drops large members but never the empty model.
    CandidateSet capped = collect_candidates({a, b}, 2);
    for (const auto& member : capped.members) CHECK(member.size() <= 2);
    CHECK(std::count(capped.members.begin(), capped.members.end(), vs({})) == 1);

    // paths without an empty support still yield the intercept-only model
    PathSolution c = synthetic_path(PenaltyKind::scad, {vs({4}), vs({4, 5})});
    CandidateSet with_empty = collect_candidates({c});
    CHECK(std::count(with_empty.members.begin(), with_empty.members.end(), vs({})) == 1);

    CHECK_THROWS_AS(collect_candidates({}), Error);
}

TEST_CASE("provenance tags name the solver and lambda index") {
    PathSolution a = synthetic_path(PenaltyKind::lasso, {vs({}), vs({7})});
    CandidateSet set = collect_candidates({a});
    for (size_t k = 0; k < set.members.size(); ++k) {
        if (set.members[k] == vs({7})) {
            REQUIRE(set.provenance[k].size() == 1);
            CHECK(set.provenance[k][0].first == PenaltyKind::lasso);
            CHECK(set.provenance[k][0].second == 1);
        }
    }
}

TEST_CASE("all subsets enumeration") {
    CHECK(all_subsets(3).members.size() == 8);
    CHECK(all_subsets(0).members.size() == 1);
    CandidateSet big = all_subsets(10);
    std::set<VariableSet> distinct(big.members.begin(), big.members.end());
    CHECK(distinct.size() == 1024);
    CHECK_THROWS_AS(all_subsets(21), Error);
}

TEST_CASE("complexity prior values") {
    CHECK(complexity_prior(0, 5) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-14));
    CHECK(complexity_prior(2, 8) ==
          doctest::Approx(2.0 * std::log(4.0 * std::exp(1.0)) + 2.0 * std::log(4.0))
              .epsilon(1e-14));
    for (int s : {1, 3, 7}) {
        CHECK(complexity_prior(s, 50) > complexity_prior(s, 20));
    }
    CHECK_THROWS_AS(complexity_prior(-1, 5), Error);
    CHECK_THROWS_AS(complexity_prior(6, 5), Error);
}

TEST_CASE("log-score normalization matches the closed form") {
    // log lik (-10, -12), s=(1,1), n=100, p=8, psi=1: the complexity terms
    // cancel and the weight ratio is exp(2).
    double n = 100.0, psi = 1.0;
    auto score = [&](double ll) {
        double bic = -2.0 * ll + 1.0 * std::log(n);
        return -bic / 2.0 - psi * complexity_prior(1, 8);
    };
    std::vector<double> w = weights_from_log_scores({score(-10.0), score(-12.0)});
    double e2 = std::exp(2.0);
    CHECK(w[0] == doctest::Approx(e2 / (1.0 + e2)).epsilon(1e-12));
    CHECK(w[1] == doctest::Approx(1.0 / (1.0 + e2)).epsilon(1e-12));

    // Underflow-proof: scores around -10^5 still normalize to finite weights.
    std::vector<double> deep = weights_from_log_scores({-1e5, -1e5 - 3.0, -1e5 - 700.0});
    CHECK(deep[0] + deep[1] + deep[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(deep[0] > 0.95);
}

TEST_CASE("bicp weights: symmetry, psi monotonicity, pure-BIC reduction") {
    Rng rng(101);
    const int n = 80;
    Eigen::MatrixXd x(n, 3);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        x(i, 0) = rng.normal();
        x(i, 1) = x(i, 0);  // exact duplicate column
        x(i, 2) = rng.normal();
        y[i] = rng.bernoulli(1.0 / (1.0 + std::exp(-1.2 * x(i, 0)))) ? 1.0 : 0.0;
    }
    Dataset data{x, y, Family::binomial, {}};

    CandidateSet duo;
    duo.members = {vs({1}), vs({2})};
    duo.provenance.resize(2);
    WeightingConfig config;
    config.method = WeightingMethod::bicp;
    CandidateEnsemble equal = bicp_weights(data, duo, config);
    CHECK(equal.weights[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(equal.weights[1] == doctest::Approx(0.5).epsilon(1e-12));

    // {1} vs {1,2}: identical fitted values, so log lik ties and the bigger
    // support loses ground as psi grows.
    CandidateSet nested;
    nested.members = {vs({1}), vs({1, 2})};
    nested.provenance.resize(2);
    double previous_share = 1.0;
    for (double psi : {0.0, 1.0, 2.0}) {
        WeightingConfig c = config;
        c.psi = psi;
        CandidateEnsemble e = bicp_weights(data, nested, c);
        double share = e.weights[1];
        CHECK(share < previous_share);
        previous_share = share;
    }

    // psi = 0 reduces to pure BIC weighting.
    WeightingConfig plain = config;
    plain.psi = 0.0;
    CandidateSet trio;
    trio.members = {vs({}), vs({1}), vs({3})};
    trio.provenance.resize(3);
    CandidateEnsemble got = bicp_weights(data, trio, plain);
    std::vector<double> direct_scores;
    for (const auto& member : trio.members) {
        FittedModel fit = fit_model(data, member);
        direct_scores.push_back(
            -(-2.0 * fit.log_lik + member.size() * std::log(double(n))) / 2.0);
    }
    std::vector<double> direct = weights_from_log_scores(direct_scores);
    for (size_t k = 0; k < 3; ++k) {
        CHECK(got.weights[k] == doctest::Approx(direct[k]).epsilon(1e-12));
    }
}

TEST_CASE("arm weights: duplicate-column symmetry and single-candidate normalization") {
    Rng rng(103);
    const int n = 60;
    Eigen::MatrixXd x(n, 2);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        x(i, 0) = rng.normal();
        x(i, 1) = x(i, 0);
        y[i] = rng.bernoulli(1.0 / (1.0 + std::exp(-x(i, 0)))) ? 1.0 : 0.0;
    }
    Dataset data{x, y, Family::binomial, {}};

    CandidateSet duo;
    duo.members = {vs({1}), vs({2})};
    duo.provenance.resize(2);
    WeightingConfig config;
    config.method = WeightingMethod::arm;
    config.psi = 0.0;
    config.splits_L = 7;
    config.seed = 5;
    CandidateEnsemble e = arm_weights(data, duo, config);
    CHECK(e.weights[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(e.weights[1] == doctest::Approx(0.5).epsilon(1e-12));

    CandidateSet solo;
    solo.members = {vs({2})};
    solo.provenance.resize(1);
    CandidateEnsemble single = arm_weights(data, solo, config);
    CHECK(single.weights[0] == 1.0);
}

TEST_CASE("arm weights match a direct evaluation of the split products") {
    Rng rng(107);
    Dataset data = binomial_toy(rng, 24, 3);
    CandidateSet candidates;
    candidates.members = {vs({1}), vs({2, 3})};
    candidates.provenance.resize(2);

    WeightingConfig config;
    config.method = WeightingMethod::arm;
    config.psi = 1.0;
    config.splits_L = 1;
    config.seed = 42;

    CandidateEnsemble got = arm_weights(data, candidates, config);

    // Direct evaluation: same split, explicit Bernoulli products in the log
    // domain, prior factor e^{-psi C_k}, hand normalization.
    auto [train_rows, test_rows] = arm_split(data, config, 0);
    Dataset train = data.subset(train_rows);
    std::vector<double> raw(candidates.members.size());
    for (size_t k = 0; k < candidates.members.size(); ++k) {
        FittedModel fit = fit_logistic(train, candidates.members[k]);
        double log_product = 0.0;
        for (int row : test_rows) {
            double eta = fit.intercept;
            const auto& idx = candidates.members[k].indices();
            for (size_t j = 0; j < idx.size(); ++j) {
                eta += fit.coefficients[j] * data.x(row, idx[j] - 1);
            }
            double p = 1.0 / (1.0 + std::exp(-eta));
            p = std::min(std::max(p, 1e-10), 1.0 - 1e-10);
            log_product += data.y[row] * std::log(p) + (1.0 - data.y[row]) * std::log(1.0 - p);
        }
        raw[k] = -config.psi * complexity_prior(candidates.members[k].size(), data.p()) +
                 log_product;
    }
    double shift = std::max(raw[0], raw[1]);
    double total = std::exp(raw[0] - shift) + std::exp(raw[1] - shift);
    for (size_t k = 0; k < 2; ++k) {
        CHECK(got.weights[k] ==
              doctest::Approx(std::exp(raw[k] - shift) / total).epsilon(1e-12));
    }
}

TEST_CASE("arm weights for the gaussian family use the training scale") {
    Rng rng(109);
    const int n = 30;
    Eigen::MatrixXd x(n, 2);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        x(i, 0) = rng.normal();
        x(i, 1) = rng.normal();
        y[i] = 2.0 * x(i, 0) + 0.4 * rng.normal();
    }
    Dataset data{x, y, Family::gaussian, {}};
    CandidateSet candidates;
    candidates.members = {vs({1}), vs({2})};
    candidates.provenance.resize(2);
    WeightingConfig config;
    config.method = WeightingMethod::arm;
    config.splits_L = 1;
    config.seed = 9;

    CandidateEnsemble got = arm_weights(data, candidates, config);

    auto [train_rows, test_rows] = arm_split(data, config, 0);
    Dataset train = data.subset(train_rows);
    std::vector<double> raw(2);
    for (size_t k = 0; k < 2; ++k) {
        FittedModel fit = fit_gaussian(train, candidates.members[k]);
        double sigma = *fit.sigma_hat;
        double kernel = 0.0;
        for (int row : test_rows) {
            double pred =
                fit.intercept +
                fit.coefficients[0] * data.x(row, candidates.members[k].indices()[0] - 1);
            double r = data.y[row] - pred;
            kernel += -std::log(sigma) - r * r / (2.0 * sigma * sigma);
        }
        raw[k] = -config.psi * complexity_prior(1, 2) + kernel;
    }
    double shift = std::max(raw[0], raw[1]);
    double total = std::exp(raw[0] - shift) + std::exp(raw[1] - shift);
    CHECK(got.weights[0] == doctest::Approx(std::exp(raw[0] - shift) / total).epsilon(1e-12));

    // The informative variable should dominate.
    CHECK(got.weights[0] > 0.9);
}

TEST_CASE("ensemble invariants hold on path-derived candidates") {
    Rng rng(113);
    Dataset data = binomial_toy(rng, 100, 6);
    std::vector<PathSolution> paths;
    for (PenaltySpec spec : {PenaltySpec::lasso(), PenaltySpec::scad(), PenaltySpec::mcp()}) {
        paths.push_back(fit_path(data, spec, lambda_grid(data, spec, 40)));
    }
    CandidateSet candidates = collect_candidates(paths);

    for (WeightingMethod method : {WeightingMethod::arm, WeightingMethod::bicp}) {
        WeightingConfig config;
        config.method = method;
        config.splits_L = 5;
        config.seed = 17;
        CandidateEnsemble e = compute_weights(data, candidates, config);
        e.validate();  // nonnegative, sums to 1 within 1e-10, distinct members
    }
}

TEST_CASE("log-domain safety at n = 500") {
    // Bernoulli products over 250 held-out points underflow far past 1e-300;
    // the log-domain weights stay finite and normalized.
    Rng rng(127);
    Dataset data = binomial_toy(rng, 500, 4, 0.4);
    CandidateSet candidates;
    candidates.members = {vs({}), vs({1}), vs({2}), vs({1, 2}), vs({3, 4})};
    candidates.provenance.resize(candidates.members.size());
    WeightingConfig config;
    config.method = WeightingMethod::arm;
    config.splits_L = 3;
    config.seed = 23;
    CandidateEnsemble e = arm_weights(data, candidates, config);
    double total = 0.0;
    for (double w : e.weights) {
        CHECK(std::isfinite(w));
        CHECK(w >= 0.0);
        total += w;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("arm determinism and thread invariance") {
    Rng rng(131);
    Dataset data = binomial_toy(rng, 60, 5);
    std::vector<PathSolution> paths = {
        fit_path(data, PenaltySpec::lasso(), lambda_grid(data, PenaltySpec::lasso(), 30))};
    CandidateSet candidates = collect_candidates(paths);

    WeightingConfig config;
    config.method = WeightingMethod::arm;
    config.splits_L = 12;
    config.seed = 77;

    CandidateEnsemble base = arm_weights(data, candidates, config);
    CandidateEnsemble again = arm_weights(data, candidates, config);
    CHECK(base.weights == again.weights);  // bit-identical

    for (int threads : {2, 8}) {
        WeightingConfig parallel = config;
        parallel.threads = threads;
        CandidateEnsemble threaded = arm_weights(data, candidates, parallel);
        CHECK(threaded.weights == base.weights);
    }
}

TEST_CASE("permuting candidates permutes weights identically") {
    Rng rng(137);
    Dataset data = binomial_toy(rng, 70, 5);
    CandidateSet forward;
    forward.members = {vs({}), vs({1}), vs({2}), vs({1, 3})};
    forward.provenance.resize(4);
    CandidateSet backward;
    backward.members = {vs({1, 3}), vs({2}), vs({1}), vs({})};
    backward.provenance.resize(4);

    WeightingConfig config;
    config.method = WeightingMethod::bicp;
    CandidateEnsemble f = bicp_weights(data, forward, config);
    CandidateEnsemble b = bicp_weights(data, backward, config);
    for (int k = 0; k < 4; ++k) {
        CHECK(f.weights[k] == doctest::Approx(b.weights[3 - k]).epsilon(1e-15));
    }
}

TEST_CASE("unfittable candidates get zero weight; all-unfittable errors") {
    Rng rng(139);
    Dataset data = binomial_toy(rng, 10, 9);
    CandidateSet candidates;
    candidates.members = {vs({}), vs({1, 2, 3, 4, 5, 6, 7, 8, 9})};
    candidates.provenance.resize(2);
    WeightingConfig config;
    config.method = WeightingMethod::bicp;
    CandidateEnsemble e = bicp_weights(data, candidates, config);
    CHECK(e.weights[1] == 0.0);
    CHECK(e.weights[0] == 1.0);

    CandidateSet hopeless;
    hopeless.members = {vs({1, 2, 3, 4, 5, 6, 7, 8, 9})};
    hopeless.provenance.resize(1);
    CHECK_THROWS_AS(bicp_weights(data, hopeless, config), Error);
    WeightingConfig arm_config = config;
    arm_config.method = WeightingMethod::arm;
    arm_config.splits_L = 2;
    CHECK_THROWS_AS(arm_weights(data, hopeless, arm_config), Error);
}

TEST_CASE("weighted symmetric-difference ratio shrinks with n under bicp") {
    // Empirical weak-consistency check on design-1-style data.
    const std::vector<int> sizes = {200, 1000, 5000};
    std::vector<double> averages;
    for (int n : sizes) {
        double total = 0.0;
        for (int seed = 0; seed < 20; ++seed) {
            ScenarioSpec spec;
            spec.example_id = 1;
            spec.family = Family::binomial;
            spec.n = n;
            spec.seed = 9000 + seed;
            Scenario scenario = generate_scenario(spec);

            std::vector<PathSolution> paths;
            for (PenaltySpec pen :
                 {PenaltySpec::lasso(), PenaltySpec::scad(), PenaltySpec::mcp()}) {
                paths.push_back(
                    fit_path(scenario.data, pen, lambda_grid(scenario.data, pen, 50)));
            }
            WeightingConfig config;
            config.method = WeightingMethod::bicp;
            CandidateEnsemble e =
                bicp_weights(scenario.data, collect_candidates(paths), config);
            double statistic = 0.0;
            for (size_t k = 0; k < e.candidates.size(); ++k) {
                statistic += e.weights[k] *
                             sym_diff_size(e.candidates[k], scenario.true_support) /
                             static_cast<double>(scenario.true_support.size());
            }
            total += statistic;
        }
        averages.push_back(total / 20.0);
    }
    CHECK(averages[1] < averages[0]);
    CHECK(averages[2] < averages[1]);
}
