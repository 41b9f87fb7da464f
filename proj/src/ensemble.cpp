#include "pavi/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "pavi/errors.hpp"
#include "pavi/glm.hpp"
#include "pavi/parallel.hpp"
#include "pavi/rng.hpp"

namespace pavi {

namespace {

const double kNegInf = -std::numeric_limits<double>::infinity();

// Train rows for one ARM split; binomial splits are stratified so both
// classes land in the training half whenever the data has both.
std::vector<int> split_train_rows(const Dataset& data, int n_train, Rng& rng) {
    const int n = data.n();
    std::vector<int> rows;
    if (data.family == Family::binomial) {
        std::vector<int> class0, class1;
        for (int i = 0; i < n; ++i) (data.y[i] == 1.0 ? class1 : class0).push_back(i);
        if (!class0.empty() && !class1.empty()) {
            rng.shuffle(class0);
            rng.shuffle(class1);
            int take1 = static_cast<int>(
                std::floor(static_cast<double>(n_train) * class1.size() / n));
            take1 = std::clamp(take1, 1, static_cast<int>(class1.size()) - 1);
            int take0 = n_train - take1;
            take0 = std::clamp(take0, 1, static_cast<int>(class0.size()) - 1);
            rows.assign(class1.begin(), class1.begin() + take1);
            rows.insert(rows.end(), class0.begin(), class0.begin() + take0);
            std::sort(rows.begin(), rows.end());
            return rows;
        }
    }
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    rows.assign(order.begin(), order.begin() + n_train);
    std::sort(rows.begin(), rows.end());
    return rows;
}

}  // namespace

std::string weighting_name(WeightingMethod method) {
    return method == WeightingMethod::arm ? "arm" : "bicp";
}

WeightingMethod parse_weighting(const std::string& name) {
    if (name == "arm") return WeightingMethod::arm;
    if (name == "bicp" || name == "bic-p") return WeightingMethod::bicp;
    throw Error("bad-weighting", "unknown weighting (expected arm or bicp)", name);
}

void WeightingConfig::validate() const {
    if (!(psi >= 0.0)) throw Error("bad-config", "psi must be nonnegative");
    if (splits_L < 1) throw Error("bad-config", "splits_L must be at least 1");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw Error("bad-config", "train_fraction must lie in (0,1)");
    }
}

CandidateSet collect_candidates(const std::vector<PathSolution>& paths,
                                std::optional<int> max_size) {
    if (paths.empty()) throw Error("bad-input", "collect_candidates needs at least one path");
    std::map<VariableSet, std::vector<std::pair<PenaltyKind, int>>> seen;
    for (const auto& path : paths) {
        for (size_t i = 0; i < path.supports.size(); ++i) {
            const VariableSet& support = path.supports[i];
            if (max_size && support.size() > *max_size) continue;
            seen[support].emplace_back(path.penalty.kind, static_cast<int>(i));
        }
    }
    seen.try_emplace(VariableSet{});  // intercept-only model always present
    CandidateSet out;
    out.members.reserve(seen.size());
    out.provenance.reserve(seen.size());
    for (auto& [support, tags] : seen) {
        out.members.push_back(support);
        out.provenance.push_back(std::move(tags));
    }
    return out;
}

CandidateSet all_subsets(int p) {
    if (p < 0) throw Error("bad-input", "p must be nonnegative");
    if (p > 20) {
        throw Error("subset-limit", "all-subset enumeration is limited to p <= 20",
                    std::to_string(p));
    }
    CandidateSet out;
    const size_t count = size_t{1} << p;
    out.members.reserve(count);
    out.provenance.resize(count);
    for (size_t mask = 0; mask < count; ++mask) {
        std::vector<int> indices;
        for (int j = 0; j < p; ++j) {
            if (mask & (size_t{1} << j)) indices.push_back(j + 1);
        }
        out.members.emplace_back(std::move(indices));
    }
    return out;
}

double complexity_prior(int s, int p) {
    if (s < 0 || p < 1 || s > p) {
        throw Error("bad-input", "complexity prior needs 0 <= s <= p, p >= 1",
                    "s=" + std::to_string(s) + " p=" + std::to_string(p));
    }
    double size_term =
        s == 0 ? 0.0 : s * std::log(std::exp(1.0) * p / static_cast<double>(s));
    return size_term + 2.0 * std::log(static_cast<double>(s) + 2.0);
}

std::vector<double> weights_from_log_scores(const std::vector<double>& scores) {
    double best = kNegInf;
    for (double s : scores) best = std::max(best, s);
    if (best == kNegInf) {
        throw Error("no-fittable-candidate", "every candidate score is -inf");
    }
    std::vector<double> weights(scores.size(), 0.0);
    double total = 0.0;
    for (size_t k = 0; k < scores.size(); ++k) {
        if (scores[k] > kNegInf) {
            weights[k] = std::exp(scores[k] - best);
            total += weights[k];
        }
    }
    for (double& w : weights) w /= total;
    return weights;
}

std::pair<std::vector<int>, std::vector<int>> arm_split(const Dataset& data,
                                                        const WeightingConfig& config,
                                                        int split_index) {
    const int n = data.n();
    const int n_train = static_cast<int>(std::floor(n * config.train_fraction));
    if (n_train < 1 || n_train >= n) {
        throw Error("bad-config", "train fraction leaves an empty half",
                    "n_train=" + std::to_string(n_train));
    }
    Rng rng = Rng::derive(config.seed, {static_cast<uint64_t>(split_index)});
    std::vector<int> train = split_train_rows(data, n_train, rng);
    std::vector<int> test;
    test.reserve(n - train.size());
    size_t cursor = 0;
    for (int i = 0; i < n; ++i) {
        if (cursor < train.size() && train[cursor] == i) {
            ++cursor;
        } else {
            test.push_back(i);
        }
    }
    return {train, test};
}

CandidateEnsemble arm_weights(const Dataset& data, const CandidateSet& candidates,
                              const WeightingConfig& config) {
    data.validate();
    config.validate();
    if (candidates.members.empty()) throw Error("bad-input", "empty candidate set");
    const int n = data.n();
    const int p = data.p();
    const int n_train = static_cast<int>(std::floor(n * config.train_fraction));
    if (n_train < 1 || n_train >= n) {
        throw Error("bad-config", "train fraction leaves an empty half",
                    "n_train=" + std::to_string(n_train));
    }
    const size_t K = candidates.members.size();

    std::vector<double> prior(K);
    bool any_fittable = false;
    for (size_t k = 0; k < K; ++k) {
        prior[k] = config.psi * complexity_prior(candidates.members[k].size(), p);
        if (candidates.members[k].size() <= n_train - 2) any_fittable = true;
    }
    if (!any_fittable) {
        throw Error("no-fittable-candidate", "no candidate fits in the training half",
                    "n_train=" + std::to_string(n_train));
    }

    std::vector<std::vector<double>> split_weights(config.splits_L);
    parallel_for(config.splits_L, resolve_threads(config.threads), [&](int l) {
        auto [train_rows, test_rows] = arm_split(data, config, l);
        Dataset train = data.subset(train_rows);
        Dataset test = data.subset(test_rows);

        std::vector<double> scores(K, kNegInf);
        for (size_t k = 0; k < K; ++k) {
            const VariableSet& support = candidates.members[k];
            if (support.size() > train.n() - 2) continue;  // unfittable: weight 0
            FittedModel model = fit_model(train, support);
            scores[k] = -prior[k] + holdout_log_lik(model, test);
        }
        split_weights[l] = weights_from_log_scores(scores);
    });

    CandidateEnsemble ensemble;
    ensemble.candidates = candidates.members;
    ensemble.weights.assign(K, 0.0);
    for (int l = 0; l < config.splits_L; ++l) {
        for (size_t k = 0; k < K; ++k) ensemble.weights[k] += split_weights[l][k];
    }
    for (double& w : ensemble.weights) w /= config.splits_L;
    ensemble.validate();
    return ensemble;
}

CandidateEnsemble bicp_weights(const Dataset& data, const CandidateSet& candidates,
                               const WeightingConfig& config) {
    data.validate();
    config.validate();
    if (candidates.members.empty()) throw Error("bad-input", "empty candidate set");
    const int n = data.n();
    const int p = data.p();
    const size_t K = candidates.members.size();

    std::vector<double> scores(K, kNegInf);
    for (size_t k = 0; k < K; ++k) {
        const VariableSet& support = candidates.members[k];
        if (support.size() > n - 2) continue;  // unfittable: weight 0
        FittedModel model = fit_model(data, support);
        double bic = -2.0 * model.log_lik + support.size() * std::log(static_cast<double>(n));
        scores[k] = -bic / 2.0 - config.psi * complexity_prior(support.size(), p);
    }

    CandidateEnsemble ensemble;
    ensemble.candidates = candidates.members;
    ensemble.weights = weights_from_log_scores(scores);
    ensemble.validate();
    return ensemble;
}

CandidateEnsemble compute_weights(const Dataset& data, const CandidateSet& candidates,
                                  const WeightingConfig& config) {
    return config.method == WeightingMethod::arm ? arm_weights(data, candidates, config)
                                                 : bicp_weights(data, candidates, config);
}

}  // namespace pavi
