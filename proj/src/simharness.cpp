#include "pavi/simharness.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

#include "pavi/errors.hpp"
#include "pavi/glm.hpp"
#include "pavi/measures.hpp"
#include "pavi/parallel.hpp"
#include "pavi/rng.hpp"

namespace pavi {

namespace {

constexpr double kBlockCorrelation = 0.4;
constexpr int kTuningFolds = 5;

struct DesignDefaults {
    int n;
    int p;
};

DesignDefaults design_defaults(int example_id) {
    switch (example_id) {
        case 1: return {200, 8};
        case 2: return {1000, 8};
        case 3: return {200, 2000};
        case 4: return {200, 30};
        case 5: return {200, 200};
        default:
            throw Error("bad-example", "example id must be 1..5", std::to_string(example_id));
    }
}

Eigen::VectorXd design_beta(int example_id, int p) {
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    if (example_id <= 3) {
        if (p < 3) throw Error("bad-example", "designs 1-3 need p >= 3");
        beta[0] = 3.0;
        beta[1] = 1.5;
        beta[2] = 2.0;
    } else {
        if (p < 15) throw Error("bad-example", "designs 4-5 need p >= 15");
        for (int j = 0; j < 5; ++j) beta[j] = 10.5;
        for (int j = 5; j < 10; ++j) beta[j] = 5.5;
        for (int j = 10; j < 15; ++j) beta[j] = 0.5;
    }
    return beta;
}

Eigen::MatrixXd ar_factor(int size) {
    Eigen::MatrixXd sigma(size, size);
    for (int j = 0; j < size; ++j) {
        for (int k = 0; k < size; ++k) {
            sigma(j, k) = std::pow(kBlockCorrelation, std::abs(j - k));
        }
    }
    return sigma.llt().matrixL();
}

}  // namespace

Scenario generate_scenario(const ScenarioSpec& spec) {
    DesignDefaults defaults = design_defaults(spec.example_id);
    const int n = spec.n > 0 ? spec.n : defaults.n;
    const int p = spec.p > 0 ? spec.p : defaults.p;
    if (spec.family == Family::gaussian && !(spec.sigma > 0.0)) {
        throw Error("bad-example", "gaussian designs need sigma > 0");
    }

    Scenario out;
    out.beta = design_beta(spec.example_id, p);
    std::vector<int> support;
    for (int j = 0; j < p; ++j) {
        if (out.beta[j] != 0.0) support.push_back(j + 1);
    }
    out.true_support = VariableSet(std::move(support));

    Rng rng = Rng::derive(spec.seed, {0});
    Eigen::MatrixXd x(n, p);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) x(i, j) = rng.normal();
    }
    if (spec.example_id == 4) {
        // One triangular factor, computed once, applied row by row.
        Eigen::MatrixXd factor = ar_factor(p);
        for (int i = 0; i < n; ++i) {
            x.row(i) = (factor * x.row(i).transpose()).transpose();
        }
    } else if (spec.example_id == 5) {
        const int head = 15;
        Eigen::MatrixXd factor_head = ar_factor(head);
        Eigen::MatrixXd factor_tail = ar_factor(p - head);
        for (int i = 0; i < n; ++i) {
            x.row(i).head(head) = (factor_head * x.row(i).head(head).transpose()).transpose();
            x.row(i).tail(p - head) =
                (factor_tail * x.row(i).tail(p - head).transpose()).transpose();
        }
    }

    Eigen::VectorXd linear = x * out.beta;
    Eigen::VectorXd y(n);
    if (spec.family == Family::binomial) {
        for (int i = 0; i < n; ++i) {
            double prob = 1.0 / (1.0 + std::exp(-linear[i]));
            y[i] = rng.bernoulli(prob) ? 1.0 : 0.0;
        }
    } else {
        for (int i = 0; i < n; ++i) y[i] = linear[i] + spec.sigma * rng.normal();
    }

    out.data.x = std::move(x);
    out.data.y = std::move(y);
    out.data.family = spec.family;
    return out;
}

std::string method_name(SelectionMethod method) {
    switch (method) {
        case SelectionMethod::lasso: return "lasso";
        case SelectionMethod::adaptive_lasso: return "adlasso";
        case SelectionMethod::mcp: return "mcp";
        case SelectionMethod::scad: return "scad";
    }
    return "?";
}

namespace {

struct MethodRun {
    std::array<MethodSelection, 4> selections;
    std::vector<PathSolution> candidate_paths;  // lasso, scad, mcp full-data paths
};

MethodRun run_methods(const Dataset& data, uint64_t seed, bool keep_paths) {
    MethodRun out;
    for (size_t idx = 0; idx < kSelectionMethods.size(); ++idx) {
        SelectionMethod method = kSelectionMethods[idx];
        MethodSelection& selection = out.selections[idx];
        selection.method = method;
        try {
            PenaltySpec spec;
            switch (method) {
                case SelectionMethod::lasso: spec = PenaltySpec::lasso(); break;
                case SelectionMethod::adaptive_lasso:
                    spec = PenaltySpec::adaptive_with_weights(adaptive_weights(
                        data, 1.0, kTuningFolds, derive_seed(seed, {idx, 0})));
                    break;
                case SelectionMethod::mcp: spec = PenaltySpec::mcp(); break;
                case SelectionMethod::scad: spec = PenaltySpec::scad(); break;
            }
            CvResult cv = cv_select(data, spec, kTuningFolds, derive_seed(seed, {idx, 1}));
            PathSolution path = fit_path(data, spec, cv.grid);
            selection.selected = path.supports[cv.chosen_index];
            selection.ok = true;
            if (keep_paths && method != SelectionMethod::adaptive_lasso) {
                out.candidate_paths.push_back(std::move(path));
            }
        } catch (const Error& e) {
            selection.ok = false;
            selection.error = e.what();
        }
    }
    return out;
}

}  // namespace

std::array<MethodSelection, 4> run_models_under_check(const Dataset& data, uint64_t seed) {
    return run_methods(data, seed, false).selections;
}

ReplicationReport run_replication(const ScenarioSpec& spec, const WeightingConfig& arm_config,
                                  const WeightingConfig& bicp_config,
                                  const std::vector<WeightingMethod>& weightings) {
    ScenarioSpec data_spec = spec;
    data_spec.seed = derive_seed(spec.seed, {0});
    Scenario scenario = generate_scenario(data_spec);
    const Dataset& data = scenario.data;

    MethodRun run = run_methods(data, derive_seed(spec.seed, {1}), true);
    if (run.candidate_paths.empty()) {
        throw Error("no-candidates", "all candidate path fits failed");
    }
    int max_size = std::min(data.n() - 4, 200);
    CandidateSet candidates = collect_candidates(run.candidate_paths, max_size);

    std::map<WeightingMethod, CandidateEnsemble> ensembles;
    for (WeightingMethod w : weightings) {
        WeightingConfig config = w == WeightingMethod::arm ? arm_config : bicp_config;
        config.method = w;
        config.seed = derive_seed(spec.seed, {2, config.seed});
        ensembles.emplace(w, compute_weights(data, candidates, config));
    }

    ReplicationReport report;
    report.candidate_count = static_cast<int>(candidates.members.size());
    for (size_t idx = 0; idx < run.selections.size(); ++idx) {
        MethodReport& mr = report.methods[idx];
        mr.selection = run.selections[idx];
        if (!mr.selection.ok) continue;
        mr.f_true = f_measure(mr.selection.selected, scenario.true_support);
        mr.g_true = g_measure(mr.selection.selected, scenario.true_support);
        for (const auto& [w, ensemble] : ensembles) {
            AssessmentReport a = assess(mr.selection.selected, ensemble);
            WeightedEstimate est;
            est.f_hat = a.f_hat;
            est.g_hat = a.g_hat;
            est.sd_f = a.sd_f;
            est.sd_g = a.sd_g;
            est.d_f = std::abs(a.f_hat - mr.f_true);
            est.d_g = std::abs(a.g_hat - mr.g_true);
            mr.estimates[w] = est;
        }
    }
    return report;
}

std::vector<ReplicationReport> run_replications(const ScenarioSpec& spec, int reps,
                                                const WeightingConfig& arm_config,
                                                const WeightingConfig& bicp_config,
                                                const std::vector<WeightingMethod>& weightings,
                                                int threads) {
    if (reps < 1) throw Error("bad-config", "reps must be at least 1");
    std::vector<ReplicationReport> reports(reps);
    parallel_for(reps, resolve_threads(threads), [&](int r) {
        ScenarioSpec rep_spec = spec;
        rep_spec.seed = derive_seed(spec.seed, {static_cast<uint64_t>(r)});
        reports[r] = run_replication(rep_spec, arm_config, bicp_config, weightings);
    });
    return reports;
}

namespace {

struct RunningStat {
    double sum = 0.0;
    double sum_sq = 0.0;
    int count = 0;

    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++count;
    }
    AggregateCell cell() const {
        AggregateCell c;
        if (count == 0) return c;
        c.mean = sum / count;
        if (count > 1) {
            double var = (sum_sq - sum * sum / count) / (count - 1);
            c.se = std::sqrt(std::max(var, 0.0) / count);
        }
        return c;
    }
};

}  // namespace

AggregateTable aggregate(const std::vector<ReplicationReport>& reports,
                         const std::vector<WeightingMethod>& weightings) {
    AggregateTable table;
    for (size_t idx = 0; idx < kSelectionMethods.size(); ++idx) {
        for (WeightingMethod w : weightings) {
            RunningStat f_true, g_true, f_hat, g_hat, d_f, d_g, sd_f, sd_g;
            for (const auto& report : reports) {
                const MethodReport& mr = report.methods[idx];
                if (!mr.selection.ok) continue;
                auto it = mr.estimates.find(w);
                if (it == mr.estimates.end()) continue;
                f_true.add(mr.f_true);
                g_true.add(mr.g_true);
                f_hat.add(it->second.f_hat);
                g_hat.add(it->second.g_hat);
                d_f.add(it->second.d_f);
                d_g.add(it->second.d_g);
                sd_f.add(it->second.sd_f);
                sd_g.add(it->second.sd_g);
            }
            AggregateRow row;
            row.method = kSelectionMethods[idx];
            row.weighting = w;
            row.f_true = f_true.cell();
            row.g_true = g_true.cell();
            row.f_hat = f_hat.cell();
            row.g_hat = g_hat.cell();
            row.d_f = d_f.cell();
            row.d_g = d_g.cell();
            row.sd_f = sd_f.cell();
            row.sd_g = sd_g.cell();
            row.replications = f_true.count;
            table.rows.push_back(row);
        }
    }
    return table;
}

std::vector<double> default_sigma_grid() {
    std::vector<double> sigmas(9);
    for (int i = 0; i < 9; ++i) sigmas[i] = 0.01 + (5.0 - 0.01) * i / 8.0;
    return sigmas;
}

std::vector<SweepRow> sigma_sweep(const ScenarioSpec& spec, const std::vector<double>& sigmas,
                                  int reps, const WeightingConfig& arm_config,
                                  const WeightingConfig& bicp_config,
                                  const std::vector<WeightingMethod>& weightings, int threads) {
    if (spec.family != Family::gaussian) {
        throw Error("bad-config", "sigma sweeps apply to the gaussian family only");
    }
    if (sigmas.empty()) throw Error("bad-config", "empty sigma list");
    std::vector<SweepRow> rows;
    rows.reserve(sigmas.size());
    for (double sigma : sigmas) {
        ScenarioSpec sigma_spec = spec;
        sigma_spec.sigma = sigma;
        // Replication r keeps its streams across sigma values, so adjacent
        // points on a curve share their randomness and differ only through
        // the noise scale.
        auto reports = run_replications(sigma_spec, reps, arm_config, bicp_config, weightings,
                                        threads);
        rows.push_back({sigma, aggregate(reports, weightings)});
    }
    return rows;
}

}  // namespace pavi
