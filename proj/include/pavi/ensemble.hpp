#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pavi/dataset.hpp"
#include "pavi/measures.hpp"
#include "pavi/paths.hpp"

namespace pavi {

enum class WeightingMethod { arm, bicp };

std::string weighting_name(WeightingMethod method);
WeightingMethod parse_weighting(const std::string& name);

struct WeightingConfig {
    WeightingMethod method = WeightingMethod::bicp;
    double psi = 1.0;           // prior adjustment on the complexity term
    int splits_L = 100;         // ARM repetitions
    uint64_t seed = 0;
    double train_fraction = 0.5;
    int threads = 0;  // 0 resolves to PAVI_THREADS, else 1

    void validate() const;
};

/// Deduplicated candidate supports with (solver, lambda index) provenance.
/// Always contains the empty (intercept-only) model.
struct CandidateSet {
    std::vector<VariableSet> members;
    std::vector<std::vector<std::pair<PenaltyKind, int>>> provenance;
};

/// Union of per-lambda supports across all paths; members larger than
/// max_size are dropped; the empty model is appended when absent.
CandidateSet collect_candidates(const std::vector<PathSolution>& paths,
                                std::optional<int> max_size = {});

/// All 2^p subsets of {1..p}; guarded at p <= 20.
CandidateSet all_subsets(int p);

/// C_k = s log(e p / s) + 2 log(s + 2); the s = 0 limit drops the first term.
double complexity_prior(int s, int p);

/// Log-sum-exp normalization of log scores; -inf scores map to exactly 0.
std::vector<double> weights_from_log_scores(const std::vector<double>& scores);

/// The seeded (train, test) row split the ARM weighting uses for one split
/// index under the given config.
std::pair<std::vector<int>, std::vector<int>> arm_split(const Dataset& data,
                                                        const WeightingConfig& config,
                                                        int split_index);

/// Adaptive-regression-by-mixing weights: average over splits_L seeded random
/// half-splits of the per-split weights exp(-psi C_k + holdout log-lik),
/// normalized in the log domain. Candidates too large to refit on a training
/// half receive per-split weight 0. Results are invariant to the thread count.
CandidateEnsemble arm_weights(const Dataset& data, const CandidateSet& candidates,
                              const WeightingConfig& config);

/// BIC-p weights: exp(-I_k/2 - psi C_k) with I_k = -2 log lik + s_k log n from
/// a full-data MLE refit, normalized in the log domain.
CandidateEnsemble bicp_weights(const Dataset& data, const CandidateSet& candidates,
                               const WeightingConfig& config);

/// Dispatch on config.method.
CandidateEnsemble compute_weights(const Dataset& data, const CandidateSet& candidates,
                                  const WeightingConfig& config);

}  // namespace pavi
