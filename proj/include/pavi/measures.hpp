#pragma once

#include <vector>

#include "pavi/variable_set.hpp"

namespace pavi {

/// Deduplicated candidate supports paired with a weight vector summing to 1.
struct CandidateEnsemble {
    std::vector<VariableSet> candidates;
    std::vector<double> weights;

    /// Throws Error("bad-ensemble") if weights are negative, do not sum to 1
    /// within 1e-10, mismatch the candidate count, or candidates repeat.
    void validate() const;
};

enum class MeasureKind { f, g };

// Set-agreement measures. Conventions when a set is empty: all four are 0
// when exactly one of the two sets is empty, and 1 when both are empty.
// Cardinalities are combined in integer arithmetic before the one division.
double precision(const VariableSet& selected, const VariableSet& reference);
double recall(const VariableSet& selected, const VariableSet& reference);
double f_measure(const VariableSet& a, const VariableSet& b);
double g_measure(const VariableSet& a, const VariableSet& b);

/// Weighted mean of per-candidate F values: sum_k w_k F(model; A_k).
double estimate_f(const VariableSet& model_under_check, const CandidateEnsemble& ensemble);

/// Weighted mean of per-candidate G values: sum_k w_k G(model; A_k).
double estimate_g(const VariableSet& model_under_check, const CandidateEnsemble& ensemble);

/// sqrt(sum_k w_k (m_k - m_bar)^2) for the chosen measure.
double sd_estimate(const VariableSet& model_under_check, const CandidateEnsemble& ensemble,
                   MeasureKind kind);

struct CandidateContribution {
    int candidate;  // index into the ensemble
    double weight;
    double f;
    double g;
};

/// F-hat, G-hat and their weighted standard deviations for one
/// model-under-check, with the per-candidate breakdown retained.
struct AssessmentReport {
    double f_hat = 0.0;
    double g_hat = 0.0;
    double sd_f = 0.0;
    double sd_g = 0.0;
    std::vector<CandidateContribution> per_candidate;
};

AssessmentReport assess(const VariableSet& model_under_check, const CandidateEnsemble& ensemble);

}  // namespace pavi
