#include "pavi/measures.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pavi/errors.hpp"

namespace pavi {

void CandidateEnsemble::validate() const {
    if (candidates.size() != weights.size()) {
        throw Error("bad-ensemble", "candidate and weight counts differ",
                    std::to_string(candidates.size()) + " vs " + std::to_string(weights.size()));
    }
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw Error("bad-ensemble", "negative or non-finite weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-10) {
        throw Error("bad-ensemble", "weights do not sum to 1", std::to_string(total));
    }
    std::set<VariableSet> seen(candidates.begin(), candidates.end());
    if (seen.size() != candidates.size()) {
        throw Error("bad-ensemble", "candidates are not pairwise distinct");
    }
}

double precision(const VariableSet& selected, const VariableSet& reference) {
    if (selected.empty()) return reference.empty() ? 1.0 : 0.0;
    return static_cast<double>(intersection_size(selected, reference)) /
           static_cast<double>(selected.size());
}

double recall(const VariableSet& selected, const VariableSet& reference) {
    if (reference.empty()) return selected.empty() ? 1.0 : 0.0;
    return static_cast<double>(intersection_size(selected, reference)) /
           static_cast<double>(reference.size());
}

double f_measure(const VariableSet& a, const VariableSet& b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    return 2.0 * static_cast<double>(intersection_size(a, b)) /
           static_cast<double>(a.size() + b.size());
}

double g_measure(const VariableSet& a, const VariableSet& b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    return static_cast<double>(intersection_size(a, b)) /
           std::sqrt(static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

double estimate_f(const VariableSet& model_under_check, const CandidateEnsemble& ensemble) {
    double total = 0.0;
    for (size_t k = 0; k < ensemble.candidates.size(); ++k) {
        total += ensemble.weights[k] * f_measure(model_under_check, ensemble.candidates[k]);
    }
    return total;
}

double estimate_g(const VariableSet& model_under_check, const CandidateEnsemble& ensemble) {
    double total = 0.0;
    for (size_t k = 0; k < ensemble.candidates.size(); ++k) {
        total += ensemble.weights[k] * g_measure(model_under_check, ensemble.candidates[k]);
    }
    return total;
}

double sd_estimate(const VariableSet& model_under_check, const CandidateEnsemble& ensemble,
                   MeasureKind kind) {
    double mean = kind == MeasureKind::f ? estimate_f(model_under_check, ensemble)
                                         : estimate_g(model_under_check, ensemble);
    double var = 0.0;
    for (size_t k = 0; k < ensemble.candidates.size(); ++k) {
        double m = kind == MeasureKind::f ? f_measure(model_under_check, ensemble.candidates[k])
                                          : g_measure(model_under_check, ensemble.candidates[k]);
        var += ensemble.weights[k] * (m - mean) * (m - mean);
    }
    return std::sqrt(std::max(var, 0.0));
}

AssessmentReport assess(const VariableSet& model_under_check, const CandidateEnsemble& ensemble) {
    AssessmentReport report;
    report.per_candidate.reserve(ensemble.candidates.size());
    for (size_t k = 0; k < ensemble.candidates.size(); ++k) {
        double f = f_measure(model_under_check, ensemble.candidates[k]);
        double g = g_measure(model_under_check, ensemble.candidates[k]);
        report.per_candidate.push_back({static_cast<int>(k), ensemble.weights[k], f, g});
        report.f_hat += ensemble.weights[k] * f;
        report.g_hat += ensemble.weights[k] * g;
    }
    double var_f = 0.0, var_g = 0.0;
    for (const auto& c : report.per_candidate) {
        var_f += c.weight * (c.f - report.f_hat) * (c.f - report.f_hat);
        var_g += c.weight * (c.g - report.g_hat) * (c.g - report.g_hat);
    }
    report.sd_f = std::sqrt(std::max(var_f, 0.0));
    report.sd_g = std::sqrt(std::max(var_g, 0.0));
    return report;
}

}  // namespace pavi
