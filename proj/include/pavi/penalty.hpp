#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>

namespace pavi {

enum class PenaltyKind { lasso, adaptive_lasso, scad, mcp };

std::string penalty_name(PenaltyKind kind);
PenaltyKind parse_penalty(const std::string& name);

/// Penalty family plus its shape parameters. SCAD requires a > 2, MCP a > 1.
/// Adaptive lasso carries per-variable positive factors (+inf excludes a
/// variable permanently); when absent they are derived from a pilot fit.
struct PenaltySpec {
    PenaltyKind kind = PenaltyKind::lasso;
    double a = 3.7;
    double gamma = 1.0;
    std::optional<Eigen::VectorXd> adaptive_weights;

    static PenaltySpec lasso();
    static PenaltySpec adaptive(double gamma = 1.0);
    static PenaltySpec adaptive_with_weights(Eigen::VectorXd weights);
    static PenaltySpec scad(double a = 3.7);
    static PenaltySpec mcp(double a = 3.0);

    void validate() const;
};

/// sign(z) * max(|z| - t, 0).
double soft_threshold(double z, double t);

/// p'_lambda(u) for u >= 0.
/// lasso: lambda. SCAD: lambda [I(u<=lambda) + (a lambda - u)_+ /((a-1) lambda) I(u>lambda)].
/// MCP: (a lambda - u)_+ / a.
double penalty_derivative(const PenaltySpec& spec, double u, double lambda);

/// Global minimizer of 0.5 (z - b)^2 + p^MCP_lambda(|b|) for a unit
/// second-moment coordinate: sign(z)(|z|-lambda)_+ / (1 - 1/a) when
/// |z| <= a lambda, else z.
double univariate_mcp_solution(double z, double lambda, double a);

/// Global minimizer of 0.5 (z - b)^2 + p^SCAD_lambda(|b|), a > 2.
double univariate_scad_solution(double z, double lambda, double a);

}  // namespace pavi
