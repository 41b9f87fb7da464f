#include "pavi/penalty.hpp"

#include <cmath>

#include "pavi/errors.hpp"

namespace pavi {

std::string penalty_name(PenaltyKind kind) {
    switch (kind) {
        case PenaltyKind::lasso: return "lasso";
        case PenaltyKind::adaptive_lasso: return "adlasso";
        case PenaltyKind::scad: return "scad";
        case PenaltyKind::mcp: return "mcp";
    }
    return "?";
}

PenaltyKind parse_penalty(const std::string& name) {
    if (name == "lasso") return PenaltyKind::lasso;
    if (name == "adlasso" || name == "adaptive_lasso") return PenaltyKind::adaptive_lasso;
    if (name == "scad") return PenaltyKind::scad;
    if (name == "mcp") return PenaltyKind::mcp;
    throw Error("bad-penalty", "unknown penalty (expected lasso|adlasso|scad|mcp)", name);
}

PenaltySpec PenaltySpec::lasso() {
    PenaltySpec spec;
    spec.kind = PenaltyKind::lasso;
    return spec;
}

PenaltySpec PenaltySpec::adaptive(double gamma) {
    PenaltySpec spec;
    spec.kind = PenaltyKind::adaptive_lasso;
    spec.gamma = gamma;
    return spec;
}

PenaltySpec PenaltySpec::adaptive_with_weights(Eigen::VectorXd weights) {
    PenaltySpec spec;
    spec.kind = PenaltyKind::adaptive_lasso;
    spec.adaptive_weights = std::move(weights);
    return spec;
}

PenaltySpec PenaltySpec::scad(double a) {
    PenaltySpec spec;
    spec.kind = PenaltyKind::scad;
    spec.a = a;
    return spec;
}

PenaltySpec PenaltySpec::mcp(double a) {
    PenaltySpec spec;
    spec.kind = PenaltyKind::mcp;
    spec.a = a;
    return spec;
}

void PenaltySpec::validate() const {
    if (kind == PenaltyKind::scad && !(a > 2.0)) {
        throw Error("bad-penalty", "SCAD requires a > 2", std::to_string(a));
    }
    if (kind == PenaltyKind::mcp && !(a > 1.0)) {
        throw Error("bad-penalty", "MCP requires a > 1", std::to_string(a));
    }
    if (kind == PenaltyKind::adaptive_lasso) {
        if (!(gamma >= 0.0)) throw Error("bad-penalty", "adaptive exponent must be >= 0");
        if (adaptive_weights) {
            for (int j = 0; j < adaptive_weights->size(); ++j) {
                double w = (*adaptive_weights)[j];
                if (std::isnan(w) || w < 0.0) {
                    throw Error("bad-penalty", "adaptive weights must be nonnegative",
                                "index " + std::to_string(j + 1));
                }
            }
        }
    }
}

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

double penalty_derivative(const PenaltySpec& spec, double u, double lambda) {
    switch (spec.kind) {
        case PenaltyKind::lasso:
        case PenaltyKind::adaptive_lasso:
            return lambda;
        case PenaltyKind::scad: {
            if (u <= lambda) return lambda;
            return std::max(spec.a * lambda - u, 0.0) / (spec.a - 1.0);
        }
        case PenaltyKind::mcp:
            return std::max(spec.a * lambda - u, 0.0) / spec.a;
    }
    return 0.0;
}

double univariate_mcp_solution(double z, double lambda, double a) {
    if (std::abs(z) > a * lambda) return z;
    return soft_threshold(z, lambda) / (1.0 - 1.0 / a);
}

double univariate_scad_solution(double z, double lambda, double a) {
    double az = std::abs(z);
    if (az <= 2.0 * lambda) return soft_threshold(z, lambda);
    if (az <= a * lambda) {
        double sign = z < 0.0 ? -1.0 : 1.0;
        return ((a - 1.0) * z - sign * a * lambda) / (a - 2.0);
    }
    return z;
}

}  // namespace pavi
