#pragma once

#include <string_view>

#include <Eigen/Dense>

namespace panelfuse {

enum class PenaltyKind { Lasso, SCAD, MCP };

PenaltyKind parse_penalty_kind(std::string_view name);
std::string_view to_string(PenaltyKind kind);

/// Conventional concavity defaults: 3.7 for SCAD, 3.0 for MCP.
double default_concavity(PenaltyKind kind);

struct PenaltySpec {
    PenaltyKind kind = PenaltyKind::SCAD;
    double level = 0.0;      // lambda or gamma
    double concavity = 3.7;  // a; ignored for Lasso

    static PenaltySpec make(PenaltyKind kind, double level) {
        return {kind, level, default_concavity(kind)};
    }
};

/// Throws InvalidArgument unless the concavity admits a unique proximal
/// minimizer at the given step: a > 1/step + 1 (SCAD), a > 1/step (MCP).
void validate(const PenaltySpec& spec, double step);

/// S(w, t) = (1 - t/||w||) w when t/||w|| < 1, zero otherwise.
Eigen::VectorXd soft_threshold(const Eigen::VectorXd& w, double t);

Eigen::VectorXd prox_lasso(const Eigen::VectorXd& w, double level, double step);
Eigen::VectorXd prox_scad(const Eigen::VectorXd& w, double level, double step, double a);
Eigen::VectorXd prox_mcp(const Eigen::VectorXd& w, double level, double step, double a);

/// All three operators are radial: prox(w) = f(||w||) * w. Returns f. The
/// spec must already have passed validate() for this step.
inline double prox_factor(double norm, const PenaltySpec& spec, double step) {
    const auto soft = [norm](double t) { return (norm <= 0.0 || t >= norm) ? 0.0 : 1.0 - t / norm; };
    const double lam = spec.level;
    const double a = spec.concavity;
    switch (spec.kind) {
        case PenaltyKind::Lasso:
            return soft(lam / step);
        case PenaltyKind::SCAD:
            if (norm <= lam + lam / step) return soft(lam / step);
            if (norm > a * lam) return 1.0;
            return soft(a * lam / ((a - 1.0) * step)) / (1.0 - 1.0 / ((a - 1.0) * step));
        case PenaltyKind::MCP:
            if (norm <= a * lam) return soft(lam / step) / (1.0 - 1.0 / (a * step));
            return 1.0;
    }
    return 1.0;
}

/// Minimizer of (step/2)||w - u||^2 + penalty_value(||u||, spec).
Eigen::VectorXd prox(const Eigen::VectorXd& w, const PenaltySpec& spec, double step);

/// Penalty as a function of the group norm kappa >= 0.
double penalty_value(double kappa, const PenaltySpec& spec);

}  // namespace panelfuse
