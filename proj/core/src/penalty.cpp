#include "panelfuse/penalty.hpp"

#include <cmath>
#include <string>

#include "panelfuse/error.hpp"

namespace panelfuse {

PenaltyKind parse_penalty_kind(std::string_view name) {
    if (name == "lasso") return PenaltyKind::Lasso;
    if (name == "scad") return PenaltyKind::SCAD;
    if (name == "mcp") return PenaltyKind::MCP;
    throw InvalidArgument("unknown penalty '" + std::string(name) + "' (lasso|scad|mcp)");
}

std::string_view to_string(PenaltyKind kind) {
    switch (kind) {
        case PenaltyKind::Lasso: return "lasso";
        case PenaltyKind::SCAD: return "scad";
        case PenaltyKind::MCP: return "mcp";
    }
    return "?";
}

double default_concavity(PenaltyKind kind) {
    return kind == PenaltyKind::MCP ? 3.0 : 3.7;
}

void validate(const PenaltySpec& spec, double step) {
    if (!(step > 0.0)) throw InvalidArgument("proximal step must be positive");
    if (!(spec.level >= 0.0) || !std::isfinite(spec.level)) {
        throw InvalidArgument("penalty level must be finite and nonnegative");
    }
    switch (spec.kind) {
        case PenaltyKind::Lasso: break;
        case PenaltyKind::SCAD:
            if (!(spec.concavity > 1.0 / step + 1.0)) {
                throw InvalidArgument("SCAD concavity must exceed 1/step + 1 (a = " +
                                      std::to_string(spec.concavity) + ")");
            }
            break;
        case PenaltyKind::MCP:
            if (!(spec.concavity > 1.0 / step)) {
                throw InvalidArgument("MCP concavity must exceed 1/step (a = " +
                                      std::to_string(spec.concavity) + ")");
            }
            break;
    }
}

namespace {

// Shrinkage factor of S(w, t) given ||w||.
double soft_factor(double norm, double t) {
    if (norm <= 0.0 || t >= norm) return 0.0;
    return 1.0 - t / norm;
}

}  // namespace

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& w, double t) {
    if (t < 0.0) throw InvalidArgument("threshold must be nonnegative");
    return soft_factor(w.norm(), t) * w;
}

Eigen::VectorXd prox(const Eigen::VectorXd& w, const PenaltySpec& spec, double step) {
    validate(spec, step);
    return prox_factor(w.norm(), spec, step) * w;
}

Eigen::VectorXd prox_lasso(const Eigen::VectorXd& w, double level, double step) {
    return prox(w, {PenaltyKind::Lasso, level, 0.0}, step);
}

Eigen::VectorXd prox_scad(const Eigen::VectorXd& w, double level, double step, double a) {
    return prox(w, {PenaltyKind::SCAD, level, a}, step);
}

Eigen::VectorXd prox_mcp(const Eigen::VectorXd& w, double level, double step, double a) {
    return prox(w, {PenaltyKind::MCP, level, a}, step);
}

double penalty_value(double kappa, const PenaltySpec& spec) {
    if (kappa < 0.0) throw InvalidArgument("penalty argument must be nonnegative");
    const double lam = spec.level;
    const double a = spec.concavity;
    switch (spec.kind) {
        case PenaltyKind::Lasso:
            return lam * kappa;
        case PenaltyKind::SCAD:
            if (kappa <= lam) return lam * kappa;
            if (kappa <= a * lam) {
                return (2.0 * a * lam * kappa - kappa * kappa - lam * lam) / (2.0 * (a - 1.0));
            }
            return lam * lam * (a + 1.0) / 2.0;
        case PenaltyKind::MCP:
            if (kappa <= a * lam) return lam * kappa - kappa * kappa / (2.0 * a);
            return a * lam * lam / 2.0;
    }
    return 0.0;
}

}  // namespace panelfuse
