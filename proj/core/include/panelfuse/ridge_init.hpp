#pragma once

#include "panelfuse/admm.hpp"
#include "panelfuse/panel.hpp"

namespace panelfuse {

struct RidgeConfig {
    double lambda_star = 0.001;
    double gamma_star = 0.001;

    void validate() const;
};

/// Minimizer of 1/2||Y - X beta||^2 + (lambda*/2)||Omega beta||^2 + (gamma*/2)||Phi beta||^2.
/// Solved with the same structured system as the ADMM beta step, with the
/// fusion weights replaced by (lambda*, gamma*) and zero auxiliaries.
CoefficientField ridge_init(const PanelData& panel, const DesignMatrix& design,
                            const RidgeConfig& config, const LinearSolverOptions& solver = {});

/// Value of the ridge-fusion criterion at beta.
double ridge_objective(const PanelData& panel, const DesignMatrix& design,
                       const CoefficientField& beta, const RidgeConfig& config);

}  // namespace panelfuse
