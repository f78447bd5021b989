#include "panelfuse/ridge_init.hpp"

#include "panelfuse/error.hpp"
#include "panelfuse/linear_system.hpp"

namespace panelfuse {

void RidgeConfig::validate() const {
    if (!(lambda_star > 0.0) || !(gamma_star > 0.0)) {
        throw InvalidArgument("ridge weights lambda* and gamma* must be positive");
    }
}

CoefficientField ridge_init(const PanelData& panel, const DesignMatrix& design,
                            const RidgeConfig& config, const LinearSolverOptions& solver) {
    config.validate();
    const NormalSystem system(design, config.lambda_star, config.gamma_star, solver);
    return {panel.shape(), system.solve(design_cross_outcome(design, panel.outcomes()))};
}

double ridge_objective(const PanelData& panel, const DesignMatrix& design,
                       const CoefficientField& beta, const RidgeConfig& config) {
    Eigen::MatrixXd a_beta;
    apply_fusion_gram(panel.shape(), config.lambda_star, config.gamma_star, beta.values, a_beta);
    // beta' A beta = lambda* ||Omega beta||^2 + gamma* ||Phi beta||^2
    const double fusion = (beta.values.array() * a_beta.array()).sum();
    return 0.5 * sum_squared_residuals(panel, design, beta) + 0.5 * fusion;
}

}  // namespace panelfuse
