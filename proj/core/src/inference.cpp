#include "panelfuse/inference.hpp"

#include <numeric>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>

#include "panelfuse/error.hpp"

namespace panelfuse {

namespace {

class DisjointSets {
public:
    explicit DisjointSets(Index n) : parent_(static_cast<std::size_t>(n)) {
        std::iota(parent_.begin(), parent_.end(), Index{0});
    }

    Index find(Index x) {
        while (parent_[static_cast<std::size_t>(x)] != x) {
            auto& p = parent_[static_cast<std::size_t>(x)];
            p = parent_[static_cast<std::size_t>(p)];
            x = p;
        }
        return x;
    }

    // The smaller root wins so each root is its component's smallest cell.
    void unite(Index a, Index b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent_[static_cast<std::size_t>(b)] = a;
    }

private:
    std::vector<Index> parent_;
};

// Solves B V B' y = v; throws when B V B' is singular.
Eigen::VectorXd solve_contrast_covariance(const PostEstimate& est, const HypothesisSpec& hyp,
                                          const Eigen::VectorXd& v) {
    const Eigen::MatrixXd& b = hyp.contrast();
    if (b.cols() != est.covariance.rows()) {
        throw InvalidArgument("contrast has " + std::to_string(b.cols()) + " columns, expected " +
                              std::to_string(est.covariance.rows()) + " (L*P)");
    }
    const Eigen::MatrixXd m = b * est.covariance * b.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (!(eig.eigenvalues().minCoeff() > 1e-12 * top) || top == 0.0) {
        throw DegenerateFit("contrast covariance B V B' is singular");
    }
    return m.ldlt().solve(v);
}

}  // namespace

BlockPartition recover_blocks(const FusedState& state, const FusionIndex& idx, double tol_fuse) {
    if (!(tol_fuse >= 0.0)) throw InvalidArgument("tol_fuse must be nonnegative");
    const auto& shape = state.beta.shape;
    DisjointSets sets(shape.n_cells());
    Index k = 0;
    for (const auto& [i, j, t] : idx.individual_pairs) {
        if (state.rho.col(k++).norm() <= tol_fuse) sets.unite(shape.cell(i, t), shape.cell(j, t));
    }
    k = 0;
    for (const auto& [i, t, t2] : idx.period_pairs) {
        if (state.delta.col(k++).norm() <= tol_fuse) sets.unite(shape.cell(i, t), shape.cell(i, t2));
    }

    // Roots are visited in ascending cell order, so labels follow the smallest member.
    std::vector<Index> label_of_root(static_cast<std::size_t>(shape.n_cells()), -1);
    std::vector<Index> assignment(static_cast<std::size_t>(shape.n_cells()));
    Index n_blocks = 0;
    for (Index c = 0; c < shape.n_cells(); ++c) {
        const Index root = sets.find(c);
        auto& l = label_of_root[static_cast<std::size_t>(root)];
        if (l < 0) l = n_blocks++;
        assignment[static_cast<std::size_t>(c)] = l;
    }
    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(shape.n_covariates, n_blocks);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_blocks);
    for (Index c = 0; c < shape.n_cells(); ++c) {
        const Index l = assignment[static_cast<std::size_t>(c)];
        values.col(l) += state.beta.values.col(c);
        counts(l) += 1.0;
    }
    values = values * counts.cwiseInverse().asDiagonal();
    return {shape, std::move(assignment), std::move(values)};
}

Eigen::VectorXd PostEstimate::alpha() const {
    const auto& v = partition.block_values();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
}

PostEstimate post_estimate(const PanelData& panel, const DesignMatrix& design,
                           const BlockPartition& partition) {
    const auto& shape = panel.shape();
    if (!(partition.shape() == shape)) {
        throw InvalidArgument("partition lattice does not match the panel");
    }
    const Index p = shape.n_covariates;
    const Index n_blocks = partition.n_blocks();
    if (shape.n_cells() <= n_blocks * p) {
        throw DegenerateFit("no residual degrees of freedom: N*T = " +
                            std::to_string(shape.n_cells()) + " <= L*P = " +
                            std::to_string(n_blocks * p));
    }

    std::vector<Eigen::MatrixXd> grams(static_cast<std::size_t>(n_blocks),
                                       Eigen::MatrixXd::Zero(p, p));
    Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(p, n_blocks);
    for (Index c = 0; c < shape.n_cells(); ++c) {
        const Index l = partition.label(c);
        grams[static_cast<std::size_t>(l)].noalias() += design.x(c) * design.x(c).transpose();
        cross.col(l) += design.x(c) * panel.outcomes()(c);
    }

    Eigen::MatrixXd alpha(p, n_blocks);
    std::vector<Eigen::MatrixXd> gram_inverses;
    gram_inverses.reserve(static_cast<std::size_t>(n_blocks));
    for (Index l = 0; l < n_blocks; ++l) {
        const auto& g = grams[static_cast<std::size_t>(l)];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
        const double top = eig.eigenvalues().maxCoeff();
        if (!(top > 0.0) || !(eig.eigenvalues().minCoeff() > 1e-12 * top)) {
            throw DegenerateFit("block " + std::to_string(l + 1) +
                                " has a singular Gram matrix (too few cells or collinear "
                                "regressors)");
        }
        const Eigen::LLT<Eigen::MatrixXd> llt(g);
        alpha.col(l) = llt.solve(cross.col(l));
        gram_inverses.push_back(llt.solve(Eigen::MatrixXd::Identity(p, p)));
    }

    PostEstimate est;
    est.partition = BlockPartition(shape, partition.assignment(), alpha);
    est.beta = est.partition.expand();
    est.dof = shape.n_cells() - n_blocks * p;
    const double sse = sum_squared_residuals(panel, design, est.beta);
    const double sigma2 = sse / static_cast<double>(est.dof);
    est.sigma_hat = std::sqrt(sigma2);
    est.covariance = Eigen::MatrixXd::Zero(n_blocks * p, n_blocks * p);
    for (Index l = 0; l < n_blocks; ++l) {
        est.covariance.block(l * p, l * p, p, p) = sigma2 * gram_inverses[static_cast<std::size_t>(l)];
    }
    return est;
}

HypothesisSpec::HypothesisSpec(Eigen::MatrixXd contrast) : contrast_(std::move(contrast)) {
    if (contrast_.rows() < 1 || contrast_.cols() < 1) {
        throw InvalidArgument("contrast matrix must be nonempty");
    }
    if (!contrast_.allFinite()) throw InvalidArgument("contrast matrix must be finite");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(contrast_);
    if (lu.rank() != contrast_.rows()) {
        throw InvalidArgument("contrast matrix must have full row rank (rank " +
                              std::to_string(lu.rank()) + " < q = " +
                              std::to_string(contrast_.rows()) + ")");
    }
}

double chi_square_sf(double x, Index dof) {
    if (dof < 1) throw InvalidArgument("chi-square needs at least one degree of freedom");
    if (x <= 0.0) return 1.0;
    const boost::math::chi_squared dist(static_cast<double>(dof));
    return boost::math::cdf(boost::math::complement(dist, x));
}

double chi_square_quantile(double prob, Index dof) {
    if (dof < 1) throw InvalidArgument("chi-square needs at least one degree of freedom");
    if (!(prob >= 0.0 && prob < 1.0)) throw InvalidArgument("quantile level must be in [0, 1)");
    const boost::math::chi_squared dist(static_cast<double>(dof));
    return boost::math::quantile(dist, prob);
}

ChiSquareResult chi_square_test(const PostEstimate& est, const HypothesisSpec& hyp) {
    const Eigen::VectorXd b_alpha = hyp.contrast() * est.alpha();
    const Eigen::VectorXd y = solve_contrast_covariance(est, hyp, b_alpha);
    ChiSquareResult r;
    r.statistic = std::max(0.0, b_alpha.dot(y));
    r.dof = hyp.q();
    r.p_value = chi_square_sf(r.statistic, r.dof);
    return r;
}

bool confidence_region_contains(const PostEstimate& est, const HypothesisSpec& hyp,
                                const Eigen::VectorXd& iota, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("tau must lie in (0, 1)");
    if (iota.size() != hyp.q()) throw InvalidArgument("iota must have length q");
    const Eigen::VectorXd gap = hyp.contrast() * est.alpha() - iota;
    const Eigen::VectorXd y = solve_contrast_covariance(est, hyp, gap);
    return gap.dot(y) <= chi_square_quantile(1.0 - tau, hyp.q());
}

}  // namespace panelfuse
