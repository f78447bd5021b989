#include "panelfuse/linear_system.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "panelfuse/error.hpp"

namespace panelfuse {

namespace {

thread_local int g_last_iterations = 0;

}  // namespace

void apply_fusion_gram(const PanelShape& shape, double psi, double phi,
                       const Eigen::MatrixXd& in, Eigen::MatrixXd& out) {
    const Index n = shape.n_individuals;
    const Index t_count = shape.n_periods;
    const Index p = shape.n_covariates;
    // sums over i (per period) and over t (per individual), slot-major
    std::vector<double> period_sums(static_cast<std::size_t>(p * t_count), 0.0);
    std::vector<double> unit_sums(static_cast<std::size_t>(p * n), 0.0);
    const double* src = in.data();
    for (Index i = 0; i < n; ++i) {
        double* us = unit_sums.data() + i * p;
        for (Index t = 0; t < t_count; ++t) {
            const double* v = src + (i * t_count + t) * p;
            double* ps = period_sums.data() + t * p;
            for (Index q = 0; q < p; ++q) {
                ps[q] += v[q];
                us[q] += v[q];
            }
        }
    }
    for (auto& v : period_sums) v *= psi;
    for (auto& v : unit_sums) v *= phi;
    const double diag = psi * static_cast<double>(n) + phi * static_cast<double>(t_count);
    out.resize(p, shape.n_cells());
    double* dst = out.data();
    for (Index i = 0; i < n; ++i) {
        const double* us = unit_sums.data() + i * p;
        for (Index t = 0; t < t_count; ++t) {
            const Index off = (i * t_count + t) * p;
            const double* ps = period_sums.data() + t * p;
            for (Index q = 0; q < p; ++q) {
                dst[off + q] = diag * src[off + q] - ps[q] - us[q];
            }
        }
    }
}

Eigen::MatrixXd design_cross_outcome(const DesignMatrix& design, const Eigen::VectorXd& y) {
    return design.rows * y.asDiagonal();
}

NormalSystem::NormalSystem(const DesignMatrix& design, double psi, double phi,
                           LinearSolverOptions options)
    : shape_(design.shape), x_(design.rows), psi_(psi), phi_(phi), options_(options) {
    if (!(psi >= 0.0) || !(phi >= 0.0)) {
        throw InvalidArgument("fusion weights must be nonnegative");
    }
    if (!(options_.krylov_tol > 0.0) || options_.krylov_max_iter < 1) {
        throw InvalidArgument("Krylov tolerance and iteration cap must be positive");
    }
    const Index p = shape_.n_covariates;
    slot_scale_ = x_.rowwise().squaredNorm() / static_cast<double>(shape_.n_cells());
    for (Index k = 0; k < p; ++k) {
        slot_scale_(k) = std::max(slot_scale_(k), 1e-12);
    }

    if (options_.kind == LinearSolver::DenseFallback) {
        const Index n = shape_.n_individuals;
        const Index tc = shape_.n_periods;
        const Index dim = shape_.n_cells() * p;
        Eigen::MatrixXd k = Eigen::MatrixXd::Zero(dim, dim);
        for (Index c = 0; c < shape_.n_cells(); ++c) {
            k.block(c * p, c * p, p, p) = x_.col(c) * x_.col(c).transpose();
        }
        for (Index t = 0; t < tc; ++t) {
            for (Index i = 0; i < n; ++i) {
                for (Index j = 0; j < n; ++j) {
                    const double w = psi * ((i == j ? static_cast<double>(n) : 0.0) - 1.0);
                    const Index ci = shape_.cell(i, t) * p;
                    const Index cj = shape_.cell(j, t) * p;
                    for (Index q = 0; q < p; ++q) k(ci + q, cj + q) += w;
                }
            }
        }
        for (Index i = 0; i < n; ++i) {
            for (Index t = 0; t < tc; ++t) {
                for (Index t2 = 0; t2 < tc; ++t2) {
                    const double w = phi * ((t == t2 ? static_cast<double>(tc) : 0.0) - 1.0);
                    const Index ci = shape_.cell(i, t) * p;
                    const Index cj = shape_.cell(i, t2) * p;
                    for (Index q = 0; q < p; ++q) k(ci + q, cj + q) += w;
                }
            }
        }
        k.diagonal().array() += options_.ridge_epsilon;
        const double scale = k.diagonal().cwiseAbs().maxCoeff();
        dense_.emplace(k);
        if (dense_->info() != Eigen::Success) {
            throw SolverError("dense normal system is singular (set ridge_epsilon > 0)",
                              std::numeric_limits<double>::quiet_NaN());
        }
        const Eigen::VectorXd pivots = dense_->matrixLLT().diagonal();
        if (pivots.minCoeff() * pivots.minCoeff() <= 1e-13 * scale) {
            throw SolverError("dense normal system is numerically singular (set ridge_epsilon > 0)",
                              pivots.minCoeff());
        }
    }
}

void NormalSystem::apply(const Eigen::MatrixXd& x, Eigen::MatrixXd& out) const {
    apply_fusion_gram(shape_, psi_, phi_, x, out);
    const Index p = shape_.n_covariates;
    const double* xs = x_.data();
    const double* in = x.data();
    double* dst = out.data();
    for (Index c = 0; c < shape_.n_cells(); ++c) {
        const Index off = c * p;
        double dot = 0.0;
        for (Index q = 0; q < p; ++q) dot += xs[off + q] * in[off + q];
        for (Index q = 0; q < p; ++q) dst[off + q] += xs[off + q] * dot;
    }
}

// Exact inverse of (A + diag(mu)) using the orthogonal split of a field into
// grand mean, individual effects, period effects and interaction, which are
// eigenspaces of A with eigenvalues 0, psi N, phi T and psi N + phi T.
void NormalSystem::precondition(const Eigen::MatrixXd& r, Eigen::MatrixXd& z) const {
    const Index n = shape_.n_individuals;
    const Index tc = shape_.n_periods;
    const Index p = shape_.n_covariates;
    const double dn = static_cast<double>(n);
    const double dt = static_cast<double>(tc);

    z.resize(p, shape_.n_cells());
    Eigen::VectorXd unit_mean(n);
    Eigen::VectorXd period_mean(tc);
    for (Index k = 0; k < p; ++k) {
        unit_mean.setZero();
        period_mean.setZero();
        for (Index i = 0; i < n; ++i) {
            for (Index t = 0; t < tc; ++t) {
                const double v = r(k, i * tc + t);
                unit_mean(i) += v;
                period_mean(t) += v;
            }
        }
        unit_mean /= dt;
        period_mean /= dn;
        const double grand = unit_mean.mean();
        unit_mean.array() -= grand;
        period_mean.array() -= grand;

        const double mu = slot_scale_(k);
        const double w_grand = 1.0 / mu;
        const double w_unit = 1.0 / (psi_ * dn + mu);
        const double w_period = 1.0 / (phi_ * dt + mu);
        const double w_inter = 1.0 / (psi_ * dn + phi_ * dt + mu);
        for (Index i = 0; i < n; ++i) {
            const double a = unit_mean(i);
            const double base = w_grand * grand + w_unit * a;
            for (Index t = 0; t < tc; ++t) {
                const double b = period_mean(t);
                const double inter = r(k, i * tc + t) - grand - a - b;
                z(k, i * tc + t) = base + w_period * b + w_inter * inter;
            }
        }
    }
}

Eigen::MatrixXd NormalSystem::solve_krylov(const Eigen::MatrixXd& rhs,
                                           const Eigen::MatrixXd* guess) const {
    const double rhs_norm = rhs.norm();
    Eigen::MatrixXd x = guess ? *guess : Eigen::MatrixXd::Zero(rhs.rows(), rhs.cols());
    g_last_iterations = 0;
    if (rhs_norm == 0.0) {
        x.setZero();
        return x;
    }
    Eigen::MatrixXd kx;
    apply(x, kx);
    Eigen::MatrixXd r = rhs - kx;
    double res = r.norm();
    if (res <= options_.krylov_tol * rhs_norm) return x;

    Eigen::MatrixXd z;
    precondition(r, z);
    Eigen::MatrixXd dir = z;
    double rz = (r.array() * z.array()).sum();
    Eigen::MatrixXd kd;
    for (int it = 1; it <= options_.krylov_max_iter; ++it) {
        apply(dir, kd);
        const double curvature = (dir.array() * kd.array()).sum();
        if (!(curvature > 0.0)) {
            throw SolverError("conjugate gradient met a non-positive curvature direction "
                              "(normal system is singular)",
                              res / rhs_norm);
        }
        const double step = rz / curvature;
        x += step * dir;
        r -= step * kd;
        res = r.norm();
        g_last_iterations = it;
        if (res <= options_.krylov_tol * rhs_norm) return x;
        precondition(r, z);
        const double rz_next = (r.array() * z.array()).sum();
        dir = z + (rz_next / rz) * dir;
        rz = rz_next;
    }
    throw SolverError("conjugate gradient did not converge in " +
                          std::to_string(options_.krylov_max_iter) +
                          " iterations (relative residual " + std::to_string(res / rhs_norm) +
                          ")",
                      res / rhs_norm);
}

Eigen::MatrixXd NormalSystem::solve(const Eigen::MatrixXd& rhs,
                                    const Eigen::MatrixXd* guess) const {
    if (rhs.rows() != shape_.n_covariates || rhs.cols() != shape_.n_cells()) {
        throw InvalidArgument("right-hand side shape does not match the normal system");
    }
    if (!rhs.allFinite()) {
        throw SolverError("right-hand side is not finite", std::numeric_limits<double>::infinity());
    }
    if (dense_) {
        const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), rhs.size());
        Eigen::VectorXd sol = dense_->solve(b);
        return Eigen::Map<Eigen::MatrixXd>(sol.data(), rhs.rows(), rhs.cols());
    }
    return solve_krylov(rhs, guess);
}

int NormalSystem::last_iterations() { return g_last_iterations; }

}  // namespace panelfuse
