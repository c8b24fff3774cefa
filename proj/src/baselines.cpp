#include "netkrr/baselines.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace netkrr {

Eigen::VectorXd fit_ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if (y.size() != n) throw DimensionError("fit_ols: response length != rows of X");
    if (n <= p + 1) {
        throw ConfigError("fit_ols: need n > p + 1 observations (n = " + std::to_string(n) +
                          ", p = " + std::to_string(p) + ")");
    }
    Eigen::MatrixXd design(n, p + 1);
    design.col(0).setOnes();
    design.rightCols(p) = x;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < p + 1) {
        throw SingularSystemError("fit_ols: rank-deficient design (collinear columns, rank " +
                                      std::to_string(qr.rank()) + " of " + std::to_string(p + 1) + ")",
                                  std::numeric_limits<double>::infinity());
    }
    return qr.solve(y);
}

Eigen::VectorXd predict_ols(const Eigen::VectorXd& coef, const Eigen::MatrixXd& x) {
    if (coef.size() != x.cols() + 1) throw DimensionError("predict_ols: coefficient length != p + 1");
    return Eigen::VectorXd::Constant(x.rows(), coef[0]) + x * coef.tail(x.cols());
}

LinearCohesionFit fit_linear_cohesion(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                                      const Laplacian& laplacian, double lambda,
                                      bool allow_interpolation) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if (y.size() != n) throw DimensionError("fit_linear_cohesion: response length != rows of X");
    if (laplacian.n() != n) throw DimensionError("fit_linear_cohesion: Laplacian size != rows of X");
    if (lambda < 0.0 || !std::isfinite(lambda)) throw ConfigError("lambda must be finite and >= 0");

    if (lambda == 0.0) {
        if (!allow_interpolation) {
            throw SingularSystemError(
                "lambda = 0 makes the node-effect system singular; set allow_interpolation or lambda > 0",
                std::numeric_limits<double>::infinity());
        }
        // Interpolating limit: free intercepts absorb Y, slope stays zero.
        return {y, Eigen::VectorXd::Zero(p), 0.0, true};
    }

    // Normal matrix of the stacked design [I X] with the Laplacian acting on
    // the intercept block only.
    Eigen::MatrixXd system(n + p, n + p);
    system.topLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n) + lambda * laplacian.matrix;
    system.topRightCorner(n, p) = x;
    system.bottomLeftCorner(p, n) = x.transpose();
    system.bottomRightCorner(p, p) = x.transpose() * x;

    Eigen::VectorXd b(n + p);
    b.head(n) = y;
    b.tail(p) = x.transpose() * y;

    const double tol = 1e-8 * y.norm() + 1e-14;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
    const double rcond = ldlt.rcond();
    const double condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (ldlt.info() == Eigen::Success && rcond > 0.0 && condition <= 1e12) {
        Eigen::VectorXd theta = ldlt.solve(b);
        Eigen::VectorXd residual = system * theta - b;
        if (residual.norm() > tol) {
            theta -= ldlt.solve(residual);
            residual = system * theta - b;
        }
        if (residual.norm() <= tol) return {theta.head(n), theta.tail(p), lambda, false};
    }

    // Singular system (a slope direction reproducible by the intercepts,
    // e.g. X beta = c 1): return the minimizer with smallest |beta|, matching
    // the kernel solver's canonical choice.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(system);
    if (es.info() != Eigen::Success) {
        throw SingularSystemError("fit_linear_cohesion: eigendecomposition failed", condition);
    }
    const Eigen::VectorXd& evals = es.eigenvalues();
    const Eigen::MatrixXd& evecs = es.eigenvectors();
    const double eig_tol = std::max(evals.cwiseAbs().maxCoeff(), 1e-300) * 1e-13;
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(n + p);
    std::vector<Eigen::Index> null_cols;
    for (Eigen::Index i = 0; i < n + p; ++i) {
        if (evals[i] > eig_tol) {
            theta += (evecs.col(i).dot(b) / evals[i]) * evecs.col(i);
        } else {
            null_cols.push_back(i);
        }
    }
    if (!null_cols.empty()) {
        Eigen::MatrixXd null_basis(n + p, static_cast<Eigen::Index>(null_cols.size()));
        for (std::size_t j = 0; j < null_cols.size(); ++j) {
            null_basis.col(static_cast<Eigen::Index>(j)) = evecs.col(null_cols[j]);
        }
        const Eigen::MatrixXd null_beta = null_basis.bottomRows(p);
        theta += null_basis * null_beta.colPivHouseholderQr().solve(-theta.tail(p));
    }
    if ((system * theta - b).norm() > tol) {
        throw SingularSystemError("fit_linear_cohesion: system singular or ill-conditioned", condition);
    }
    return {theta.head(n), theta.tail(p), lambda, true};
}

KernelRidgeFit fit_kernel_ridge(const Eigen::VectorXd& y, const Eigen::MatrixXd& k, double lambda) {
    const Eigen::Index n = k.rows();
    if (k.cols() != n) throw DimensionError("fit_kernel_ridge: Gram matrix must be square");
    if (y.size() != n) throw DimensionError("fit_kernel_ridge: response length != n");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw ConfigError("fit_kernel_ridge: lambda must be positive");
    }
    const double y_offset = y.mean();
    const Eigen::MatrixXd system =
        k + static_cast<double>(n) * lambda * Eigen::MatrixXd::Identity(n, n);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
    const double rcond = ldlt.rcond();
    const double condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (ldlt.info() != Eigen::Success || !(rcond > 0.0) || condition > 1e12) {
        throw SingularSystemError("fit_kernel_ridge: K + n lambda I is singular or ill-conditioned",
                                  condition);
    }
    KernelRidgeFit result;
    result.w = ldlt.solve((y.array() - y_offset).matrix());
    result.lambda = lambda;
    result.y_offset = y_offset;
    return result;
}

KernelRidgeFit fit_kernel_ridge(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                                const KernelSpec& kernel, double lambda) {
    KernelRidgeFit result = fit_kernel_ridge(y, gram(kernel, x), lambda);
    result.kernel = kernel;
    result.x_train = x;
    return result;
}

Eigen::VectorXd predict_kernel_ridge(const KernelRidgeFit& fit, const Eigen::MatrixXd& x_new) {
    if (fit.x_train.size() == 0) {
        throw ConfigError("predict_kernel_ridge: fit carries no training features");
    }
    return (cross_gram(fit.kernel, x_new, fit.x_train) * fit.w).array() + fit.y_offset;
}

}  // namespace netkrr
