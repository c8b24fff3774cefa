#pragma once

#include <Eigen/Core>

#include "netkrr/graph.hpp"
#include "netkrr/kernel.hpp"

namespace netkrr {

/// Ordinary least squares with intercept: returns (intercept, beta_1..beta_p).
Eigen::VectorXd fit_ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& x);

Eigen::VectorXd predict_ols(const Eigen::VectorXd& coef, const Eigen::MatrixXd& x);

/// Per-node intercepts smoothed by the graph plus a shared linear slope:
/// (alpha, beta) = argmin |Y - alpha - X beta|^2 + lambda alpha' L alpha.
struct LinearCohesionFit {
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta;
    double lambda = 0.0;
    bool min_norm = false;
};

LinearCohesionFit fit_linear_cohesion(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                                      const Laplacian& laplacian, double lambda,
                                      bool allow_interpolation = false);

/// Plain kernel ridge: w = (K + n lambda I)^{-1} (Y - mean(Y)). The closed
/// form carries no intercept, so the training mean is subtracted before the
/// solve and restored at prediction time.
struct KernelRidgeFit {
    Eigen::VectorXd w;
    double lambda = 0.0;
    KernelSpec kernel;
    Eigen::MatrixXd x_train;
    double y_offset = 0.0;
};

KernelRidgeFit fit_kernel_ridge(const Eigen::VectorXd& y, const Eigen::MatrixXd& k, double lambda);
KernelRidgeFit fit_kernel_ridge(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                                const KernelSpec& kernel, double lambda);

Eigen::VectorXd predict_kernel_ridge(const KernelRidgeFit& fit, const Eigen::MatrixXd& x_new);

}  // namespace netkrr
