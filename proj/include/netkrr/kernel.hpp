#pragma once

#include <string>

#include <Eigen/Core>

#include "netkrr/errors.hpp"

namespace netkrr {

enum class KernelFamily { kRbf, kLaplace, kCosine, kPolynomial, kTangent };

const char* to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

/// Kernel family plus hyperparameters.
///
///   rbf        exp(-gamma * |x - z|^2)
///   laplace    exp(-gamma * |x - z|)        (Euclidean distance)
///   cosine     x'z / (|x| |z|)
///   polynomial (x'z + offset)^degree
///   tangent    tanh(gamma * x'z + offset)   (not PSD in general)
struct KernelSpec {
    KernelFamily family = KernelFamily::kRbf;
    double gamma = 1.0;
    int degree = 2;
    double offset = 0.0;

    static KernelSpec rbf(double gamma = 1.0);
    static KernelSpec laplace(double gamma = 1.0);
    static KernelSpec cosine();
    static KernelSpec polynomial(int degree = 2, double offset = 1.0);
    static KernelSpec tangent(double gamma = 1.0, double offset = 0.0);

    /// Family defaults with gamma tied to the data scale: gamma =
    /// 1 / (p * var(X entries)) for rbf/laplace/tangent.
    static KernelSpec defaults_for(KernelFamily family, const Eigen::MatrixXd& x);

    void validate() const;
};

/// Data-scale default width: 1 / (p * pooled variance of X entries),
/// falling back to 1 when the variance vanishes.
double default_gamma(const Eigen::MatrixXd& x);

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& z);

/// n x n Gram matrix over the rows of X; exactly symmetric (upper triangle
/// computed once and mirrored).
Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& x);

/// m x n cross-Gram matrix: entry (i, j) = K(x_new_i, x_train_j).
Eigen::MatrixXd cross_gram(const KernelSpec& spec, const Eigen::MatrixXd& x_new,
                           const Eigen::MatrixXd& x_train);

}  // namespace netkrr
