#include "netkrr/kernel.hpp"

#include <cmath>

namespace netkrr {

const char* to_string(KernelFamily family) {
    switch (family) {
        case KernelFamily::kRbf: return "rbf";
        case KernelFamily::kLaplace: return "laplace";
        case KernelFamily::kCosine: return "cosine";
        case KernelFamily::kPolynomial: return "poly";
        case KernelFamily::kTangent: return "tangent";
    }
    return "?";
}

KernelFamily kernel_family_from_string(const std::string& name) {
    if (name == "rbf" || name == "gaussian") return KernelFamily::kRbf;
    if (name == "laplace") return KernelFamily::kLaplace;
    if (name == "cosine" || name == "cos") return KernelFamily::kCosine;
    if (name == "poly" || name == "polynomial") return KernelFamily::kPolynomial;
    if (name == "tangent" || name == "tanh") return KernelFamily::kTangent;
    throw ConfigError("unknown kernel family: " + name);
}

KernelSpec KernelSpec::rbf(double gamma) { return {KernelFamily::kRbf, gamma, 2, 0.0}; }
KernelSpec KernelSpec::laplace(double gamma) { return {KernelFamily::kLaplace, gamma, 2, 0.0}; }
KernelSpec KernelSpec::cosine() { return {KernelFamily::kCosine, 1.0, 2, 0.0}; }
KernelSpec KernelSpec::polynomial(int degree, double offset) {
    return {KernelFamily::kPolynomial, 1.0, degree, offset};
}
KernelSpec KernelSpec::tangent(double gamma, double offset) {
    return {KernelFamily::kTangent, gamma, 2, offset};
}

double default_gamma(const Eigen::MatrixXd& x) {
    const double p = static_cast<double>(x.cols());
    if (x.size() == 0 || p == 0.0) return 1.0;
    const double mean = x.mean();
    const double var = (x.array() - mean).square().sum() / static_cast<double>(x.size());
    if (var <= 0.0) return 1.0;
    return 1.0 / (p * var);
}

KernelSpec KernelSpec::defaults_for(KernelFamily family, const Eigen::MatrixXd& x) {
    switch (family) {
        case KernelFamily::kRbf: return rbf(default_gamma(x));
        case KernelFamily::kLaplace: return laplace(default_gamma(x));
        case KernelFamily::kCosine: return cosine();
        case KernelFamily::kPolynomial: return polynomial(2, 1.0);
        case KernelFamily::kTangent: return tangent(default_gamma(x), 0.0);
    }
    return rbf(default_gamma(x));
}

void KernelSpec::validate() const {
    const bool uses_gamma = family == KernelFamily::kRbf || family == KernelFamily::kLaplace ||
                            family == KernelFamily::kTangent;
    if (uses_gamma && gamma <= 0.0) throw ConfigError("kernel gamma must be positive");
    if (family == KernelFamily::kPolynomial && degree < 1) throw ConfigError("polynomial degree must be >= 1");
}

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& z) {
    if (x.size() != z.size()) {
        throw DimensionError("kernel_eval: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                             std::to_string(z.size()) + ")");
    }
    switch (spec.family) {
        case KernelFamily::kRbf:
            return std::exp(-spec.gamma * (x - z).squaredNorm());
        case KernelFamily::kLaplace:
            return std::exp(-spec.gamma * (x - z).norm());
        case KernelFamily::kCosine: {
            const double nx = x.norm(), nz = z.norm();
            if (nx == 0.0 || nz == 0.0) throw ConfigError("cosine kernel undefined for a zero vector");
            return x.dot(z) / (nx * nz);
        }
        case KernelFamily::kPolynomial:
            return std::pow(x.dot(z) + spec.offset, spec.degree);
        case KernelFamily::kTangent:
            return std::tanh(spec.gamma * x.dot(z) + spec.offset);
    }
    throw ConfigError("unknown kernel family");
}

Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& x) {
    spec.validate();
    const Eigen::Index n = x.rows();
    if (n < 1) throw DimensionError("gram: need at least one row");
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double value = kernel_eval(spec, x.row(i).transpose(), x.row(j).transpose());
            k(i, j) = value;
            k(j, i) = value;
        }
    }
    return k;
}

Eigen::MatrixXd cross_gram(const KernelSpec& spec, const Eigen::MatrixXd& x_new,
                           const Eigen::MatrixXd& x_train) {
    spec.validate();
    if (x_new.cols() != x_train.cols()) {
        throw DimensionError("cross_gram: feature dimensions differ (" + std::to_string(x_new.cols()) +
                             " vs " + std::to_string(x_train.cols()) + ")");
    }
    Eigen::MatrixXd k(x_new.rows(), x_train.rows());
    for (Eigen::Index i = 0; i < x_new.rows(); ++i) {
        for (Eigen::Index j = 0; j < x_train.rows(); ++j) {
            k(i, j) = kernel_eval(spec, x_new.row(i).transpose(), x_train.row(j).transpose());
        }
    }
    return k;
}

}  // namespace netkrr
