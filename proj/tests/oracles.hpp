// Independent reference implementations used as test oracles. These
// deliberately avoid the library's solve paths: objectives are evaluated
// from their residual form, minimizers found iteratively, and matrix
// entries rebuilt with explicit loops.
#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "netkrr/graph.hpp"
#include "netkrr/rng.hpp"
#include "netkrr/solver.hpp"

namespace oracles {

// Sum over edges of squared effect differences (Eq-free restatement of the
// Laplacian quadratic form).
inline double edge_sum_penalty(const netkrr::Graph& g, const Eigen::VectorXd& a) {
    double total = 0.0;
    for (const auto& [u, v] : g.edges) {
        const double d = a[u] - a[v];
        total += d * d;
    }
    return total;
}

// Entrywise kernel formulas written out independently of kernel_eval.
inline double kernel_value(const netkrr::KernelSpec& spec, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& z) {
    using netkrr::KernelFamily;
    double dot = 0.0, sq = 0.0, nx = 0.0, nz = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        dot += x[i] * z[i];
        sq += (x[i] - z[i]) * (x[i] - z[i]);
        nx += x[i] * x[i];
        nz += z[i] * z[i];
    }
    switch (spec.family) {
        case KernelFamily::kRbf: return std::exp(-spec.gamma * sq);
        case KernelFamily::kLaplace: return std::exp(-spec.gamma * std::sqrt(sq));
        case KernelFamily::kCosine: return dot / (std::sqrt(nx) * std::sqrt(nz));
        case KernelFamily::kPolynomial: return std::pow(dot + spec.offset, spec.degree);
        case KernelFamily::kTangent: return std::tanh(spec.gamma * dot + spec.offset);
    }
    return 0.0;
}

// Conjugate gradients on the joint objective
//   |y - alpha - K w|^2 + lambda a'La + psi w'Pw,
// with all operator products written from the residual form (never the
// assembled 2n x 2n normal matrix).
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> cg_minimize_objective(
    const Eigen::VectorXd& y, const Eigen::MatrixXd& k, const Eigen::MatrixXd& l,
    const netkrr::FitConfig& cfg, int max_iters = 0, double tol = 1e-13) {
    const Eigen::Index n = y.size();
    const bool euclidean = cfg.penalty == netkrr::WeightPenalty::kEuclidean;
    auto apply = [&](const Eigen::VectorXd& theta) {
        const Eigen::VectorXd a = theta.head(n);
        const Eigen::VectorXd w = theta.tail(n);
        const Eigen::VectorXd fitted = a + k * w;
        Eigen::VectorXd out(2 * n);
        out.head(n) = fitted + cfg.lambda * (l * a);
        out.tail(n) = k.transpose() * fitted + cfg.psi * (euclidean ? w : Eigen::VectorXd(k * w));
        return out;
    };
    Eigen::VectorXd b(2 * n);
    b.head(n) = y;
    b.tail(n) = k.transpose() * y;

    if (max_iters == 0) max_iters = static_cast<int>(200 * n + 200);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(2 * n);
    const double b_norm = b.norm();
    for (int restart = 0; restart < 4; ++restart) {
        Eigen::VectorXd r = b - apply(theta);
        Eigen::VectorXd d = r;
        double rr = r.squaredNorm();
        for (int it = 0; it < max_iters; ++it) {
            if (std::sqrt(rr) <= tol * b_norm) break;
            const Eigen::VectorXd ad = apply(d);
            const double da = d.dot(ad);
            if (da <= 0.0) break;  // numerical loss of positive definiteness
            const double step = rr / da;
            theta += step * d;
            r -= step * ad;
            const double rr_new = r.squaredNorm();
            d = r + (rr_new / rr) * d;
            rr = rr_new;
        }
        if ((b - apply(theta)).norm() <= tol * b_norm) break;
    }
    return {theta.head(n), theta.tail(n)};
}

// Exact-line-search gradient descent for the cohesion penalty over the test
// effects, driven entirely by products with the full Laplacian.
inline Eigen::VectorXd gd_harmonic(const Eigen::MatrixXd& l_full, const std::vector<int>& train_index,
                                   const std::vector<int>& test_index, const Eigen::VectorXd& alpha_s,
                                   int max_iters = 400000) {
    const Eigen::Index n = l_full.rows();
    const Eigen::Index nt = static_cast<Eigen::Index>(test_index.size());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < train_index.size(); ++i) x[train_index[i]] = alpha_s[Eigen::Index(i)];
    // warm start at the mean of the training effects
    const double mean = alpha_s.size() > 0 ? alpha_s.mean() : 0.0;
    for (int v : test_index) x[v] = mean;

    const double scale = 1.0 + alpha_s.cwiseAbs().maxCoeff();
    for (int it = 0; it < max_iters; ++it) {
        const Eigen::VectorXd lx = l_full * x;
        Eigen::VectorXd grad(nt);
        for (Eigen::Index i = 0; i < nt; ++i) grad[i] = 2.0 * lx[test_index[i]];
        if (grad.cwiseAbs().maxCoeff() < 1e-12 * scale) break;
        // q(x + s d) is quadratic in s; minimize exactly along d = -grad
        Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
        for (Eigen::Index i = 0; i < nt; ++i) z[test_index[i]] = grad[i];
        const Eigen::VectorXd lz = l_full * z;
        double curvature = 0.0;
        for (Eigen::Index i = 0; i < nt; ++i) curvature += z[test_index[i]] * lz[test_index[i]];
        if (curvature <= 0.0) break;
        const double step = grad.squaredNorm() / (2.0 * curvature);
        for (Eigen::Index i = 0; i < nt; ++i) x[test_index[i]] -= step * grad[i];
    }
    Eigen::VectorXd out(nt);
    for (Eigen::Index i = 0; i < nt; ++i) out[i] = x[test_index[i]];
    return out;
}

// Conjugate gradients on the linear-cohesion objective
//   |y - alpha - X beta|^2 + lambda a'La,
// products written from the residual form.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> cg_minimize_linear_cohesion(
    const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const Eigen::MatrixXd& l, double lambda,
    double tol = 1e-13) {
    const Eigen::Index n = y.size();
    const Eigen::Index p = x.cols();
    auto apply = [&](const Eigen::VectorXd& theta) {
        const Eigen::VectorXd a = theta.head(n);
        const Eigen::VectorXd beta = theta.tail(p);
        const Eigen::VectorXd fitted = a + x * beta;
        Eigen::VectorXd out(n + p);
        out.head(n) = fitted + lambda * (l * a);
        out.tail(p) = x.transpose() * fitted;
        return out;
    };
    Eigen::VectorXd b(n + p);
    b.head(n) = y;
    b.tail(p) = x.transpose() * y;

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(n + p);
    const double b_norm = b.norm();
    const int max_iters = static_cast<int>(200 * (n + p) + 200);
    for (int restart = 0; restart < 4; ++restart) {
        Eigen::VectorXd r = b - apply(theta);
        Eigen::VectorXd d = r;
        double rr = r.squaredNorm();
        for (int it = 0; it < max_iters; ++it) {
            if (std::sqrt(rr) <= tol * b_norm) break;
            const Eigen::VectorXd ad = apply(d);
            const double da = d.dot(ad);
            if (da <= 0.0) break;
            const double step = rr / da;
            theta += step * d;
            r -= step * ad;
            const double rr_new = r.squaredNorm();
            d = r + (rr_new / rr) * d;
            rr = rr_new;
        }
        if ((b - apply(theta)).norm() <= tol * b_norm) break;
    }
    return {theta.head(n), theta.tail(p)};
}

// Normal-equations OLS (vs. the library's QR route).
inline Eigen::VectorXd normal_equations_ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
    Eigen::MatrixXd design(x.rows(), x.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(x.cols()) = x;
    return (design.transpose() * design).fullPivLu().solve(design.transpose() * y);
}

// Kernel fit with a single shared intercept: argmin over (c, w) of
// |y - c 1 - K w|^2 + psi |w|^2. Used for the lambda -> infinity limit.
inline Eigen::VectorXd common_intercept_kernel_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& k,
                                                   double psi) {
    const Eigen::Index n = y.size();
    Eigen::MatrixXd design(n, n + 1);
    design.col(0).setOnes();
    design.rightCols(n) = k;
    Eigen::MatrixXd system = design.transpose() * design;
    system.bottomRightCorner(n, n) += psi * Eigen::MatrixXd::Identity(n, n);
    const Eigen::VectorXd coef = system.ldlt().solve(design.transpose() * y);
    return design * coef;  // fitted values
}

// Test helper: ER-style random graph, optionally forced connected by a path.
inline netkrr::Graph random_graph(netkrr::Rng& rng, int n, double edge_prob, bool force_connected) {
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            if (rng.uniform() < edge_prob) edges.emplace_back(u, v);
        }
    }
    if (force_connected) {
        for (int v = 1; v < n; ++v) edges.emplace_back(v - 1, v);
    }
    return netkrr::Graph::from_edges(n, std::move(edges));
}

inline Eigen::MatrixXd random_matrix(netkrr::Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    }
    return m;
}

inline Eigen::VectorXd random_vector(netkrr::Rng& rng, Eigen::Index size) {
    Eigen::VectorXd v(size);
    for (Eigen::Index i = 0; i < size; ++i) v[i] = rng.normal();
    return v;
}

}  // namespace oracles
