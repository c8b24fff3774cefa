#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "netkrr/graph.hpp"
#include "netkrr/kernel.hpp"

namespace netkrr {

enum class WeightPenalty { kEuclidean, kRkhs };

const char* to_string(WeightPenalty penalty);
WeightPenalty weight_penalty_from_string(const std::string& name);

/// Penalty strengths for the joint objective
///   |Y - alpha - K w|^2 + lambda * alpha' L alpha + psi * w' P w
/// with P = I (euclidean) or P = K (rkhs).
struct FitConfig {
    double lambda = 1.0;
    double psi = 1.0;
    WeightPenalty penalty = WeightPenalty::kEuclidean;

    /// Permits the lambda = psi = 0 degenerate fit (pure interpolation).
    bool allow_interpolation = false;

    void validate() const;
};

/// Extended design for the stacked coefficient vector theta = (alpha, w):
/// K_tilde = [I K], M = blockdiag(L, 0), N = blockdiag(0, I or K), and the
/// assembled normal matrix K_tilde' K_tilde + psi N + lambda M.
struct DesignSystem {
    Eigen::MatrixXd k_tilde;  // n x 2n
    Eigen::MatrixXd m;        // 2n x 2n
    Eigen::MatrixXd n_mat;    // 2n x 2n
    Eigen::MatrixXd system;   // 2n x 2n
};

/// Fitted node effects and kernel weights plus everything needed to predict.
struct CohesionFit {
    Eigen::VectorXd alpha;
    Eigen::VectorXd w;
    FitConfig config;
    KernelSpec kernel;
    Eigen::MatrixXd x_train;  // empty when fitted from a precomputed Gram
    Graph graph;
    double objective_value = 0.0;

    /// True when the normal matrix was singular and the returned solution is
    /// the canonical minimizer with smallest |w| (the psi -> 0+ limit).
    bool min_norm = false;

    /// Condition estimate of the normal matrix (1/rcond from the
    /// factorization); infinity on the min-norm path.
    double condition = 0.0;
};

DesignSystem assemble_system(const Eigen::MatrixXd& k, const Laplacian& laplacian,
                             const FitConfig& cfg);

/// Closed-form joint solve for (alpha, w). Throws SingularSystemError when
/// the system is ill-conditioned (condition estimate above 1e12) and psi > 0,
/// or when lambda = psi = 0 without allow_interpolation.
///
/// With psi = 0 the normal matrix is always singular: (c 1_C, -c K^{-1} 1_C)
/// is a flat direction of the objective for every connected component C, so
/// the alpha/w split is not identified even though fitted values are. The
/// solver returns the minimizer with smallest |w| (equivalently the
/// psi -> 0+ limit of the regularized family) and sets min_norm.
CohesionFit fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& k, const Laplacian& laplacian,
                const FitConfig& cfg);

/// As `fit`, but computes the Gram matrix itself and retains the kernel and
/// features so the result supports out-of-sample prediction.
CohesionFit fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const Graph& g,
                const KernelSpec& kernel, const FitConfig& cfg);

/// The paper's first variant: cohesion penalty only (psi = 0).
CohesionFit fit_cohesion_only(const Eigen::VectorXd& y, const Eigen::MatrixXd& k,
                              const Laplacian& laplacian, double lambda);

/// Smoother matrix H with fitted = H Y; symmetric with eigenvalues in [0, 1]
/// whenever the penalty blocks are positive semidefinite.
Eigen::MatrixXd hat_matrix(const Eigen::MatrixXd& k, const Laplacian& laplacian,
                           const FitConfig& cfg);

/// Generalized cross-validation: n |(I - H) Y|^2 / (n - tr H)^2.
/// Throws when tr(H) reaches n (exact interpolation).
double gcv_score(const Eigen::VectorXd& y, const Eigen::MatrixXd& k, const Laplacian& laplacian,
                 const FitConfig& cfg);

struct SelectionMethod {
    enum class Kind { kGcv, kKfold };
    Kind kind = Kind::kGcv;
    int folds = 5;
    std::uint64_t seed = 0;
    int max_retries = 32;

    static SelectionMethod gcv();
    static SelectionMethod kfold(int k, std::uint64_t seed = 0);
};

/// Pick the grid element minimizing the selection criterion; exact ties go to
/// the larger lambda, then the larger psi. Grid points whose systems are
/// singular (or whose criterion is undefined) are skipped; if every point is
/// skipped a SingularSystemError is thrown.
FitConfig select_hyperparameters(const Eigen::VectorXd& y, const Eigen::MatrixXd& k,
                                 const Laplacian& laplacian, const std::vector<FitConfig>& grid,
                                 const SelectionMethod& method);

/// Objective of the joint problem at an arbitrary candidate point.
double cohesion_objective(const Eigen::VectorXd& y, const Eigen::MatrixXd& k,
                          const Laplacian& laplacian, const FitConfig& cfg,
                          const Eigen::VectorXd& alpha, const Eigen::VectorXd& w);

/// GCV scores over a full lambda x psi grid in one pass (euclidean weight
/// penalty). Shares the per-lambda factorizations across psi values, so grid
/// selection costs a fraction of per-point gcv_score calls; entry (i, j) is
/// the score at (lambda_grid[i], psi_grid[j]), NaN where undefined. All psi
/// values must be positive.
Eigen::MatrixXd gcv_grid(const Eigen::VectorXd& y, const Eigen::MatrixXd& k,
                         const Laplacian& laplacian, const std::vector<double>& lambda_grid,
                         const std::vector<double>& psi_grid);

}  // namespace netkrr
