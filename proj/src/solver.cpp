#include "netkrr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "netkrr/rng.hpp"

namespace netkrr {

namespace {

constexpr double kConditionLimit = 1e12;

std::string format_condition(double condition) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", condition);
    return buf;
}

struct SolveOutcome {
    Eigen::VectorXd theta;
    bool min_norm = false;
    double condition = 0.0;
};

void check_stationarity(const Eigen::MatrixXd& system, Eigen::VectorXd& theta,
                        const Eigen::VectorXd& b, const Eigen::VectorXd& y,
                        const Eigen::LDLT<Eigen::MatrixXd>* refine, double condition) {
    const double tol = 1e-8 * y.norm() + 1e-14;
    Eigen::VectorXd residual = system * theta - b;
    if (refine != nullptr && residual.norm() > tol) {
        theta -= refine->solve(residual);
        residual = system * theta - b;
    }
    if (residual.norm() > tol) {
        throw SingularSystemError(
            "cohesion system is too ill-conditioned to satisfy the stationarity equations "
            "(condition estimate " + format_condition(condition) + "); increase lambda and/or psi",
            condition);
    }
}

// Minimum-|w| minimizer for a singular positive semidefinite system: the
// pseudo-inverse solution shifted along the null space so the weight block
// has the smallest norm (the psi -> 0+ limit of the regularized family).
SolveOutcome solve_singular(const Eigen::MatrixXd& system, const Eigen::VectorXd& b,
                            const Eigen::VectorXd& y) {
    const Eigen::Index two_n = system.rows();
    const Eigen::Index n = two_n / 2;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(system);
    if (es.info() != Eigen::Success) {
        throw SingularSystemError("cohesion system eigendecomposition failed",
                                  std::numeric_limits<double>::infinity());
    }
    const Eigen::VectorXd& evals = es.eigenvalues();
    const Eigen::MatrixXd& evecs = es.eigenvectors();
    const double max_eval = std::max(evals.cwiseAbs().maxCoeff(), 1e-300);
    const double tol = max_eval * 1e-13;

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(two_n);
    std::vector<Eigen::Index> null_cols;
    for (Eigen::Index i = 0; i < two_n; ++i) {
        if (evals[i] > tol) {
            theta += (evecs.col(i).dot(b) / evals[i]) * evecs.col(i);
        } else {
            null_cols.push_back(i);
        }
    }
    if (!null_cols.empty()) {
        Eigen::MatrixXd null_basis(two_n, static_cast<Eigen::Index>(null_cols.size()));
        for (std::size_t j = 0; j < null_cols.size(); ++j) null_basis.col(Eigen::Index(j)) = evecs.col(null_cols[j]);
        const Eigen::MatrixXd null_w = null_basis.bottomRows(n);
        const Eigen::VectorXd shift =
            null_w.colPivHouseholderQr().solve(-theta.tail(n));
        theta += null_basis * shift;
    }

    SolveOutcome out;
    out.theta = std::move(theta);
    out.min_norm = true;
    out.condition = std::numeric_limits<double>::infinity();
    check_stationarity(system, out.theta, b, y, nullptr, out.condition);
    return out;
}

SolveOutcome solve_system(const Eigen::MatrixXd& system, const Eigen::MatrixXd& k_tilde,
                          const Eigen::VectorXd& y, const FitConfig& cfg) {
    const Eigen::VectorXd b = k_tilde.transpose() * y;
    if (cfg.psi > 0.0) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
        const double rcond = ldlt.rcond();
        const double condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
        if (ldlt.info() != Eigen::Success || !(rcond > 0.0) || condition > kConditionLimit) {
            throw SingularSystemError(
                "cohesion system is singular or ill-conditioned (condition estimate " +
                    format_condition(condition) +
                    "); increase lambda and/or psi, or use the euclidean weight penalty",
                condition);
        }
        SolveOutcome out;
        out.theta = ldlt.solve(b);
        out.min_norm = false;
        out.condition = condition;
        check_stationarity(system, out.theta, b, y, &ldlt, condition);
        return out;
    }
    if (cfg.lambda == 0.0 && !cfg.allow_interpolation) {
        throw SingularSystemError(
            "lambda = 0 and psi = 0 make the system singular; set allow_interpolation to accept "
            "the interpolating fit, or use lambda/psi > 0",
            std::numeric_limits<double>::infinity());
    }
    return solve_singular(system, b, y);
}

// Precomputed pieces shared across a hyperparameter grid: only the penalty
// blocks change between configurations.
struct SystemCache {
    Eigen::Index n;
    Eigen::MatrixXd k_tilde;  // [I K]
    Eigen::MatrixXd base;     // K~' K~
    const Eigen::MatrixXd* k;
    const Laplacian* laplacian;

    SystemCache(const Eigen::MatrixXd& k_in, const Laplacian& lap) : k(&k_in), laplacian(&lap) {
        n = k_in.rows();
        if (k_in.cols() != n) throw DimensionError("Gram matrix must be square");
        if (lap.n() != n) {
            throw DimensionError("Gram matrix size " + std::to_string(n) +
                                 " != Laplacian size " + std::to_string(lap.n()));
        }
        k_tilde.resize(n, 2 * n);
        k_tilde.leftCols(n) = Eigen::MatrixXd::Identity(n, n);
        k_tilde.rightCols(n) = k_in;
        base.resize(2 * n, 2 * n);
        base.topLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
        base.topRightCorner(n, n) = k_in;
        base.bottomLeftCorner(n, n) = k_in.transpose();
        base.bottomRightCorner(n, n) = k_in.transpose() * k_in;
    }

    Eigen::MatrixXd assemble(const FitConfig& cfg) const {
        Eigen::MatrixXd system = base;
        system.topLeftCorner(n, n) += cfg.lambda * laplacian->matrix;
        if (cfg.penalty == WeightPenalty::kEuclidean) {
            system.bottomRightCorner(n, n) += cfg.psi * Eigen::MatrixXd::Identity(n, n);
        } else {
            system.bottomRightCorner(n, n) += cfg.psi * (*k);
        }
        return system;
    }
};

struct SmootherParts {
    double rss = 0.0;
    double trace = 0.0;
};

// Residual sum of squares and tr(H) from a single factorization, without
// forming the full hat matrix.
SmootherParts smoother_parts(const SystemCache& cache, const Eigen::MatrixXd& system,
                             const Eigen::VectorXd& y, const FitConfig& cfg) {
    Eigen::MatrixXd c;  // S^{-1} K~'
    if (cfg.psi > 0.0) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
        const double rcond = ldlt.rcond();
        const double condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
        if (ldlt.info() != Eigen::Success || !(rcond > 0.0) || condition > kConditionLimit) {
            throw SingularSystemError("smoother system singular or ill-conditioned (condition estimate " +
                                          format_condition(condition) + ")",
                                      condition);
        }
        c = ldlt.solve(cache.k_tilde.transpose());
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(system);
        const Eigen::VectorXd& evals = es.eigenvalues();
        const double tol = std::max(evals.cwiseAbs().maxCoeff(), 1e-300) * 1e-13;
        Eigen::VectorXd inv = (evals.array() > tol).select(evals.array().inverse(), 0.0);
        c = es.eigenvectors() * inv.asDiagonal() * (es.eigenvectors().transpose() * cache.k_tilde.transpose());
    }
    SmootherParts parts;
    parts.trace = cache.k_tilde.cwiseProduct(c.transpose()).sum();
    const Eigen::VectorXd fitted = cache.k_tilde * (c * y);
    parts.rss = (y - fitted).squaredNorm();
    return parts;
}

double gcv_from_parts(const SmootherParts& parts, Eigen::Index n) {
    const double dof_gap = static_cast<double>(n) - parts.trace;
    if (dof_gap <= 1e-8) {
        throw ConfigError("gcv undefined: trace of the hat matrix reaches the sample size (interpolating fit)");
    }
    return static_cast<double>(n) * parts.rss / (dof_gap * dof_gap);
}

// Scores within a small relative/absolute band count as tied; ties prefer
// the smoother model (larger lambda, then larger psi).
bool better_config(double score, const FitConfig& cfg, double best_score, const FitConfig& best,
                   double tie_floor) {
    const bool tied = std::abs(score - best_score) <=
                      1e-10 * (std::abs(score) + std::abs(best_score)) + tie_floor;
    if (!tied) return score < best_score;
    if (cfg.lambda != best.lambda) return cfg.lambda > best.lambda;
    return cfg.psi > best.psi;
}

}  // namespace

const char* to_string(WeightPenalty penalty) {
    return penalty == WeightPenalty::kEuclidean ? "euclidean" : "rkhs";
}

WeightPenalty weight_penalty_from_string(const std::string& name) {
    if (name == "euclidean") return WeightPenalty::kEuclidean;
    if (name == "rkhs") return WeightPenalty::kRkhs;
    throw ConfigError("unknown weight penalty form: " + name);
}

void FitConfig::validate() const {
    if (lambda < 0.0 || !std::isfinite(lambda)) throw ConfigError("lambda must be finite and >= 0");
    if (psi < 0.0 || !std::isfinite(psi)) throw ConfigError("psi must be finite and >= 0");
}

SelectionMethod SelectionMethod::gcv() { return {}; }

SelectionMethod SelectionMethod::kfold(int k, std::uint64_t seed) {
    SelectionMethod m;
    m.kind = Kind::kKfold;
    m.folds = k;
    m.seed = seed;
    return m;
}

DesignSystem assemble_system(const Eigen::MatrixXd& k, const Laplacian& laplacian,
                             const FitConfig& cfg) {
    cfg.validate();
    SystemCache cache(k, laplacian);
    const Eigen::Index n = cache.n;
    DesignSystem sys;
    sys.k_tilde = cache.k_tilde;
    sys.m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    sys.m.topLeftCorner(n, n) = laplacian.matrix;
    sys.n_mat = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    if (cfg.penalty == WeightPenalty::kEuclidean) {
        sys.n_mat.bottomRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    } else {
        sys.n_mat.bottomRightCorner(n, n) = k;
    }
    sys.system = cache.assemble(cfg);
    return sys;
}

double cohesion_objective(const Eigen::VectorXd& y, const Eigen::MatrixXd& k,
                          const Laplacian& laplacian, const FitConfig& cfg,
                          const Eigen::VectorXd& alpha, const Eigen::VectorXd& w) {
    const Eigen::VectorXd residual = y - alpha - k * w;
    const double weight_penalty =
        cfg.penalty == WeightPenalty::kEuclidean ? w.squaredNorm() : w.dot(k * w);
    return residual.squaredNorm() + cfg.lambda * alpha.dot(laplacian.matrix * alpha) +
           cfg.psi * weight_penalty;
}

CohesionFit fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& k, const Laplacian& laplacian,
                const FitConfig& cfg) {
    cfg.validate();
    SystemCache cache(k, laplacian);
    if (y.size() != cache.n) {
        throw DimensionError("response length " + std::to_string(y.size()) + " != n = " +
                             std::to_string(cache.n));
    }
    const Eigen::MatrixXd system = cache.assemble(cfg);
    SolveOutcome solved = solve_system(system, cache.k_tilde, y, cfg);

    CohesionFit result;
    result.alpha = solved.theta.head(cache.n);
    result.w = solved.theta.tail(cache.n);
    result.config = cfg;
    result.graph = laplacian.source;
    result.min_norm = solved.min_norm;
    result.condition = solved.condition;
    result.objective_value = cohesion_objective(y, k, laplacian, cfg, result.alpha, result.w);
    return result;
}

CohesionFit fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const Graph& g,
                const KernelSpec& kernel, const FitConfig& cfg) {
    if (x.rows() != g.n) {
        throw DimensionError("feature rows " + std::to_string(x.rows()) + " != graph nodes " +
                             std::to_string(g.n));
    }
    CohesionFit result = fit(y, gram(kernel, x), build_laplacian(g), cfg);
    result.kernel = kernel;
    result.x_train = x;
    return result;
}

CohesionFit fit_cohesion_only(const Eigen::VectorXd& y, const Eigen::MatrixXd& k,
                              const Laplacian& laplacian, double lambda) {
    FitConfig cfg;
    cfg.lambda = lambda;
    cfg.psi = 0.0;
    return fit(y, k, laplacian, cfg);
}

Eigen::MatrixXd hat_matrix(const Eigen::MatrixXd& k, const Laplacian& laplacian,
                           const FitConfig& cfg) {
    cfg.validate();
    if (cfg.psi == 0.0 && cfg.lambda == 0.0 && !cfg.allow_interpolation) {
        throw SingularSystemError("lambda = 0 and psi = 0 make the system singular; set allow_interpolation",
                                  std::numeric_limits<double>::infinity());
    }
    SystemCache cache(k, laplacian);
    const Eigen::MatrixXd system = cache.assemble(cfg);
    Eigen::MatrixXd c;
    if (cfg.psi > 0.0) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
        const double rcond = ldlt.rcond();
        const double condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
        if (ldlt.info() != Eigen::Success || !(rcond > 0.0) || condition > kConditionLimit) {
            throw SingularSystemError("hat matrix system singular or ill-conditioned (condition estimate " +
                                          format_condition(condition) + ")",
                                      condition);
        }
        c = ldlt.solve(cache.k_tilde.transpose());
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(system);
        const Eigen::VectorXd& evals = es.eigenvalues();
        const double tol = std::max(evals.cwiseAbs().maxCoeff(), 1e-300) * 1e-13;
        Eigen::VectorXd inv = (evals.array() > tol).select(evals.array().inverse(), 0.0);
        c = es.eigenvectors() * inv.asDiagonal() * (es.eigenvectors().transpose() * cache.k_tilde.transpose());
    }
    Eigen::MatrixXd h = cache.k_tilde * c;
    return 0.5 * (h + h.transpose());
}

double gcv_score(const Eigen::VectorXd& y, const Eigen::MatrixXd& k, const Laplacian& laplacian,
                 const FitConfig& cfg) {
    cfg.validate();
    SystemCache cache(k, laplacian);
    if (y.size() != cache.n) throw DimensionError("gcv_score: response length != n");
    const SmootherParts parts = smoother_parts(cache, cache.assemble(cfg), y, cfg);
    return gcv_from_parts(parts, cache.n);
}

namespace {

// Balanced fold labels over [0, n), resampled until every fold's held-out
// nodes stay reachable from the retained nodes through the graph.
std::vector<int> reachable_fold_labels(const Graph& g, int folds, std::uint64_t seed, int max_retries) {
    const int n = g.n;
    const std::vector<int> component = g.components();
    int n_components = 0;
    for (int c : component) n_components = std::max(n_components, c + 1);

    Rng rng(seed);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        rng.shuffle(order);
        std::vector<int> label(n);
        for (int i = 0; i < n; ++i) label[order[i]] = i % folds;

        bool ok = true;
        for (int f = 0; f < folds && ok; ++f) {
            // Component population outside fold f.
            std::vector<int> retained(n_components, 0);
            for (int v = 0; v < n; ++v) {
                if (label[v] != f) ++retained[component[v]];
            }
            for (int v = 0; v < n && ok; ++v) {
                if (label[v] == f && retained[component[v]] == 0) ok = false;
            }
        }
        if (ok) return label;
    }
    throw ConfigError("could not build a k-fold split with reachable held-out nodes after " +
                      std::to_string(max_retries) + " attempts");
}

double kfold_cv_score(const Eigen::VectorXd& y, const Eigen::MatrixXd& k, const Laplacian& laplacian,
                      const FitConfig& cfg, const std::vector<int>& fold_label, int folds) {
    const int n = laplacian.n();
    double sse = 0.0;
    for (int f = 0; f < folds; ++f) {
        std::vector<int> train, test;
        for (int v = 0; v < n; ++v) (fold_label[v] == f ? test : train).push_back(v);
        if (test.empty()) continue;

        const Eigen::MatrixXd k_ss = k(train, train);
        const Laplacian l_train = build_laplacian(laplacian.source.induced(train));
        Eigen::VectorXd y_train(train.size());
        for (std::size_t i = 0; i < train.size(); ++i) y_train[Eigen::Index(i)] = y[train[i]];

        const CohesionFit sub = fit(y_train, k_ss, l_train, cfg);
        const LaplacianPartition part = partition_laplacian(laplacian, train, test);
        const Eigen::VectorXd alpha_t = harmonic_extension(part, sub.alpha);
        const Eigen::VectorXd pred = alpha_t + k(test, train) * sub.w;
        for (std::size_t i = 0; i < test.size(); ++i) {
            const double r = y[test[i]] - pred[Eigen::Index(i)];
            sse += r * r;
        }
    }
    return sse / static_cast<double>(n);
}

}  // namespace

Eigen::MatrixXd gcv_grid(const Eigen::VectorXd& y, const Eigen::MatrixXd& k,
                         const Laplacian& laplacian, const std::vector<double>& lambda_grid,
                         const std::vector<double>& psi_grid) {
    const Eigen::Index n = k.rows();
    if (k.cols() != n || laplacian.n() != n || y.size() != n) {
        throw DimensionError("gcv_grid: inconsistent dimensions");
    }
    for (double psi : psi_grid) {
        if (!(psi > 0.0)) throw ConfigError("gcv_grid: psi grid values must be positive");
    }
    for (double lambda : lambda_grid) {
        if (lambda < 0.0) throw ConfigError("gcv_grid: lambda grid values must be >= 0");
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    Eigen::MatrixXd scores = Eigen::MatrixXd::Constant(
        static_cast<Eigen::Index>(lambda_grid.size()), static_cast<Eigen::Index>(psi_grid.size()), nan);

    // Block elimination of the 2n x 2n system: with A = I + lambda L the
    // stationarity equations reduce to
    //   (G + psi I) w = K (I - A^{-1}) y,   alpha = A^{-1} (y - K w)
    // where G = K (I - A^{-1}) K, and the smoother becomes
    //   H = A^{-1} + R (G + psi I)^{-1} R'   with R = (I - A^{-1}) K.
    // Diagonalizing L once and G once per lambda makes every psi point O(n^2).
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> l_eigen(laplacian.matrix);
    if (l_eigen.info() != Eigen::Success) {
        throw SingularSystemError("gcv_grid: Laplacian eigendecomposition failed",
                                  std::numeric_limits<double>::infinity());
    }
    const Eigen::MatrixXd& u = l_eigen.eigenvectors();
    const Eigen::VectorXd l_evals = l_eigen.eigenvalues().cwiseMax(0.0);
    const Eigen::MatrixXd ut_k = u.transpose() * k;
    const Eigen::VectorXd ut_y = u.transpose() * y;

    for (std::size_t li = 0; li < lambda_grid.size(); ++li) {
        const double lambda = lambda_grid[li];
        const Eigen::VectorXd a_inv_evals = (1.0 + lambda * l_evals.array()).inverse();
        const double trace_a_inv = a_inv_evals.sum();
        const Eigen::VectorXd a_inv_y = u * (a_inv_evals.asDiagonal() * ut_y);
        const Eigen::MatrixXd r = k - u * (a_inv_evals.asDiagonal() * ut_k);  // (I - A^{-1}) K
        Eigen::MatrixXd g = k * r;
        g = 0.5 * (g + g.transpose()).eval();

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> g_eigen(g);
        if (g_eigen.info() != Eigen::Success) continue;
        const Eigen::MatrixXd& v = g_eigen.eigenvectors();
        const Eigen::VectorXd g_evals = g_eigen.eigenvalues();
        const Eigen::MatrixXd rv = r * v;
        const Eigen::VectorXd rv_sqnorm = rv.colwise().squaredNorm();
        const Eigen::VectorXd vt_rty = v.transpose() * (r.transpose() * y);

        for (std::size_t pi = 0; pi < psi_grid.size(); ++pi) {
            const double psi = psi_grid[pi];
            const Eigen::ArrayXd denom = g_evals.array() + psi;
            if ((denom <= 0.0).any()) continue;
            const double trace = trace_a_inv + (rv_sqnorm.array() / denom).sum();
            const double dof_gap = static_cast<double>(n) - trace;
            if (dof_gap <= 1e-8) continue;
            const Eigen::VectorXd fitted = a_inv_y + rv * (vt_rty.array() / denom).matrix();
            const double rss = (y - fitted).squaredNorm();
            scores(static_cast<Eigen::Index>(li), static_cast<Eigen::Index>(pi)) =
                static_cast<double>(n) * rss / (dof_gap * dof_gap);
        }
    }
    return scores;
}

FitConfig select_hyperparameters(const Eigen::VectorXd& y, const Eigen::MatrixXd& k,
                                 const Laplacian& laplacian, const std::vector<FitConfig>& grid,
                                 const SelectionMethod& method) {
    if (grid.empty()) throw ConfigError("hyperparameter grid is empty");
    if (method.kind == SelectionMethod::Kind::kKfold && method.folds < 2) {
        throw ConfigError("k-fold selection requires k >= 2");
    }

    SystemCache cache(k, laplacian);
    if (y.size() != cache.n) throw DimensionError("select_hyperparameters: response length != n");

    std::vector<int> fold_label;
    if (method.kind == SelectionMethod::Kind::kKfold) {
        fold_label = reachable_fold_labels(laplacian.source, method.folds, method.seed, method.max_retries);
    }

    bool have_best = false;
    double best_score = 0.0;
    FitConfig best;
    const double tie_floor =
        1e-12 * (1.0 + y.squaredNorm() / static_cast<double>(cache.n));
    for (const FitConfig& cfg : grid) {
        cfg.validate();
        double score;
        try {
            if (method.kind == SelectionMethod::Kind::kGcv) {
                score = gcv_from_parts(smoother_parts(cache, cache.assemble(cfg), y, cfg), cache.n);
            } else {
                score = kfold_cv_score(y, k, laplacian, cfg, fold_label, method.folds);
            }
        } catch (const SingularSystemError&) {
            continue;
        } catch (const ConfigError&) {
            continue;  // criterion undefined at this grid point (e.g. interpolating fit)
        }
        if (!have_best || better_config(score, cfg, best_score, best, tie_floor)) {
            have_best = true;
            best_score = score;
            best = cfg;
        }
    }
    if (!have_best) {
        throw SingularSystemError("every grid point produced a singular system or undefined criterion",
                                  std::numeric_limits<double>::infinity());
    }
    return best;
}

}  // namespace netkrr
