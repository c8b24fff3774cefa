#include <doctest.h>

#include <Eigen/Dense>

#include "netkrr/rng.hpp"
#include "netkrr/solver.hpp"
#include "oracles.hpp"

using namespace netkrr;

namespace {

struct Instance {
    Graph graph;
    Laplacian laplacian;
    Eigen::MatrixXd x;
    Eigen::MatrixXd k;
    Eigen::VectorXd y;
};

Instance make_instance(Rng& rng, int n, int p, const KernelSpec& spec, bool connected = true) {
    Instance inst;
    inst.graph = oracles::random_graph(rng, n, 0.3, connected);
    inst.laplacian = build_laplacian(inst.graph);
    inst.x = oracles::random_matrix(rng, n, p);
    inst.k = gram(spec, inst.x);
    inst.y = oracles::random_vector(rng, n);
    return inst;
}

FitConfig config(double lambda, double psi, WeightPenalty penalty = WeightPenalty::kEuclidean) {
    FitConfig cfg;
    cfg.lambda = lambda;
    cfg.psi = psi;
    cfg.penalty = penalty;
    return cfg;
}

}  // namespace

TEST_CASE("assemble_system: 2x2 system by hand") {
    const Eigen::MatrixXd k = Eigen::MatrixXd::Ones(1, 1);
    const Laplacian l = build_laplacian(Graph::from_edges(1, {}));
    const DesignSystem sys = assemble_system(k, l, config(1.0, 1.0));
    Eigen::MatrixXd expected(2, 2);
    expected << 1, 1, 1, 2;
    CHECK((sys.system - expected).cwiseAbs().maxCoeff() == 0.0);
    CHECK(sys.k_tilde(0, 0) == 1.0);
    CHECK(sys.k_tilde(0, 1) == 1.0);
}

TEST_CASE("assemble_system: lambda = psi = 0 has rank n") {
    Rng rng(3);
    const Instance inst = make_instance(rng, 5, 2, KernelSpec::rbf(1.0));
    FitConfig cfg = config(0.0, 0.0);
    cfg.allow_interpolation = true;
    const DesignSystem sys = assemble_system(inst.k, inst.laplacian, cfg);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.system);
    int rank = 0;
    const double tol = es.eigenvalues().cwiseAbs().maxCoeff() * 1e-12;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        if (es.eigenvalues()[i] > tol) ++rank;
    }
    CHECK(rank == 5);
}

TEST_CASE("assemble_system matches independently assembled blocks") {
    Rng rng(13);
    for (const WeightPenalty penalty : {WeightPenalty::kEuclidean, WeightPenalty::kRkhs}) {
        const Instance inst = make_instance(rng, 6, 2, KernelSpec::rbf(0.8));
        const double lambda = 0.7, psi = 0.4;
        const DesignSystem sys = assemble_system(inst.k, inst.laplacian, config(lambda, psi, penalty));

        const Eigen::Index n = 6;
        Eigen::MatrixXd expected(2 * n, 2 * n);
        expected.topLeftCorner(n, n) =
            Eigen::MatrixXd::Identity(n, n) + lambda * inst.laplacian.matrix;
        expected.topRightCorner(n, n) = inst.k;
        expected.bottomLeftCorner(n, n) = inst.k.transpose();
        expected.bottomRightCorner(n, n) =
            inst.k.transpose() * inst.k +
            psi * (penalty == WeightPenalty::kEuclidean
                       ? Eigen::MatrixXd(Eigen::MatrixXd::Identity(n, n))
                       : inst.k);
        CHECK((sys.system - expected).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("assemble_system rejects mismatched dimensions") {
    const Laplacian l = build_laplacian(Graph::from_edges(3, {{0, 1}}));
    CHECK_THROWS_AS(assemble_system(Eigen::MatrixXd::Identity(2, 2), l, config(1, 1)), DimensionError);
}

TEST_CASE("fit: lambda = 0 with psi > 0 interpolates through the intercepts") {
    Rng rng(17);
    const Instance inst = make_instance(rng, 9, 2, KernelSpec::rbf(1.0));
    const CohesionFit fit_result = fit(inst.y, inst.k, inst.laplacian, config(0.0, 0.5));
    CHECK((fit_result.alpha - inst.y).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(fit_result.w.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("fit: scalar instance by hand") {
    const Eigen::MatrixXd k = Eigen::MatrixXd::Ones(1, 1);
    const Laplacian l = build_laplacian(Graph::from_edges(1, {}));
    Eigen::VectorXd y(1);
    y << 2.0;
    const CohesionFit result = fit(y, k, l, config(1.0, 1.0));
    CHECK(result.alpha[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(result.w[0] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("fit matches the conjugate-gradient oracle") {
    Rng rng(29);
    const KernelSpec specs[] = {KernelSpec::rbf(0.9), KernelSpec::laplace(0.7),
                                KernelSpec::polynomial(2, 1.0)};
    for (const KernelSpec& spec : specs) {
        for (const WeightPenalty penalty : {WeightPenalty::kEuclidean, WeightPenalty::kRkhs}) {
            // the rkhs penalty needs a full-rank Gram; the degree-2 polynomial
            // kernel has rank <= (p+1)(p+2)/2, so give it enough features
            const bool low_rank = spec.family == KernelFamily::kPolynomial;
            const int p = (penalty == WeightPenalty::kRkhs && low_rank) ? 12 : 2;
            const Instance inst = make_instance(rng, 12, p, spec);
            const FitConfig cfg = config(0.8, 0.6, penalty);
            const CohesionFit result = fit(inst.y, inst.k, inst.laplacian, cfg);
            const auto [alpha, w] =
                oracles::cg_minimize_objective(inst.y, inst.k, inst.laplacian.matrix, cfg);
            CHECK((result.alpha - alpha).cwiseAbs().maxCoeff() <= 1e-6);
            CHECK((result.w - w).cwiseAbs().maxCoeff() <= 1e-6);
        }
    }
}

TEST_CASE("fit satisfies the stationarity equations") {
    Rng rng(31);
    const Instance inst = make_instance(rng, 10, 3, KernelSpec::rbf(1.1));
    const FitConfig cfg = config(2.0, 0.3);
    const DesignSystem sys = assemble_system(inst.k, inst.laplacian, cfg);
    const CohesionFit result = fit(inst.y, inst.k, inst.laplacian, cfg);
    Eigen::VectorXd theta(20);
    theta << result.alpha, result.w;
    const Eigen::VectorXd residual =
        sys.system * theta - sys.k_tilde.transpose() * inst.y;
    CHECK(residual.norm() <= 1e-8 * inst.y.norm());
}

TEST_CASE("fit objective beats random candidates") {
    Rng rng(37);
    const Instance inst = make_instance(rng, 8, 2, KernelSpec::rbf(1.0));
    const FitConfig cfg = config(0.5, 0.5);
    const CohesionFit result = fit(inst.y, inst.k, inst.laplacian, cfg);
    CHECK(result.objective_value <= inst.y.squaredNorm() + 1e-12);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::VectorXd a = oracles::random_vector(rng, 8);
        const Eigen::VectorXd w = oracles::random_vector(rng, 8);
        CHECK(result.objective_value <=
              cohesion_objective(inst.y, inst.k, inst.laplacian, cfg, a, w) + 1e-12);
    }
}

TEST_CASE("fit: lambda = psi = 0 guarded behind allow_interpolation") {
    Rng rng(41);
    const Instance inst = make_instance(rng, 6, 2, KernelSpec::rbf(1.0));
    CHECK_THROWS_AS(fit(inst.y, inst.k, inst.laplacian, config(0.0, 0.0)), SingularSystemError);

    FitConfig cfg = config(0.0, 0.0);
    cfg.allow_interpolation = true;
    const CohesionFit result = fit(inst.y, inst.k, inst.laplacian, cfg);
    CHECK(result.min_norm);
    CHECK((result.alpha - inst.y).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(result.w.cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("fit: rkhs penalty with a rank-deficient kernel is singular") {
    Rng rng(43);
    // cosine gram over 2-d features has rank <= 2 << n
    const Instance inst = make_instance(rng, 8, 2, KernelSpec::cosine());
    CHECK_THROWS_AS(fit(inst.y, inst.k, inst.laplacian, config(0.5, 0.5, WeightPenalty::kRkhs)),
                    SingularSystemError);
}

TEST_CASE("fit_cohesion_only equals fit with psi = 0") {
    Rng rng(47);
    const Instance inst = make_instance(rng, 7, 2, KernelSpec::rbf(1.0));
    const CohesionFit a = fit_cohesion_only(inst.y, inst.k, inst.laplacian, 0.9);
    const CohesionFit b = fit(inst.y, inst.k, inst.laplacian, config(0.9, 0.0));
    CHECK((a.alpha - b.alpha).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.w - b.w).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.min_norm);  // alpha/w confounding direction makes psi = 0 singular
}

TEST_CASE("fit_cohesion_only: canonical 4x4 hand solve") {
    // Path graph on two nodes, K = I, lambda = 1, Y = (2, 0). Minimizers form
    // the line alpha = (a, a), w = (2 - a, -a); the smallest-|w| member has
    // a = 1. Fitted values are Y exactly and the objective is 0.
    const Eigen::MatrixXd k = Eigen::MatrixXd::Identity(2, 2);
    const Laplacian l = build_laplacian(Graph::from_edges(2, {{0, 1}}));
    Eigen::VectorXd y(2);
    y << 2.0, 0.0;
    const CohesionFit result = fit_cohesion_only(y, k, l, 1.0);
    CHECK(result.alpha[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(result.alpha[1] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(result.w[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(result.w[1] == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(result.objective_value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("fit_cohesion_only: huge lambda flattens the effects") {
    Rng rng(53);
    const Instance inst = make_instance(rng, 8, 2, KernelSpec::rbf(1.0));
    const CohesionFit result = fit_cohesion_only(inst.y, inst.k, inst.laplacian, 1e6);
    const double spread = result.alpha.maxCoeff() - result.alpha.minCoeff();
    CHECK(spread <= 1e-3 * (1.0 + inst.y.norm()));
}

TEST_CASE("lambda limit: alpha spread decreases along an increasing grid") {
    Rng rng(59);
    const Instance inst = make_instance(rng, 10, 2, KernelSpec::rbf(1.0));
    double previous = std::numeric_limits<double>::infinity();
    for (const double lambda : {1e-2, 1e0, 1e2, 1e4, 1e6}) {
        const CohesionFit result = fit(inst.y, inst.k, inst.laplacian, config(lambda, 1.0));
        const double spread = result.alpha.maxCoeff() - result.alpha.minCoeff();
        CHECK(spread <= previous * (1.0 + 1e-9));
        previous = spread;
    }
    CHECK(previous <= 1e-3 * (1.0 + inst.y.norm()));
}

TEST_CASE("permutation equivariance of the fit") {
    Rng rng(61);
    const int n = 11;
    const KernelSpec spec = KernelSpec::rbf(1.0);
    const Instance inst = make_instance(rng, n, 2, spec);
    const FitConfig cfg = config(0.8, 0.4);
    const CohesionFit base = fit(inst.y, inst.k, inst.laplacian, cfg);
    const Eigen::VectorXd base_fitted = base.alpha + inst.k * base.w;

    std::vector<int> sigma(n);  // sigma[old] = new label
    std::iota(sigma.begin(), sigma.end(), 0);
    rng.shuffle(sigma);

    std::vector<std::pair<int, int>> relabeled;
    for (const auto& [u, v] : inst.graph.edges) relabeled.emplace_back(sigma[u], sigma[v]);
    const Graph g2 = Graph::from_edges(n, relabeled);
    Eigen::MatrixXd x2(n, 2);
    Eigen::VectorXd y2(n);
    for (int i = 0; i < n; ++i) {
        x2.row(sigma[i]) = inst.x.row(i);
        y2[sigma[i]] = inst.y[i];
    }
    const Eigen::MatrixXd k2 = gram(spec, x2);
    const CohesionFit permuted = fit(y2, k2, build_laplacian(g2), cfg);
    const Eigen::VectorXd permuted_fitted = permuted.alpha + k2 * permuted.w;

    for (int i = 0; i < n; ++i) {
        CHECK(std::abs(permuted.alpha[sigma[i]] - base.alpha[i]) <= 1e-10);
        CHECK(std::abs(permuted.w[sigma[i]] - base.w[i]) <= 1e-10);
        CHECK(std::abs(permuted_fitted[sigma[i]] - base_fitted[i]) <= 1e-10);
    }
}

TEST_CASE("hat matrix: identity at lambda = 0, psi > 0") {
    Rng rng(67);
    const Instance inst = make_instance(rng, 7, 2, KernelSpec::rbf(1.0));
    const Eigen::MatrixXd h = hat_matrix(inst.k, inst.laplacian, config(0.0, 0.7));
    CHECK((h - Eigen::MatrixXd::Identity(7, 7)).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("hat matrix: symmetric with spectrum in [0, 1], reproduces fitted values") {
    Rng rng(71);
    for (int trial = 0; trial < 20; ++trial) {
        const Instance inst = make_instance(rng, 9, 2, KernelSpec::rbf(0.9));
        const FitConfig cfg = config(0.5 + trial * 0.1, 0.3 + trial * 0.05);
        const Eigen::MatrixXd h = hat_matrix(inst.k, inst.laplacian, cfg);
        CHECK((h - h.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        CHECK(es.eigenvalues().minCoeff() >= -1e-8);
        CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-8);

        const CohesionFit result = fit(inst.y, inst.k, inst.laplacian, cfg);
        const Eigen::VectorXd fitted = result.alpha + inst.k * result.w;
        CHECK((h * inst.y - fitted).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("hat matrix trace strictly decreases in lambda") {
    Rng rng(73);
    const Instance inst = make_instance(rng, 10, 2, KernelSpec::rbf(1.0));
    double previous = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 7; ++i) {
        const double lambda = std::pow(10.0, -3.0 + i);
        const double trace = hat_matrix(inst.k, inst.laplacian, config(lambda, 0.5)).trace();
        CHECK(trace < previous);
        previous = trace;
    }
}

TEST_CASE("gcv: guards and closed forms") {
    Rng rng(79);
    const Instance inst = make_instance(rng, 8, 2, KernelSpec::rbf(1.0));
    CHECK_THROWS_AS(gcv_score(inst.y, inst.k, inst.laplacian, config(0.0, 0.5)), ConfigError);

    // constants are reproduced exactly: zero residual with trace < n
    const Eigen::VectorXd constant = Eigen::VectorXd::Constant(8, 3.0);
    CHECK(gcv_score(constant, inst.k, inst.laplacian, config(1.0, 1.0)) ==
          doctest::Approx(0.0).epsilon(1e-12));

    // matches recomputation from the explicit hat matrix
    const FitConfig cfg = config(0.7, 0.4);
    const Eigen::MatrixXd h = hat_matrix(inst.k, inst.laplacian, cfg);
    const double expected = 8.0 * (inst.y - h * inst.y).squaredNorm() / std::pow(8.0 - h.trace(), 2);
    CHECK(gcv_score(inst.y, inst.k, inst.laplacian, cfg) ==
          doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("gcv_grid matches per-point gcv_score") {
    Rng rng(83);
    const Instance inst = make_instance(rng, 9, 2, KernelSpec::rbf(1.0));
    const std::vector<double> lambdas = {1e-2, 1.0, 10.0};
    const std::vector<double> psis = {1e-1, 1.0};
    const Eigen::MatrixXd scores = gcv_grid(inst.y, inst.k, inst.laplacian, lambdas, psis);
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        for (std::size_t j = 0; j < psis.size(); ++j) {
            const double expected =
                gcv_score(inst.y, inst.k, inst.laplacian, config(lambdas[i], psis[j]));
            CHECK(scores(Eigen::Index(i), Eigen::Index(j)) ==
                  doctest::Approx(expected).epsilon(1e-8));
        }
    }
}

TEST_CASE("select_hyperparameters: singleton, ties, and cohesion signal") {
    Rng rng(89);
    const Instance inst = make_instance(rng, 10, 2, KernelSpec::rbf(1.0));

    const std::vector<FitConfig> singleton = {config(0.3, 0.2)};
    const FitConfig chosen = select_hyperparameters(inst.y, inst.k, inst.laplacian, singleton,
                                                    SelectionMethod::gcv());
    CHECK(chosen.lambda == 0.3);
    CHECK(chosen.psi == 0.2);

    // constant response: every config scores exactly zero; ties prefer the
    // smoothest model (largest lambda then psi)
    const Eigen::VectorXd constant = Eigen::VectorXd::Constant(10, 2.0);
    const std::vector<FitConfig> grid = {config(0.1, 0.1), config(10.0, 0.1), config(10.0, 5.0)};
    const FitConfig smooth = select_hyperparameters(constant, inst.k, inst.laplacian, grid,
                                                    SelectionMethod::gcv());
    CHECK(smooth.lambda == 10.0);
    CHECK(smooth.psi == 5.0);

    CHECK_THROWS_AS(select_hyperparameters(inst.y, inst.k, inst.laplacian, {},
                                           SelectionMethod::gcv()),
                    ConfigError);
}

TEST_CASE("select_hyperparameters favors cohesion when the signal has group structure") {
    Rng rng(97);
    const int n = 20;
    // two cliques joined by one edge, far-apart group effects
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < 10; ++u) {
        for (int v = u + 1; v < 10; ++v) {
            edges.emplace_back(u, v);
            edges.emplace_back(u + 10, v + 10);
        }
    }
    edges.emplace_back(9, 10);
    const Graph g = Graph::from_edges(n, edges);
    const Laplacian l = build_laplacian(g);
    const Eigen::MatrixXd x = oracles::random_matrix(rng, n, 2);
    const Eigen::MatrixXd k = gram(KernelSpec::rbf(1.0), x);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = (i < 10 ? -3.0 : 3.0) + 0.1 * rng.normal();

    const std::vector<FitConfig> grid = {config(0.0, 1.0), config(1.0, 1.0), config(10.0, 1.0)};
    const FitConfig chosen =
        select_hyperparameters(y, k, l, grid, SelectionMethod::gcv());
    CHECK(chosen.lambda > 0.0);
}

TEST_CASE("select_hyperparameters: k-fold runs and is deterministic") {
    Rng rng(101);
    const Instance inst = make_instance(rng, 18, 2, KernelSpec::rbf(1.0));
    const std::vector<FitConfig> grid = {config(0.1, 0.5), config(1.0, 0.5), config(10.0, 0.5)};
    const FitConfig a = select_hyperparameters(inst.y, inst.k, inst.laplacian, grid,
                                               SelectionMethod::kfold(4, 9));
    const FitConfig b = select_hyperparameters(inst.y, inst.k, inst.laplacian, grid,
                                               SelectionMethod::kfold(4, 9));
    CHECK(a.lambda == b.lambda);
    CHECK(a.psi == b.psi);
    CHECK_THROWS_AS(select_hyperparameters(inst.y, inst.k, inst.laplacian, grid,
                                           SelectionMethod::kfold(1, 9)),
                    ConfigError);
}

TEST_CASE("select_hyperparameters: all grid points singular") {
    Rng rng(103);
    const Instance inst = make_instance(rng, 8, 2, KernelSpec::cosine());
    const std::vector<FitConfig> grid = {config(0.5, 0.5, WeightPenalty::kRkhs),
                                         config(1.0, 1.0, WeightPenalty::kRkhs)};
    CHECK_THROWS_AS(select_hyperparameters(inst.y, inst.k, inst.laplacian, grid,
                                           SelectionMethod::gcv()),
                    SingularSystemError);
}
