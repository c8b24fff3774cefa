#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "netkrr/baselines.hpp"
#include "netkrr/graph.hpp"
#include "netkrr/kernel.hpp"
#include "netkrr/predict.hpp"
#include "netkrr/simulate.hpp"
#include "netkrr/solver.hpp"
#include "netkrr/version.hpp"

namespace py = pybind11;
using namespace netkrr;

PYBIND11_MODULE(_netkrr, m) {
    m.doc() = "kernel regression with network cohesion";
    m.attr("__version__") = kVersion;

    // ---- graph ----
    py::class_<Graph>(m, "Graph")
        .def(py::init([](int n, const std::vector<std::pair<int, int>>& edges) {
                 return Graph::from_edges(n, edges);
             }),
             py::arg("n"), py::arg("edges"))
        .def_readonly("n", &Graph::n)
        .def_readonly("edges", &Graph::edges)
        .def("adjacency", &Graph::adjacency)
        .def("degrees", &Graph::degrees)
        .def("components", &Graph::components)
        .def("induced", &Graph::induced, py::arg("nodes"))
        .def("__eq__", [](const Graph& a, const Graph& b) { return a == b; })
        .def("__repr__", [](const Graph& g) {
            return "Graph(n=" + std::to_string(g.n) + ", edges=" + std::to_string(g.edges.size()) + ")";
        });

    py::class_<Laplacian>(m, "Laplacian")
        .def_readonly("matrix", &Laplacian::matrix)
        .def_readonly("source", &Laplacian::source);

    py::class_<LaplacianPartition>(m, "LaplacianPartition")
        .def_readonly("ss", &LaplacianPartition::ss)
        .def_readonly("st", &LaplacianPartition::st)
        .def_readonly("ts", &LaplacianPartition::ts)
        .def_readonly("tt", &LaplacianPartition::tt)
        .def_readonly("train_index", &LaplacianPartition::train_index)
        .def_readonly("test_index", &LaplacianPartition::test_index);

    py::enum_<NetworkKind>(m, "NetworkKind")
        .value("uniform", NetworkKind::kUniform)
        .value("tight", NetworkKind::kTight)
        .value("open", NetworkKind::kOpen)
        .value("wide_open", NetworkKind::kWideOpen);

    py::class_<NetworkTopology>(m, "NetworkTopology")
        .def(py::init([](NetworkKind kind, int groups, double edge_budget) {
                 return NetworkTopology::make(kind, groups, edge_budget);
             }),
             py::arg("kind"), py::arg("groups") = 4, py::arg("edge_budget") = 16.0)
        .def_readwrite("kind", &NetworkTopology::kind)
        .def_readwrite("groups", &NetworkTopology::groups)
        .def_readwrite("concentration", &NetworkTopology::concentration)
        .def_readwrite("edge_budget", &NetworkTopology::edge_budget);

    m.def("build_laplacian", &build_laplacian, py::arg("graph"));
    m.def("cohesion_penalty", &cohesion_penalty, py::arg("laplacian"), py::arg("a"));
    m.def("partition_laplacian", &partition_laplacian, py::arg("laplacian"), py::arg("train_index"),
          py::arg("test_index"));
    m.def("harmonic_extension", &harmonic_extension, py::arg("partition"), py::arg("alpha_s"));
    m.def(
        "generate_network",
        [](const NetworkTopology& t, int n, std::uint64_t seed,
           const std::optional<std::vector<int>>& group_of) {
            return group_of ? generate_network(t, n, seed, *group_of) : generate_network(t, n, seed);
        },
        py::arg("topology"), py::arg("n"), py::arg("seed"), py::arg("group_of") = std::nullopt);

    // ---- kernels ----
    py::enum_<KernelFamily>(m, "KernelFamily")
        .value("rbf", KernelFamily::kRbf)
        .value("laplace", KernelFamily::kLaplace)
        .value("cosine", KernelFamily::kCosine)
        .value("polynomial", KernelFamily::kPolynomial)
        .value("tangent", KernelFamily::kTangent);

    py::class_<KernelSpec>(m, "KernelSpec")
        .def(py::init<>())
        .def_static("rbf", &KernelSpec::rbf, py::arg("gamma") = 1.0)
        .def_static("laplace", &KernelSpec::laplace, py::arg("gamma") = 1.0)
        .def_static("cosine", &KernelSpec::cosine)
        .def_static("polynomial", &KernelSpec::polynomial, py::arg("degree") = 2,
                    py::arg("offset") = 1.0)
        .def_static("tangent", &KernelSpec::tangent, py::arg("gamma") = 1.0, py::arg("offset") = 0.0)
        .def_static("defaults_for", &KernelSpec::defaults_for, py::arg("family"), py::arg("x"))
        .def_readwrite("family", &KernelSpec::family)
        .def_readwrite("gamma", &KernelSpec::gamma)
        .def_readwrite("degree", &KernelSpec::degree)
        .def_readwrite("offset", &KernelSpec::offset);

    m.def("kernel_eval", &kernel_eval, py::arg("spec"), py::arg("x"), py::arg("z"));
    m.def("gram", &gram, py::arg("spec"), py::arg("x"));
    m.def("cross_gram", &cross_gram, py::arg("spec"), py::arg("x_new"), py::arg("x_train"));
    m.def("default_gamma", &default_gamma, py::arg("x"));

    // ---- solver ----
    py::enum_<WeightPenalty>(m, "WeightPenalty")
        .value("euclidean", WeightPenalty::kEuclidean)
        .value("rkhs", WeightPenalty::kRkhs);

    py::class_<FitConfig>(m, "FitConfig")
        .def(py::init([](double lambda, double psi, WeightPenalty penalty, bool allow_interpolation) {
                 FitConfig cfg;
                 cfg.lambda = lambda;
                 cfg.psi = psi;
                 cfg.penalty = penalty;
                 cfg.allow_interpolation = allow_interpolation;
                 return cfg;
             }),
             py::arg("lambda_") = 1.0, py::arg("psi") = 1.0,
             py::arg("penalty") = WeightPenalty::kEuclidean, py::arg("allow_interpolation") = false)
        .def_readwrite("lambda_", &FitConfig::lambda)
        .def_readwrite("psi", &FitConfig::psi)
        .def_readwrite("penalty", &FitConfig::penalty)
        .def_readwrite("allow_interpolation", &FitConfig::allow_interpolation);

    py::class_<CohesionFit>(m, "CohesionFit")
        .def_readonly("alpha", &CohesionFit::alpha)
        .def_readonly("w", &CohesionFit::w)
        .def_readonly("config", &CohesionFit::config)
        .def_readonly("kernel", &CohesionFit::kernel)
        .def_readonly("x_train", &CohesionFit::x_train)
        .def_readonly("graph", &CohesionFit::graph)
        .def_readonly("objective_value", &CohesionFit::objective_value)
        .def_readonly("min_norm", &CohesionFit::min_norm)
        .def_readonly("condition", &CohesionFit::condition);

    m.def(
        "fit",
        [](const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const Graph& g,
           const KernelSpec& kernel, const FitConfig& cfg) { return fit(y, x, g, kernel, cfg); },
        py::arg("y"), py::arg("x"), py::arg("graph"), py::arg("kernel"), py::arg("config"));
    m.def(
        "fit_from_gram",
        [](const Eigen::VectorXd& y, const Eigen::MatrixXd& k, const Laplacian& l,
           const FitConfig& cfg) { return fit(y, k, l, cfg); },
        py::arg("y"), py::arg("k"), py::arg("laplacian"), py::arg("config"));
    m.def("fit_cohesion_only", &fit_cohesion_only, py::arg("y"), py::arg("k"), py::arg("laplacian"),
          py::arg("lambda_"));
    m.def("hat_matrix", &hat_matrix, py::arg("k"), py::arg("laplacian"), py::arg("config"));
    m.def("gcv_score", &gcv_score, py::arg("y"), py::arg("k"), py::arg("laplacian"), py::arg("config"));
    m.def("cohesion_objective", &cohesion_objective, py::arg("y"), py::arg("k"), py::arg("laplacian"),
          py::arg("config"), py::arg("alpha"), py::arg("w"));

    py::class_<SelectionMethod>(m, "SelectionMethod")
        .def_static("gcv", &SelectionMethod::gcv)
        .def_static("kfold", &SelectionMethod::kfold, py::arg("k"), py::arg("seed") = 0);
    m.def("select_hyperparameters", &select_hyperparameters, py::arg("y"), py::arg("k"),
          py::arg("laplacian"), py::arg("grid"), py::arg("method"));

    // ---- prediction ----
    py::class_<PredictionInput>(m, "PredictionInput")
        .def(py::init([](const Eigen::MatrixXd& x_new, const Graph& full_graph,
                         const std::vector<int>& train_index, const std::vector<int>& test_index,
                         bool allow_graph_drift) {
                 PredictionInput input;
                 input.x_new = x_new;
                 input.full_graph = full_graph;
                 input.train_index = train_index;
                 input.test_index = test_index;
                 input.allow_graph_drift = allow_graph_drift;
                 return input;
             }),
             py::arg("x_new"), py::arg("full_graph"), py::arg("train_index"), py::arg("test_index"),
             py::arg("allow_graph_drift") = false);
    m.def("fitted_values", &fitted_values, py::arg("fit"));
    m.def("predict", &predict, py::arg("fit"), py::arg("input"));
    m.def("mse", &mse, py::arg("y_true"), py::arg("y_pred"));

    // ---- baselines ----
    m.def("fit_ols", &fit_ols, py::arg("y"), py::arg("x"));
    m.def("predict_ols", &predict_ols, py::arg("coef"), py::arg("x"));

    py::class_<LinearCohesionFit>(m, "LinearCohesionFit")
        .def_readonly("alpha", &LinearCohesionFit::alpha)
        .def_readonly("beta", &LinearCohesionFit::beta)
        .def_readonly("lambda_", &LinearCohesionFit::lambda)
        .def_readonly("min_norm", &LinearCohesionFit::min_norm);
    m.def("fit_linear_cohesion", &fit_linear_cohesion, py::arg("y"), py::arg("x"),
          py::arg("laplacian"), py::arg("lambda_"), py::arg("allow_interpolation") = false);

    py::class_<KernelRidgeFit>(m, "KernelRidgeFit")
        .def_readonly("w", &KernelRidgeFit::w)
        .def_readonly("lambda_", &KernelRidgeFit::lambda)
        .def_readonly("kernel", &KernelRidgeFit::kernel)
        .def_readonly("y_offset", &KernelRidgeFit::y_offset);
    m.def(
        "fit_kernel_ridge",
        [](const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const KernelSpec& kernel,
           double lambda) { return fit_kernel_ridge(y, x, kernel, lambda); },
        py::arg("y"), py::arg("x"), py::arg("kernel"), py::arg("lambda_"));
    m.def("predict_kernel_ridge", &predict_kernel_ridge, py::arg("fit"), py::arg("x_new"));

    // ---- simulation ----
    py::enum_<Nonlinearity>(m, "Nonlinearity")
        .value("linear", Nonlinearity::kLinear)
        .value("sine", Nonlinearity::kSine)
        .value("quadratic", Nonlinearity::kQuadratic);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("n", &SimConfig::n)
        .def_readwrite("p", &SimConfig::p)
        .def_readwrite("groups", &SimConfig::groups)
        .def_readwrite("topology", &SimConfig::topology)
        .def_readwrite("noise_sd", &SimConfig::noise_sd)
        .def_readwrite("effect_scale", &SimConfig::effect_scale)
        .def_readwrite("nonlinearity", &SimConfig::nonlinearity)
        .def_readwrite("seed", &SimConfig::seed)
        .def_readwrite("align_groups", &SimConfig::align_groups);

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("x", &Dataset::x)
        .def_readonly("y", &Dataset::y);

    py::class_<SimData>(m, "SimData")
        .def_readonly("data", &SimData::data)
        .def_readonly("graph", &SimData::graph)
        .def_readonly("alpha_true", &SimData::alpha_true)
        .def_readonly("group_of", &SimData::group_of);
    m.def("generate_dataset", &generate_dataset, py::arg("config"));

    py::class_<ReportRow>(m, "ReportRow")
        .def_readonly("machine", &ReportRow::machine)
        .def_readonly("kind", &ReportRow::kind)
        .def_readonly("split", &ReportRow::split)
        .def_readonly("run", &ReportRow::run)
        .def_readonly("mse", &ReportRow::mse);

    py::class_<BenchmarkReport>(m, "BenchmarkReport").def_readonly("rows", &BenchmarkReport::rows);

    py::class_<BenchmarkOptions>(m, "BenchmarkOptions")
        .def(py::init<>())
        .def_readwrite("runs", &BenchmarkOptions::runs)
        .def_readwrite("split_fraction", &BenchmarkOptions::split_fraction)
        .def_readwrite("lambda_grid", &BenchmarkOptions::lambda_grid)
        .def_readwrite("psi_grid", &BenchmarkOptions::psi_grid)
        .def_readwrite("fixed_lambda", &BenchmarkOptions::fixed_lambda)
        .def_readwrite("fixed_psi", &BenchmarkOptions::fixed_psi)
        .def_readwrite("save_predictions", &BenchmarkOptions::save_predictions);

    py::class_<SummaryRow>(m, "SummaryRow")
        .def_readonly("machine", &SummaryRow::machine)
        .def_readonly("kind", &SummaryRow::kind)
        .def_readonly("split", &SummaryRow::split)
        .def_readonly("mean", &SummaryRow::mean)
        .def_readonly("sd", &SummaryRow::sd)
        .def_readonly("runs", &SummaryRow::runs);

    m.def(
        "run_benchmark",
        [](const SimConfig& cfg, const std::vector<std::string>& machines,
           const BenchmarkOptions& options) { return run_benchmark(cfg, machines, options); },
        py::arg("config"), py::arg("machines"), py::arg("options") = BenchmarkOptions());
    m.def("summarize", &summarize, py::arg("report"));
    m.def("default_machines", &default_machines);
    m.def("default_penalty_grid", &default_penalty_grid);

    // library errors surface as ValueError (bad inputs) or RuntimeError
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<SingularSystemError>(m, "SingularSystemError", PyExc_RuntimeError);
    py::register_exception<UnreachableNodesError>(m, "UnreachableNodesError", PyExc_RuntimeError);
    py::register_exception<GraphDriftError>(m, "GraphDriftError", PyExc_RuntimeError);
}
