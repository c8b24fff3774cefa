#include "netkrr/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "netkrr/baselines.hpp"
#include "netkrr/rng.hpp"
#include "netkrr/solver.hpp"

namespace netkrr {

const char* to_string(Nonlinearity f) {
    switch (f) {
        case Nonlinearity::kLinear: return "linear";
        case Nonlinearity::kSine: return "sine";
        case Nonlinearity::kQuadratic: return "quadratic";
    }
    return "?";
}

Nonlinearity nonlinearity_from_string(const std::string& name) {
    if (name == "linear") return Nonlinearity::kLinear;
    if (name == "sine") return Nonlinearity::kSine;
    if (name == "quadratic") return Nonlinearity::kQuadratic;
    throw ConfigError("unknown nonlinearity: " + name);
}

void SimConfig::validate() const {
    if (n < 1 || p < 1 || groups < 1) throw ConfigError("n, p, groups must be positive");
    if (n % groups != 0) {
        throw ConfigError("n = " + std::to_string(n) + " must be divisible by groups = " +
                          std::to_string(groups) + " for balanced assignment");
    }
    if (!(noise_sd > 0.0)) throw ConfigError("noise_sd must be positive");
    if (!std::isfinite(effect_scale)) throw ConfigError("effect_scale must be finite");
}

double signal_value(Nonlinearity f, const Eigen::Ref<const Eigen::VectorXd>& x) {
    const double x1 = x.size() > 0 ? x[0] : 0.0;
    const double x2 = x.size() > 1 ? x[1] : 0.0;
    switch (f) {
        case Nonlinearity::kLinear: return x1 + 0.5 * x2;
        case Nonlinearity::kSine: return std::sin(x1) + 0.5 * x2 * x2;
        case Nonlinearity::kQuadratic: return 0.5 * (x1 * x1 + x2 * x2);
    }
    return 0.0;
}

SimData generate_dataset(const SimConfig& cfg) {
    cfg.validate();
    const int n = cfg.n;
    const int per_group = n / cfg.groups;

    SimData sim;
    sim.group_of.resize(n);
    for (int i = 0; i < n; ++i) sim.group_of[i] = i / per_group;

    // Centered group offsets: spread grows linearly in effect_scale.
    sim.alpha_true.resize(n);
    const double mid = 0.5 * (cfg.groups - 1);
    for (int i = 0; i < n; ++i) {
        sim.alpha_true[i] = cfg.effect_scale * (sim.group_of[i] - mid);
    }

    Rng root(cfg.seed);
    Rng rng_x = root.fork(1);
    Rng rng_noise = root.fork(2);

    sim.data.x.resize(n, cfg.p);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < cfg.p; ++j) sim.data.x(i, j) = rng_x.normal();
    }
    sim.data.y.resize(n);
    for (int i = 0; i < n; ++i) {
        sim.data.y[i] = sim.alpha_true[i] + signal_value(cfg.nonlinearity, sim.data.x.row(i).transpose()) +
                        cfg.noise_sd * rng_noise.normal();
    }

    std::vector<int> network_groups = sim.group_of;
    if (!cfg.align_groups) {
        Rng rng_perm = root.fork(4);
        rng_perm.shuffle(network_groups);
    }
    NetworkTopology topology = cfg.topology;
    topology.groups = cfg.groups;
    sim.graph = generate_network(topology, n, Rng::mix_seed(cfg.seed, 3), network_groups);
    return sim;
}

MachineSpec MachineSpec::parse(const std::string& tag) {
    MachineSpec spec;
    spec.tag = tag;
    if (tag == "mlr") {
        spec.kind = Kind::kMlr;
        return spec;
    }
    if (tag == "lin") {
        spec.kind = Kind::kLinearCohesion;
        return spec;
    }
    const auto dash = tag.find('-');
    if (dash != std::string::npos) {
        const std::string head = tag.substr(0, dash);
        const std::string fam = tag.substr(dash + 1);
        if (head == "cohesion") {
            spec.kind = Kind::kCohesionKernel;
            spec.family = kernel_family_from_string(fam);
            return spec;
        }
        if (head == "krr") {
            spec.kind = Kind::kKernelRidge;
            spec.family = kernel_family_from_string(fam);
            return spec;
        }
    }
    throw ConfigError("unknown machine tag: " + tag +
                      " (expected mlr, lin, cohesion-<kernel>, or krr-<kernel>)");
}

std::vector<std::string> default_machines() {
    return {"mlr", "lin", "cohesion-rbf", "cohesion-laplace", "krr-rbf", "krr-laplace"};
}

int machine_order(const std::string& tag) {
    static const std::vector<std::string> order = {
        "mlr",          "lin",           "cohesion-cosine", "cohesion-rbf", "cohesion-laplace",
        "cohesion-tangent", "cohesion-poly", "krr-cosine",      "krr-rbf",      "krr-laplace",
        "krr-tangent",  "krr-poly",
    };
    const auto it = std::find(order.begin(), order.end(), tag);
    return it == order.end() ? static_cast<int>(order.size()) : static_cast<int>(it - order.begin());
}

int network_kind_order(const std::string& kind) {
    if (kind == "uniform") return 0;
    if (kind == "tight") return 1;
    if (kind == "wide-open") return 2;
    if (kind == "open") return 3;
    return 4;
}

std::vector<double> default_penalty_grid() {
    std::vector<double> grid(7);
    for (int i = 0; i < 7; ++i) grid[i] = std::pow(10.0, -3.0 + 5.0 * i / 6.0);
    return grid;
}

namespace {

// GCV selection for plain kernel ridge through the eigenvalues of K.
double select_krr_lambda(const Eigen::VectorXd& y, const Eigen::MatrixXd& k,
                         const std::vector<double>& grid) {
    const Eigen::Index n = k.rows();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
    const Eigen::VectorXd& d = es.eigenvalues();
    const Eigen::VectorXd centered = y.array() - y.mean();
    const Eigen::VectorXd vt_y = es.eigenvectors().transpose() * centered;

    double best_score = std::numeric_limits<double>::infinity();
    double best_lambda = grid.front();
    bool have_best = false;
    for (double lambda : grid) {
        const Eigen::ArrayXd denom = d.array() + static_cast<double>(n) * lambda;
        if ((denom.abs() < 1e-12).any()) continue;
        const Eigen::ArrayXd shrink = d.array() / denom;
        const double trace = shrink.sum();
        const double dof_gap = static_cast<double>(n) - trace;
        if (dof_gap <= 1e-8) continue;
        const double rss = (vt_y.array() * (1.0 - shrink)).square().sum();
        const double score = static_cast<double>(n) * rss / (dof_gap * dof_gap);
        if (!have_best || score < best_score || (score == best_score && lambda > best_lambda)) {
            have_best = true;
            best_score = score;
            best_lambda = lambda;
        }
    }
    if (!have_best) {
        throw SingularSystemError("kernel ridge: no usable lambda in the selection grid",
                                  std::numeric_limits<double>::infinity());
    }
    return best_lambda;
}

// GCV selection for linear cohesion: hat matrix of the stacked design [I X]
// with penalty blockdiag(lambda L, 0).
double select_lin_lambda(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                         const Laplacian& laplacian, const std::vector<double>& grid) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    Eigen::MatrixXd design(n, n + p);
    design.leftCols(n) = Eigen::MatrixXd::Identity(n, n);
    design.rightCols(p) = x;
    Eigen::MatrixXd base = design.transpose() * design;

    double best_score = std::numeric_limits<double>::infinity();
    double best_lambda = grid.front();
    bool have_best = false;
    for (double lambda : grid) {
        Eigen::MatrixXd system = base;
        system.topLeftCorner(n, n) += lambda * laplacian.matrix;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
        const double rcond = ldlt.rcond();
        if (ldlt.info() != Eigen::Success || !(rcond > 0.0) || 1.0 / rcond > 1e12) continue;
        const Eigen::MatrixXd c = ldlt.solve(design.transpose());
        const double trace = design.cwiseProduct(c.transpose()).sum();
        const double dof_gap = static_cast<double>(n) - trace;
        if (dof_gap <= 1e-8) continue;
        const double rss = (y - design * (c * y)).squaredNorm();
        const double score = static_cast<double>(n) * rss / (dof_gap * dof_gap);
        if (!have_best || score < best_score || (score == best_score && lambda > best_lambda)) {
            have_best = true;
            best_score = score;
            best_lambda = lambda;
        }
    }
    if (!have_best) {
        throw SingularSystemError("linear cohesion: no usable lambda in the selection grid",
                                  std::numeric_limits<double>::infinity());
    }
    return best_lambda;
}

// GCV selection for the cohesion kernel machine via the shared-factorization
// grid scorer; exact ties prefer larger lambda then larger psi.
FitConfig select_cohesion_config(const Eigen::VectorXd& y, const Eigen::MatrixXd& k,
                                 const Laplacian& laplacian, const std::vector<double>& lambda_grid,
                                 const std::vector<double>& psi_grid) {
    const Eigen::MatrixXd scores = gcv_grid(y, k, laplacian, lambda_grid, psi_grid);
    bool have_best = false;
    double best_score = 0.0;
    FitConfig best;
    for (std::size_t li = 0; li < lambda_grid.size(); ++li) {
        for (std::size_t pi = 0; pi < psi_grid.size(); ++pi) {
            const double score = scores(static_cast<Eigen::Index>(li), static_cast<Eigen::Index>(pi));
            if (std::isnan(score)) continue;
            FitConfig cfg;
            cfg.lambda = lambda_grid[li];
            cfg.psi = psi_grid[pi];
            const bool better =
                !have_best || score < best_score ||
                (score == best_score &&
                 (cfg.lambda > best.lambda || (cfg.lambda == best.lambda && cfg.psi > best.psi)));
            if (better) {
                have_best = true;
                best_score = score;
                best = cfg;
            }
        }
    }
    if (!have_best) {
        throw SingularSystemError("cohesion machine: every grid point was unusable",
                                  std::numeric_limits<double>::infinity());
    }
    return best;
}

struct SplitIndices {
    std::vector<int> train;
    std::vector<int> test;
};

SplitIndices reachable_split(const Graph& graph, double split_fraction, Rng& rng, int retries) {
    const int n = graph.n;
    const int n_train = std::clamp(static_cast<int>(std::lround(split_fraction * n)), 1, n - 1);
    const std::vector<int> component = graph.components();
    int n_components = 0;
    for (int c : component) n_components = std::max(n_components, c + 1);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int attempt = 0; attempt < retries; ++attempt) {
        rng.shuffle(order);
        std::vector<int> train_count(n_components, 0);
        for (int i = 0; i < n_train; ++i) ++train_count[component[order[i]]];
        bool ok = true;
        for (int i = n_train; i < n && ok; ++i) {
            if (train_count[component[order[i]]] == 0) ok = false;
        }
        if (!ok) continue;
        SplitIndices split;
        split.train.assign(order.begin(), order.begin() + n_train);
        split.test.assign(order.begin() + n_train, order.end());
        std::sort(split.train.begin(), split.train.end());
        std::sort(split.test.begin(), split.test.end());
        return split;
    }
    throw ConfigError("could not draw a train/test split with reachable test nodes after " +
                      std::to_string(retries) + " attempts");
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<int>& idx) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[idx[i]];
    return out;
}

struct MachinePredictions {
    Eigen::VectorXd train;
    Eigen::VectorXd test;
};

struct RunContext {
    const SplitIndices& split;
    const Laplacian& full_laplacian;
    const Laplacian& train_laplacian;
    const Eigen::MatrixXd& x_train;
    const Eigen::MatrixXd& x_test;
    const Eigen::VectorXd& y_train;
};

MachinePredictions evaluate_machine(const MachineSpec& machine, const RunContext& ctx,
                                    const std::vector<double>& lambda_grid,
                                    const std::vector<double>& psi_grid,
                                    const std::optional<double>& fixed_lambda,
                                    const std::optional<double>& fixed_psi) {
    MachinePredictions out;
    switch (machine.kind) {
        case MachineSpec::Kind::kMlr: {
            const Eigen::VectorXd coef = fit_ols(ctx.y_train, ctx.x_train);
            out.train = predict_ols(coef, ctx.x_train);
            out.test = predict_ols(coef, ctx.x_test);
            return out;
        }
        case MachineSpec::Kind::kLinearCohesion: {
            const double lambda = fixed_lambda
                                      ? *fixed_lambda
                                      : select_lin_lambda(ctx.y_train, ctx.x_train, ctx.train_laplacian,
                                                          lambda_grid);
            const LinearCohesionFit lin =
                fit_linear_cohesion(ctx.y_train, ctx.x_train, ctx.train_laplacian, lambda);
            out.train = lin.alpha + ctx.x_train * lin.beta;
            const LaplacianPartition part =
                partition_laplacian(ctx.full_laplacian, ctx.split.train, ctx.split.test);
            out.test = harmonic_extension(part, lin.alpha) + ctx.x_test * lin.beta;
            return out;
        }
        case MachineSpec::Kind::kCohesionKernel: {
            const KernelSpec spec = KernelSpec::defaults_for(machine.family, ctx.x_train);
            const Eigen::MatrixXd k_train = gram(spec, ctx.x_train);
            FitConfig cfg;
            if (fixed_lambda && fixed_psi) {
                cfg.lambda = *fixed_lambda;
                cfg.psi = *fixed_psi;
            } else {
                std::vector<double> lgrid = fixed_lambda ? std::vector<double>{*fixed_lambda} : lambda_grid;
                std::vector<double> pgrid = fixed_psi ? std::vector<double>{*fixed_psi} : psi_grid;
                cfg = select_cohesion_config(ctx.y_train, k_train, ctx.train_laplacian, lgrid, pgrid);
            }
            const CohesionFit model = fit(ctx.y_train, k_train, ctx.train_laplacian, cfg);
            out.train = model.alpha + k_train * model.w;
            const LaplacianPartition part =
                partition_laplacian(ctx.full_laplacian, ctx.split.train, ctx.split.test);
            out.test = harmonic_extension(part, model.alpha) +
                       cross_gram(spec, ctx.x_test, ctx.x_train) * model.w;
            return out;
        }
        case MachineSpec::Kind::kKernelRidge: {
            const KernelSpec spec = KernelSpec::defaults_for(machine.family, ctx.x_train);
            const Eigen::MatrixXd k_train = gram(spec, ctx.x_train);
            const double lambda =
                fixed_lambda ? *fixed_lambda : select_krr_lambda(ctx.y_train, k_train, lambda_grid);
            KernelRidgeFit model = fit_kernel_ridge(ctx.y_train, k_train, lambda);
            out.train = (k_train * model.w).array() + model.y_offset;
            out.test = (cross_gram(spec, ctx.x_test, ctx.x_train) * model.w).array() + model.y_offset;
            return out;
        }
    }
    throw ConfigError("unhandled machine kind");
}

}  // namespace

BenchmarkReport run_benchmark(const SimConfig& cfg, const std::vector<std::string>& machines,
                              const BenchmarkOptions& options,
                              std::vector<PredictionRecord>* saved_predictions) {
    cfg.validate();
    if (options.runs < 1) throw ConfigError("runs must be >= 1");
    if (!(options.split_fraction > 0.0 && options.split_fraction < 1.0)) {
        throw ConfigError("split fraction must lie in (0, 1)");
    }
    if (machines.empty()) throw ConfigError("machine list is empty");
    std::vector<MachineSpec> specs;
    specs.reserve(machines.size());
    for (const std::string& tag : machines) specs.push_back(MachineSpec::parse(tag));

    const std::vector<double> lambda_grid =
        options.lambda_grid.empty() ? default_penalty_grid() : options.lambda_grid;
    const std::vector<double> psi_grid =
        options.psi_grid.empty() ? default_penalty_grid() : options.psi_grid;
    const std::string kind_label = to_string(cfg.topology.kind);

    BenchmarkReport report;
    report.rows.reserve(static_cast<std::size_t>(options.runs) * specs.size() * 2);

    for (int run = 0; run < options.runs; ++run) {
        SimConfig run_cfg = cfg;
        run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(run);
        const SimData sim = generate_dataset(run_cfg);

        Rng split_rng(Rng::mix_seed(run_cfg.seed, 0x5eed));
        const SplitIndices split =
            reachable_split(sim.graph, options.split_fraction, split_rng, options.split_retries);

        const Laplacian full_laplacian = build_laplacian(sim.graph);
        const Laplacian train_laplacian = build_laplacian(sim.graph.induced(split.train));
        const Eigen::MatrixXd x_train = sim.data.x(split.train, Eigen::all);
        const Eigen::MatrixXd x_test = sim.data.x(split.test, Eigen::all);
        const Eigen::VectorXd y_train = gather(sim.data.y, split.train);
        const Eigen::VectorXd y_test = gather(sim.data.y, split.test);
        const RunContext ctx{split, full_laplacian, train_laplacian, x_train, x_test, y_train};

        for (const MachineSpec& machine : specs) {
            const MachinePredictions pred = evaluate_machine(machine, ctx, lambda_grid, psi_grid,
                                                             options.fixed_lambda, options.fixed_psi);
            report.rows.push_back({machine.tag, kind_label, "train", run,
                                   (y_train - pred.train).squaredNorm() /
                                       static_cast<double>(split.train.size())});
            report.rows.push_back({machine.tag, kind_label, "test", run,
                                   (y_test - pred.test).squaredNorm() /
                                       static_cast<double>(split.test.size())});
            if (options.save_predictions && saved_predictions != nullptr) {
                saved_predictions->push_back({run, machine.tag, "train", split.train, y_train, pred.train});
                saved_predictions->push_back({run, machine.tag, "test", split.test, y_test, pred.test});
            }
        }
    }
    return report;
}

std::vector<SummaryRow> summarize(const BenchmarkReport& report) {
    if (report.rows.empty()) throw ConfigError("cannot summarize an empty report");

    std::map<std::tuple<int, std::string, int, std::string, int, std::string>, std::vector<double>> cells;
    for (const ReportRow& row : report.rows) {
        const int split_order = row.split == "train" ? 0 : 1;
        cells[{network_kind_order(row.kind), row.kind, split_order, row.split, machine_order(row.machine),
               row.machine}]
            .push_back(row.mse);
    }

    std::vector<SummaryRow> out;
    out.reserve(cells.size());
    for (const auto& [key, values] : cells) {
        SummaryRow row;
        row.kind = std::get<1>(key);
        row.split = std::get<3>(key);
        row.machine = std::get<5>(key);
        row.runs = static_cast<int>(values.size());
        const double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
        row.mean = mean;
        if (values.size() > 1) {
            double ss = 0.0;
            for (double v : values) ss += (v - mean) * (v - mean);
            row.sd = std::sqrt(ss / (values.size() - 1));
        }
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace netkrr
