#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "netkrr/graph.hpp"
#include "netkrr/kernel.hpp"

namespace netkrr {

enum class Nonlinearity { kLinear, kSine, kQuadratic };

const char* to_string(Nonlinearity f);
Nonlinearity nonlinearity_from_string(const std::string& name);

/// Synthetic study configuration: n observations in `groups` balanced groups,
/// group-shifted node effects of spread effect_scale, p standard-normal
/// predictors pushed through the chosen signal, Gaussian noise, and a graph
/// drawn from the topology with blocks following the groups.
struct SimConfig {
    int n = 200;
    int p = 2;
    int groups = 4;
    NetworkTopology topology = NetworkTopology::make(NetworkKind::kUniform, 4, 16.0);
    double noise_sd = 1.0;
    double effect_scale = 1.5;
    Nonlinearity nonlinearity = Nonlinearity::kSine;
    std::uint64_t seed = 1;

    /// When false the network blocks are a seeded permutation of the
    /// regression groups instead of matching them.
    bool align_groups = true;

    void validate() const;
};

struct Dataset {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
};

struct SimData {
    Dataset data;
    Graph graph;
    Eigen::VectorXd alpha_true;
    std::vector<int> group_of;
};

SimData generate_dataset(const SimConfig& cfg);

/// Signal component f(x) for one feature row.
double signal_value(Nonlinearity f, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Benchmark machine identifiers:
///   mlr                    least squares with intercept
///   lin                    linear regression with network cohesion
///   cohesion-<kernel>      kernel regression with network cohesion
///   krr-<kernel>           plain kernel ridge (centered)
/// with <kernel> in {rbf, laplace, cosine, poly, tangent}.
struct MachineSpec {
    enum class Kind { kMlr, kLinearCohesion, kCohesionKernel, kKernelRidge };
    Kind kind = Kind::kMlr;
    KernelFamily family = KernelFamily::kRbf;
    std::string tag;

    static MachineSpec parse(const std::string& tag);
};

/// Machines used when the caller does not pick any.
std::vector<std::string> default_machines();

/// Position in the canonical presentation order (paper column order);
/// unknown tags sort after all known ones, alphabetically.
int machine_order(const std::string& tag);

/// Position of a network kind in the table row order Uf/Ti/Wo/Op.
int network_kind_order(const std::string& kind);

struct ReportRow {
    std::string machine;
    std::string kind;   // network kind label
    std::string split;  // "train" or "test"
    int run = 0;
    double mse = 0.0;
};

struct BenchmarkReport {
    std::vector<ReportRow> rows;
};

/// Per-node predictions of one (run, machine, split) cell, kept when
/// save_predictions is on.
struct PredictionRecord {
    int run = 0;
    std::string machine;
    std::string split;
    std::vector<int> nodes;
    Eigen::VectorXd y_true;
    Eigen::VectorXd y_pred;
};

struct BenchmarkOptions {
    int runs = 45;
    double split_fraction = 0.7;  // training share
    std::vector<double> lambda_grid;  // empty -> default 7-point log grid
    std::vector<double> psi_grid;
    std::optional<double> fixed_lambda;
    std::optional<double> fixed_psi;
    int split_retries = 100;
    bool save_predictions = false;
};

/// 10^linspace(-3, 2, 7), the default selection grid for both penalties.
std::vector<double> default_penalty_grid();

/// Repeated-split comparison protocol for one network kind: per run a fresh
/// dataset and graph (seed + run index), a reachable train/test node split,
/// every machine fitted on the training nodes (hyperparameters by GCV over
/// the grid unless fixed) and scored on both splits.
BenchmarkReport run_benchmark(const SimConfig& cfg, const std::vector<std::string>& machines,
                              const BenchmarkOptions& options,
                              std::vector<PredictionRecord>* saved_predictions = nullptr);

struct SummaryRow {
    std::string machine;
    std::string kind;
    std::string split;
    double mean = 0.0;
    double sd = 0.0;
    int runs = 0;
};

/// Aggregate mean and sample standard deviation per (machine, kind, split),
/// ordered by kind (Uf/Ti/Wo/Op), split (train, test), then machine.
std::vector<SummaryRow> summarize(const BenchmarkReport& report);

}  // namespace netkrr
