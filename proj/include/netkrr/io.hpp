#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "netkrr/baselines.hpp"
#include "netkrr/simulate.hpp"
#include "netkrr/solver.hpp"

namespace netkrr {

/// Shortest-lossless text form of a double (round-trips bit-exactly).
std::string format_double(double value);

/// Feature CSV: header row then one observation per line.
Eigen::MatrixXd read_features_csv(std::istream& in);
Eigen::MatrixXd read_features_csv(const std::filesystem::path& path);
void write_features_csv(const Eigen::MatrixXd& x, std::ostream& out);

/// Response CSV: a single column, optional non-numeric header.
Eigen::VectorXd read_response_csv(std::istream& in);
Eigen::VectorXd read_response_csv(const std::filesystem::path& path);
void write_response_csv(const Eigen::VectorXd& y, std::ostream& out);

/// One integer per line, optional non-numeric header.
std::vector<int> read_index_csv(std::istream& in);
std::vector<int> read_index_csv(const std::filesystem::path& path);

Graph read_edge_list_file(const std::filesystem::path& path,
                          std::optional<int> n = std::nullopt);
void write_edge_list_file(const Graph& g, const std::filesystem::path& path);

/// JSON fit record. Training features and edges are embedded when
/// embed_data is set; otherwise the given source paths are recorded and
/// re-read at load time.
struct FitRecordOptions {
    bool embed_data = true;
    std::string features_path;
    std::string edges_path;
};

std::string cohesion_fit_record(const CohesionFit& fit, const FitRecordOptions& options);
void save_cohesion_fit(const CohesionFit& fit, const std::filesystem::path& path,
                       const FitRecordOptions& options);
CohesionFit load_cohesion_fit(const std::filesystem::path& path);

/// Baseline fits share the record envelope, distinguished by the machine tag.
std::string kernel_ridge_fit_record(const KernelRidgeFit& fit, const FitRecordOptions& options);
std::string linear_cohesion_fit_record(const LinearCohesionFit& fit);

/// Benchmark report CSV: "machine,kind,split,run,mse".
void write_report_csv(const BenchmarkReport& report, std::ostream& out);
BenchmarkReport read_report_csv(std::istream& in);
BenchmarkReport read_report_csv(const std::filesystem::path& path);

/// Summary CSV and aligned text table.
void write_summary_csv(const std::vector<SummaryRow>& summary, std::ostream& out);
void write_summary_table(const std::vector<SummaryRow>& summary, std::ostream& out);

/// Per-run prediction rows: "run,machine,split,node,y_true,y_pred".
void write_predictions_csv(const std::vector<PredictionRecord>& records, std::ostream& out);

/// Bar chart of mean MSE per machine for one (kind, split) cell.
void write_summary_svg(const std::vector<SummaryRow>& summary, const std::string& kind,
                       const std::string& split, std::ostream& out);

/// FNV-1a 64-bit content hash, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);
std::string file_digest(const std::filesystem::path& path);

}  // namespace netkrr
