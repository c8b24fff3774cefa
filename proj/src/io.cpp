#include "netkrr/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "netkrr/version.hpp"

namespace netkrr {

using nlohmann::json;

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[40];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value) break;
    }
    return buf;
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open file for writing: " + path.string());
    return out;
}

bool parse_double(const std::string& token, double& out) {
    const char* begin = token.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    if (end == begin) return false;
    while (*end != '\0' && std::isspace(static_cast<unsigned char>(*end))) ++end;
    return *end == '\0';
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace

Eigen::MatrixXd read_features_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("feature CSV is empty (expected a header row)");
    const std::size_t columns = split_csv_line(strip_cr(line)).size();
    if (columns == 0) throw ParseError("feature CSV header has no columns");

    std::vector<double> values;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != columns) {
            throw ParseError("feature CSV line " + std::to_string(line_no) + ": expected " +
                             std::to_string(columns) + " fields, got " + std::to_string(fields.size()));
        }
        for (const std::string& f : fields) {
            double v;
            if (!parse_double(f, v)) {
                throw ParseError("feature CSV line " + std::to_string(line_no) + ": bad number \"" + f +
                                 "\"");
            }
            values.push_back(v);
        }
    }
    const Eigen::Index rows = static_cast<Eigen::Index>(values.size() / columns);
    Eigen::MatrixXd x(rows, static_cast<Eigen::Index>(columns));
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            x(i, j) = values[static_cast<std::size_t>(i) * columns + static_cast<std::size_t>(j)];
        }
    }
    return x;
}

Eigen::MatrixXd read_features_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_features_csv(in);
}

void write_features_csv(const Eigen::MatrixXd& x, std::ostream& out) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) out << (j ? "," : "") << 'x' << (j + 1);
    out << '\n';
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) out << (j ? "," : "") << format_double(x(i, j));
        out << '\n';
    }
}

Eigen::VectorXd read_response_csv(std::istream& in) {
    std::vector<double> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        double v;
        if (!parse_double(line, v)) {
            if (line_no == 1) continue;  // header
            throw ParseError("response CSV line " + std::to_string(line_no) + ": bad number \"" + line +
                             "\"");
        }
        values.push_back(v);
    }
    if (values.empty()) throw ParseError("response CSV has no values");
    return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Eigen::VectorXd read_response_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_response_csv(in);
}

void write_response_csv(const Eigen::VectorXd& y, std::ostream& out) {
    out << "y\n";
    for (Eigen::Index i = 0; i < y.size(); ++i) out << format_double(y[i]) << '\n';
}

std::vector<int> read_index_csv(std::istream& in) {
    std::vector<int> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        try {
            std::size_t pos = 0;
            const int v = std::stoi(line, &pos);
            while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
            if (pos != line.size()) throw std::invalid_argument("trailing");
            values.push_back(v);
        } catch (const std::exception&) {
            if (line_no == 1) continue;  // header
            throw ParseError("index CSV line " + std::to_string(line_no) + ": bad integer \"" + line +
                             "\"");
        }
    }
    return values;
}

std::vector<int> read_index_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_index_csv(in);
}

Graph read_edge_list_file(const std::filesystem::path& path, std::optional<int> n) {
    auto in = open_input(path);
    return read_edge_list(in, n);
}

void write_edge_list_file(const Graph& g, const std::filesystem::path& path) {
    auto out = open_output(path);
    write_edge_list(g, out);
}

namespace {

json kernel_to_json(const KernelSpec& spec) {
    return {{"family", to_string(spec.family)},
            {"gamma", spec.gamma},
            {"degree", spec.degree},
            {"offset", spec.offset}};
}

KernelSpec kernel_from_json(const json& j) {
    KernelSpec spec;
    spec.family = kernel_family_from_string(j.at("family").get<std::string>());
    spec.gamma = j.at("gamma").get<double>();
    spec.degree = j.at("degree").get<int>();
    spec.offset = j.at("offset").get<double>();
    return spec;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    return v;
}

json data_block(const Eigen::MatrixXd& x, const Graph& g, const FitRecordOptions& options) {
    json data;
    data["embedded"] = options.embed_data;
    if (options.embed_data) {
        json features = json::array();
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index j = 0; j < x.cols(); ++j) row.push_back(x(i, j));
            features.push_back(std::move(row));
        }
        data["features"] = std::move(features);
        json edges = json::array();
        for (const auto& [u, v] : g.edges) edges.push_back(json::array({u, v}));
        data["edges"] = std::move(edges);
    } else {
        data["features_path"] = options.features_path;
        data["edges_path"] = options.edges_path;
    }
    return data;
}

}  // namespace

std::string cohesion_fit_record(const CohesionFit& fit, const FitRecordOptions& options) {
    json record;
    record["machine"] = "cohesion";
    record["version"] = kVersion;
    record["n"] = fit.alpha.size();
    record["p"] = fit.x_train.cols();
    record["alpha"] = vector_to_json(fit.alpha);
    record["w"] = vector_to_json(fit.w);
    record["kernel"] = kernel_to_json(fit.kernel);
    record["config"] = {{"lambda", fit.config.lambda},
                        {"psi", fit.config.psi},
                        {"penalty", to_string(fit.config.penalty)},
                        {"allow_interpolation", fit.config.allow_interpolation}};
    record["objective_value"] = fit.objective_value;
    record["min_norm"] = fit.min_norm;
    record["graph_edge_count"] = fit.graph.edges.size();
    record["graph_n"] = fit.graph.n;
    record["data"] = data_block(fit.x_train, fit.graph, options);
    return record.dump(2) + "\n";
}

void save_cohesion_fit(const CohesionFit& fit, const std::filesystem::path& path,
                       const FitRecordOptions& options) {
    auto out = open_output(path);
    out << cohesion_fit_record(fit, options);
}

CohesionFit load_cohesion_fit(const std::filesystem::path& path) {
    auto in = open_input(path);
    json record;
    try {
        in >> record;
    } catch (const json::exception& e) {
        throw ParseError("bad fit record " + path.string() + ": " + e.what());
    }
    try {
        if (record.at("machine").get<std::string>() != "cohesion") {
            throw ParseError("fit record " + path.string() + " is not a cohesion model");
        }
        CohesionFit fit;
        fit.alpha = vector_from_json(record.at("alpha"));
        fit.w = vector_from_json(record.at("w"));
        fit.kernel = kernel_from_json(record.at("kernel"));
        const json& cfg = record.at("config");
        fit.config.lambda = cfg.at("lambda").get<double>();
        fit.config.psi = cfg.at("psi").get<double>();
        fit.config.penalty = weight_penalty_from_string(cfg.at("penalty").get<std::string>());
        fit.config.allow_interpolation = cfg.at("allow_interpolation").get<bool>();
        fit.objective_value = record.at("objective_value").get<double>();
        fit.min_norm = record.at("min_norm").get<bool>();

        const json& data = record.at("data");
        const int graph_n = record.at("graph_n").get<int>();
        if (data.at("embedded").get<bool>()) {
            const json& features = data.at("features");
            const Eigen::Index rows = static_cast<Eigen::Index>(features.size());
            const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(features[0].size()) : 0;
            fit.x_train.resize(rows, cols);
            for (Eigen::Index i = 0; i < rows; ++i) {
                for (Eigen::Index j = 0; j < cols; ++j) {
                    fit.x_train(i, j) = features[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                                            .get<double>();
                }
            }
            std::vector<std::pair<int, int>> edges;
            for (const json& e : data.at("edges")) {
                edges.emplace_back(e[0].get<int>(), e[1].get<int>());
            }
            fit.graph = Graph::from_edges(graph_n, std::move(edges));
        } else {
            fit.x_train = read_features_csv(std::filesystem::path(data.at("features_path").get<std::string>()));
            fit.graph = read_edge_list_file(
                std::filesystem::path(data.at("edges_path").get<std::string>()), graph_n);
        }
        if (fit.alpha.size() != fit.w.size() || fit.alpha.size() != fit.x_train.rows() ||
            fit.graph.n != static_cast<int>(fit.alpha.size())) {
            throw ParseError("fit record " + path.string() + " has inconsistent dimensions");
        }
        return fit;
    } catch (const json::exception& e) {
        throw ParseError("bad fit record " + path.string() + ": " + e.what());
    }
}

std::string kernel_ridge_fit_record(const KernelRidgeFit& fit, const FitRecordOptions& options) {
    json record;
    record["machine"] = "krr";
    record["version"] = kVersion;
    record["n"] = fit.w.size();
    record["p"] = fit.x_train.cols();
    record["w"] = vector_to_json(fit.w);
    record["kernel"] = kernel_to_json(fit.kernel);
    record["config"] = {{"lambda", fit.lambda}};
    record["y_offset"] = fit.y_offset;
    record["data"] = data_block(fit.x_train, Graph{}, options);
    return record.dump(2) + "\n";
}

std::string linear_cohesion_fit_record(const LinearCohesionFit& fit) {
    json record;
    record["machine"] = "lin";
    record["version"] = kVersion;
    record["n"] = fit.alpha.size();
    record["p"] = fit.beta.size();
    record["alpha"] = vector_to_json(fit.alpha);
    record["beta"] = vector_to_json(fit.beta);
    record["config"] = {{"lambda", fit.lambda}};
    record["min_norm"] = fit.min_norm;
    return record.dump(2) + "\n";
}

void write_report_csv(const BenchmarkReport& report, std::ostream& out) {
    out << "machine,kind,split,run,mse\n";
    for (const ReportRow& row : report.rows) {
        out << row.machine << ',' << row.kind << ',' << row.split << ',' << row.run << ','
            << format_double(row.mse) << '\n';
    }
}

BenchmarkReport read_report_csv(std::istream& in) {
    BenchmarkReport report;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("machine", 0) == 0) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != 5) {
            throw ParseError("report CSV line " + std::to_string(line_no) + ": expected 5 fields");
        }
        ReportRow row;
        row.machine = fields[0];
        row.kind = fields[1];
        row.split = fields[2];
        double run_value, mse_value;
        if (!parse_double(fields[3], run_value) || !parse_double(fields[4], mse_value)) {
            throw ParseError("report CSV line " + std::to_string(line_no) + ": bad number");
        }
        row.run = static_cast<int>(run_value);
        row.mse = mse_value;
        report.rows.push_back(std::move(row));
    }
    return report;
}

BenchmarkReport read_report_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_report_csv(in);
}

void write_summary_csv(const std::vector<SummaryRow>& summary, std::ostream& out) {
    out << "machine,kind,split,runs,mean_mse,sd_mse\n";
    for (const SummaryRow& row : summary) {
        out << row.machine << ',' << row.kind << ',' << row.split << ',' << row.runs << ','
            << format_double(row.mean) << ',' << format_double(row.sd) << '\n';
    }
}

void write_summary_table(const std::vector<SummaryRow>& summary, std::ostream& out) {
    out << std::left << std::setw(11) << "kind" << std::setw(7) << "split" << std::setw(20)
        << "machine" << std::right << std::setw(6) << "runs" << std::setw(12) << "mean" << std::setw(12)
        << "sd" << '\n';
    char mean_buf[32], sd_buf[32];
    for (const SummaryRow& row : summary) {
        std::snprintf(mean_buf, sizeof(mean_buf), "%.4f", row.mean);
        std::snprintf(sd_buf, sizeof(sd_buf), "%.4f", row.sd);
        out << std::left << std::setw(11) << row.kind << std::setw(7) << row.split << std::setw(20)
            << row.machine << std::right << std::setw(6) << row.runs << std::setw(12) << mean_buf
            << std::setw(12) << sd_buf << '\n';
    }
}

void write_predictions_csv(const std::vector<PredictionRecord>& records, std::ostream& out) {
    out << "run,machine,split,node,y_true,y_pred\n";
    for (const PredictionRecord& rec : records) {
        for (std::size_t i = 0; i < rec.nodes.size(); ++i) {
            out << rec.run << ',' << rec.machine << ',' << rec.split << ',' << rec.nodes[i] << ','
                << format_double(rec.y_true[static_cast<Eigen::Index>(i)]) << ','
                << format_double(rec.y_pred[static_cast<Eigen::Index>(i)]) << '\n';
        }
    }
}

void write_summary_svg(const std::vector<SummaryRow>& summary, const std::string& kind,
                       const std::string& split, std::ostream& out) {
    std::vector<const SummaryRow*> rows;
    for (const SummaryRow& row : summary) {
        if (row.kind == kind && row.split == split) rows.push_back(&row);
    }
    const int width = 640, height = 360, margin = 50;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\">\n";
    out << "  <text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << kind << " / " << split << " mean MSE</text>\n";
    if (!rows.empty()) {
        double max_value = 0.0;
        for (const SummaryRow* row : rows) max_value = std::max(max_value, row->mean + row->sd);
        if (max_value <= 0.0) max_value = 1.0;
        const double plot_w = width - 2.0 * margin;
        const double plot_h = height - 2.0 * margin;
        const double slot = plot_w / static_cast<double>(rows.size());
        const double bar_w = slot * 0.6;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const SummaryRow& row = *rows[i];
            const double x = margin + slot * (static_cast<double>(i) + 0.2);
            const double h = plot_h * row.mean / max_value;
            const double y = height - margin - h;
            char value_buf[32];
            std::snprintf(value_buf, sizeof(value_buf), "%.3f", row.mean);
            out << "  <rect x=\"" << format_double(x) << "\" y=\"" << format_double(y) << "\" width=\""
                << format_double(bar_w) << "\" height=\"" << format_double(h)
                << "\" fill=\"#4878a8\"/>\n";
            // sd whisker
            const double cx = x + bar_w / 2.0;
            const double y_hi = height - margin - plot_h * std::min(1.0, (row.mean + row.sd) / max_value);
            const double y_lo = height - margin - plot_h * std::max(0.0, (row.mean - row.sd) / max_value);
            out << "  <line x1=\"" << format_double(cx) << "\" y1=\"" << format_double(y_hi)
                << "\" x2=\"" << format_double(cx) << "\" y2=\"" << format_double(y_lo)
                << "\" stroke=\"#333\"/>\n";
            out << "  <text x=\"" << format_double(cx) << "\" y=\"" << format_double(y - 4)
                << "\" text-anchor=\"middle\" font-size=\"10\">" << value_buf << "</text>\n";
            out << "  <text x=\"" << format_double(cx) << "\" y=\"" << (height - margin + 14)
                << "\" text-anchor=\"middle\" font-size=\"10\">" << row.machine << "</text>\n";
        }
        out << "  <line x1=\"" << margin << "\" y1=\"" << (height - margin) << "\" x2=\""
            << (width - margin) << "\" y2=\"" << (height - margin) << "\" stroke=\"#000\"/>\n";
    }
    out << "</svg>\n";
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file for digest: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a_hex(ss.str());
}

}  // namespace netkrr
