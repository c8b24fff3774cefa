// netkrr command line: fit, predict, simulate, benchmark, summarize.
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "netkrr/io.hpp"
#include "netkrr/predict.hpp"
#include "netkrr/simulate.hpp"
#include "netkrr/solver.hpp"
#include "netkrr/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace netkrr;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSingular = 3;
constexpr int kExitUnreachable = 4;
constexpr int kExitDrift = 5;

// Accepts either INI-style key=value files or a JSON object (sniffed from
// the first non-space character).
class FlexibleConfig : public CLI::ConfigINI {
public:
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        const auto start = input.tellg();
        char c = 0;
        while (input.get(c) && std::isspace(static_cast<unsigned char>(c))) {
        }
        input.clear();
        input.seekg(start);
        if (c != '{') return CLI::ConfigINI::from_config(input);
        json j;
        input >> j;
        return items_from_json(j, {});
    }

private:
    static std::vector<CLI::ConfigItem> items_from_json(const json& j,
                                                        std::vector<std::string> parents) {
        std::vector<CLI::ConfigItem> out;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (it->is_object()) {
                auto deeper = parents;
                deeper.push_back(it.key());
                auto sub = items_from_json(*it, deeper);
                out.insert(out.end(), sub.begin(), sub.end());
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = it.key();
            if (it->is_string()) {
                item.inputs = {it->get<std::string>()};
            } else if (it->is_array()) {
                for (const json& v : *it) {
                    item.inputs.push_back(v.is_string() ? v.get<std::string>() : v.dump());
                }
            } else if (it->is_boolean()) {
                item.inputs = {it->get<bool>() ? "true" : "false"};
            } else {
                item.inputs = {it->dump()};
            }
            out.push_back(std::move(item));
        }
        return out;
    }
};

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

void write_manifest(const fs::path& out_dir, const std::string& command, const json& config,
                    std::uint64_t seed, const std::vector<std::pair<std::string, fs::path>>& inputs) {
    json manifest;
    manifest["command"] = command;
    manifest["version"] = kVersion;
    manifest["timestamp"] = iso_timestamp();
    manifest["seed"] = seed;
    manifest["config"] = config;
    json input_block = json::object();
    for (const auto& [label, path] : inputs) {
        input_block[label] = {{"path", fs::absolute(path).string()}, {"digest", file_digest(path)}};
    }
    manifest["inputs"] = input_block;
    std::ofstream out(out_dir / "manifest.json");
    out << manifest.dump(2) << '\n';
}

fs::path prepare_out_dir(const std::string& out) {
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

void note_output(const fs::path& path) { std::cout << "wrote " << path.string() << '\n'; }

KernelSpec resolve_kernel(const std::string& family_name, const std::optional<double>& gamma,
                          const std::optional<int>& degree, const std::optional<double>& offset,
                          const Eigen::MatrixXd& x) {
    KernelSpec spec = KernelSpec::defaults_for(kernel_family_from_string(family_name), x);
    if (gamma) spec.gamma = *gamma;
    if (degree) spec.degree = *degree;
    if (offset) spec.offset = *offset;
    spec.validate();
    return spec;
}

struct SelectChoice {
    enum class Mode { kNone, kGcv, kKfold } mode = Mode::kNone;
    int folds = 5;
};

SelectChoice parse_select(const std::string& text) {
    SelectChoice choice;
    if (text == "none") return choice;
    if (text == "gcv") {
        choice.mode = SelectChoice::Mode::kGcv;
        return choice;
    }
    if (text.rfind("kfold:", 0) == 0) {
        choice.mode = SelectChoice::Mode::kKfold;
        choice.folds = std::stoi(text.substr(6));
        if (choice.folds < 2) throw ConfigError("kfold requires k >= 2");
        return choice;
    }
    throw ConfigError("unknown --select value: " + text + " (expected none, gcv, or kfold:K)");
}

// ---------------------------------------------------------------- fit ----

struct FitArgs {
    std::string features, response, edges, out;
    std::optional<int> nodes;
    std::string kernel = "rbf";
    std::optional<double> gamma, offset;
    std::optional<int> degree;
    std::optional<double> lambda, psi;
    std::string penalty = "euclidean";
    std::string select = "none";
    bool allow_interpolation = false;
    bool embed_data = true;
    std::uint64_t seed = 0;
};

int cmd_fit(const FitArgs& args) {
    const Eigen::MatrixXd x = read_features_csv(fs::path(args.features));
    const Eigen::VectorXd y = read_response_csv(fs::path(args.response));
    const int n = static_cast<int>(x.rows());
    if (y.size() != n) {
        throw ParseError("response has " + std::to_string(y.size()) + " rows but features have " +
                         std::to_string(n));
    }
    const Graph g = read_edge_list_file(fs::path(args.edges), args.nodes ? *args.nodes : n);
    if (g.n != n) throw ParseError("edge list node count differs from feature rows");

    const KernelSpec spec = resolve_kernel(args.kernel, args.gamma, args.degree, args.offset, x);
    const Eigen::MatrixXd k = gram(spec, x);
    const Laplacian laplacian = build_laplacian(g);

    FitConfig cfg;
    cfg.penalty = weight_penalty_from_string(args.penalty);
    cfg.allow_interpolation = args.allow_interpolation;
    const SelectChoice select = parse_select(args.select);
    if (select.mode == SelectChoice::Mode::kNone) {
        cfg.lambda = args.lambda.value_or(1.0);
        cfg.psi = args.psi.value_or(1.0);
    } else {
        const std::vector<double> lambdas =
            args.lambda ? std::vector<double>{*args.lambda} : default_penalty_grid();
        const std::vector<double> psis =
            args.psi ? std::vector<double>{*args.psi} : default_penalty_grid();
        std::vector<FitConfig> grid;
        for (double lambda : lambdas) {
            for (double psi : psis) {
                FitConfig point = cfg;
                point.lambda = lambda;
                point.psi = psi;
                grid.push_back(point);
            }
        }
        const SelectionMethod method = select.mode == SelectChoice::Mode::kGcv
                                           ? SelectionMethod::gcv()
                                           : SelectionMethod::kfold(select.folds, args.seed);
        cfg = select_hyperparameters(y, k, laplacian, grid, method);
        cfg.allow_interpolation = args.allow_interpolation;
    }

    CohesionFit model = fit(y, k, laplacian, cfg);
    model.kernel = spec;
    model.x_train = x;

    const fs::path out_dir = prepare_out_dir(args.out);
    FitRecordOptions record;
    record.embed_data = args.embed_data;
    record.features_path = fs::absolute(args.features).string();
    record.edges_path = fs::absolute(args.edges).string();
    const fs::path model_path = out_dir / "model.json";
    save_cohesion_fit(model, model_path, record);
    note_output(model_path);

    json config = {{"kernel", {{"family", to_string(spec.family)},
                               {"gamma", spec.gamma},
                               {"degree", spec.degree},
                               {"offset", spec.offset}}},
                   {"lambda", cfg.lambda},
                   {"psi", cfg.psi},
                   {"penalty", to_string(cfg.penalty)},
                   {"select", args.select},
                   {"allow_interpolation", args.allow_interpolation},
                   {"embed_data", args.embed_data}};
    write_manifest(out_dir, "fit", config, args.seed,
                   {{"features", args.features}, {"response", args.response}, {"edges", args.edges}});
    note_output(out_dir / "manifest.json");
    return 0;
}

// ------------------------------------------------------------- predict ----

struct PredictArgs {
    std::string model, features_new, edges_full, train_index, out;
    std::optional<std::string> test_index;
    std::optional<int> nodes;
    bool allow_graph_drift = false;
};

int cmd_predict(const PredictArgs& args) {
    const CohesionFit model = load_cohesion_fit(fs::path(args.model));
    const Eigen::MatrixXd x_new = read_features_csv(fs::path(args.features_new));
    const int n_train = static_cast<int>(model.alpha.size());
    const int m = static_cast<int>(x_new.rows());
    const int full_n = args.nodes ? *args.nodes : n_train + m;

    PredictionInput input;
    input.x_new = x_new;
    input.full_graph = read_edge_list_file(fs::path(args.edges_full), full_n);
    input.train_index = read_index_csv(fs::path(args.train_index));
    input.allow_graph_drift = args.allow_graph_drift;
    if (args.test_index) {
        input.test_index = read_index_csv(fs::path(*args.test_index));
    } else {
        std::vector<char> is_train(full_n, 0);
        for (int v : input.train_index) {
            if (v < 0 || v >= full_n) throw ParseError("train index out of range: " + std::to_string(v));
            is_train[v] = 1;
        }
        for (int v = 0; v < full_n; ++v) {
            if (!is_train[v]) input.test_index.push_back(v);
        }
    }
    const Eigen::VectorXd predictions = predict(model, input);

    const fs::path out_dir = prepare_out_dir(args.out);
    const fs::path pred_path = out_dir / "predictions.csv";
    {
        std::ofstream out(pred_path);
        out << "index,prediction\n";
        for (Eigen::Index i = 0; i < predictions.size(); ++i) {
            out << input.test_index[static_cast<std::size_t>(i)] << ','
                << format_double(predictions[i]) << '\n';
        }
    }
    note_output(pred_path);

    json config = {{"allow_graph_drift", args.allow_graph_drift}, {"nodes", full_n}};
    std::vector<std::pair<std::string, fs::path>> inputs = {{"model", args.model},
                                                            {"features_new", args.features_new},
                                                            {"edges_full", args.edges_full},
                                                            {"train_index", args.train_index}};
    if (args.test_index) inputs.emplace_back("test_index", *args.test_index);
    write_manifest(out_dir, "predict", config, 0, inputs);
    note_output(out_dir / "manifest.json");
    return 0;
}

// ---------------------------------------------------- simulate/benchmark ----

struct SimArgs {
    std::string network = "uniform";
    int n = 200;
    int p = 2;
    int groups = 4;
    double noise_sd = 1.0;
    double effect_scale = 1.5;
    std::string nonlinearity = "sine";
    double edge_budget = 16.0;
    std::uint64_t seed = 1;
    bool decouple_groups = false;
};

SimConfig to_sim_config(const SimArgs& args, NetworkKind kind) {
    SimConfig cfg;
    cfg.n = args.n;
    cfg.p = args.p;
    cfg.groups = args.groups;
    cfg.topology = NetworkTopology::make(kind, args.groups, args.edge_budget);
    cfg.noise_sd = args.noise_sd;
    cfg.effect_scale = args.effect_scale;
    cfg.nonlinearity = nonlinearity_from_string(args.nonlinearity);
    cfg.seed = args.seed;
    cfg.align_groups = !args.decouple_groups;
    return cfg;
}

json sim_config_json(const SimArgs& args) {
    return {{"network", args.network},
            {"n", args.n},
            {"p", args.p},
            {"groups", args.groups},
            {"noise_sd", args.noise_sd},
            {"effect_scale", args.effect_scale},
            {"nonlinearity", args.nonlinearity},
            {"edge_budget", args.edge_budget},
            {"decouple_groups", args.decouple_groups}};
}

int cmd_simulate(const SimArgs& args, const std::string& out) {
    const SimConfig cfg = to_sim_config(args, network_kind_from_string(args.network));
    const SimData sim = generate_dataset(cfg);
    const fs::path out_dir = prepare_out_dir(out);

    {
        std::ofstream f(out_dir / "features.csv");
        write_features_csv(sim.data.x, f);
    }
    {
        std::ofstream f(out_dir / "response.csv");
        write_response_csv(sim.data.y, f);
    }
    write_edge_list_file(sim.graph, out_dir / "edges.csv");
    {
        std::ofstream f(out_dir / "alpha_true.csv");
        f << "alpha\n";
        for (Eigen::Index i = 0; i < sim.alpha_true.size(); ++i) {
            f << format_double(sim.alpha_true[i]) << '\n';
        }
    }
    {
        std::ofstream f(out_dir / "groups.csv");
        f << "group\n";
        for (int g : sim.group_of) f << g << '\n';
    }
    for (const char* name : {"features.csv", "response.csv", "edges.csv", "alpha_true.csv", "groups.csv"}) {
        note_output(out_dir / name);
    }
    write_manifest(out_dir, "simulate", sim_config_json(args), args.seed, {});
    note_output(out_dir / "manifest.json");
    return 0;
}

struct BenchmarkArgs {
    SimArgs sim;
    int runs = 45;
    double split = 0.7;
    std::vector<std::string> machines;
    std::optional<double> lambda, psi;
    bool save_predictions = false;
    bool svg = false;
};

int cmd_benchmark(const BenchmarkArgs& args, const std::string& out) {
    std::vector<NetworkKind> kinds;
    if (args.sim.network == "all") {
        kinds = {NetworkKind::kUniform, NetworkKind::kTight, NetworkKind::kWideOpen,
                 NetworkKind::kOpen};
    } else {
        kinds = {network_kind_from_string(args.sim.network)};
    }
    const std::vector<std::string> machines =
        args.machines.empty() ? default_machines() : args.machines;

    BenchmarkOptions options;
    options.runs = args.runs;
    options.split_fraction = args.split;
    options.fixed_lambda = args.lambda;
    options.fixed_psi = args.psi;
    options.save_predictions = args.save_predictions;

    BenchmarkReport report;
    std::vector<PredictionRecord> predictions;
    for (const NetworkKind kind : kinds) {
        const SimConfig cfg = to_sim_config(args.sim, kind);
        const BenchmarkReport part =
            run_benchmark(cfg, machines, options, args.save_predictions ? &predictions : nullptr);
        report.rows.insert(report.rows.end(), part.rows.begin(), part.rows.end());
    }

    const fs::path out_dir = prepare_out_dir(out);
    {
        std::ofstream f(out_dir / "report.csv");
        write_report_csv(report, f);
    }
    note_output(out_dir / "report.csv");

    const std::vector<SummaryRow> summary = summarize(report);
    {
        std::ofstream f(out_dir / "summary.csv");
        write_summary_csv(summary, f);
    }
    note_output(out_dir / "summary.csv");
    {
        std::ofstream f(out_dir / "summary.txt");
        write_summary_table(summary, f);
    }
    note_output(out_dir / "summary.txt");

    if (args.save_predictions) {
        std::ofstream f(out_dir / "predictions.csv");
        write_predictions_csv(predictions, f);
        note_output(out_dir / "predictions.csv");
    }
    if (args.svg) {
        for (const NetworkKind kind : kinds) {
            for (const char* split : {"train", "test"}) {
                const std::string name =
                    std::string("chart_") + to_string(kind) + "_" + split + ".svg";
                std::ofstream f(out_dir / name);
                write_summary_svg(summary, to_string(kind), split, f);
                note_output(out_dir / name);
            }
        }
    }

    json config = sim_config_json(args.sim);
    config["runs"] = args.runs;
    config["split"] = args.split;
    config["machines"] = machines;
    if (args.lambda) config["lambda"] = *args.lambda;
    if (args.psi) config["psi"] = *args.psi;
    config["save_predictions"] = args.save_predictions;
    write_manifest(out_dir, "benchmark", config, args.sim.seed, {});
    note_output(out_dir / "manifest.json");
    return 0;
}

int cmd_summarize(const std::string& report_path, bool svg, const std::string& out) {
    const BenchmarkReport report = read_report_csv(fs::path(report_path));
    const std::vector<SummaryRow> summary = summarize(report);
    const fs::path out_dir = prepare_out_dir(out);
    {
        std::ofstream f(out_dir / "summary.csv");
        write_summary_csv(summary, f);
    }
    note_output(out_dir / "summary.csv");
    {
        std::ofstream f(out_dir / "summary.txt");
        write_summary_table(summary, f);
    }
    note_output(out_dir / "summary.txt");
    if (svg) {
        std::vector<std::pair<std::string, std::string>> cells;
        for (const SummaryRow& row : summary) {
            const auto cell = std::make_pair(row.kind, row.split);
            if (std::find(cells.begin(), cells.end(), cell) == cells.end()) cells.push_back(cell);
        }
        for (const auto& [kind, split] : cells) {
            const std::string name = "chart_" + kind + "_" + split + ".svg";
            std::ofstream f(out_dir / name);
            write_summary_svg(summary, kind, split, f);
            note_output(out_dir / name);
        }
    }
    write_manifest(out_dir, "summarize", json::object(), 0, {{"report", report_path}});
    note_output(out_dir / "manifest.json");
    return 0;
}

// ---------------------------------------------------------------- main ----

int report_error(const std::exception& e, bool json_errors) {
    int code = kExitFailure;
    std::string kind = "error";
    json detail = json::object();
    if (const auto* singular = dynamic_cast<const SingularSystemError*>(&e)) {
        code = kExitSingular;
        kind = "singular_system";
        detail["condition"] = singular->condition;
    } else if (const auto* unreachable = dynamic_cast<const UnreachableNodesError*>(&e)) {
        code = kExitUnreachable;
        kind = "unreachable_nodes";
        detail["nodes"] = unreachable->nodes;
    } else if (dynamic_cast<const GraphDriftError*>(&e) != nullptr) {
        code = kExitDrift;
        kind = "graph_drift";
    } else if (dynamic_cast<const ParseError*>(&e) != nullptr ||
               dynamic_cast<const ConfigError*>(&e) != nullptr ||
               dynamic_cast<const DimensionError*>(&e) != nullptr) {
        code = kExitUsage;
        kind = "bad_input";
    }
    if (json_errors) {
        json out = {{"error", kind}, {"message", e.what()}, {"exit_code", code}};
        if (!detail.empty()) out["detail"] = detail;
        std::cerr << out.dump() << '\n';
    } else {
        std::cerr << "netkrr: " << e.what() << '\n';
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kernel regression with network cohesion"};
    app.set_version_flag("--version", std::string(kVersion));
    app.set_config("--config")->description("INI key=value or JSON config file");
    app.config_formatter(std::make_shared<FlexibleConfig>());
    app.require_subcommand(1);

    bool json_errors = false;
    app.add_flag("--json-errors", json_errors, "emit machine-readable JSON errors on stderr");

    FitArgs fit_args;
    CLI::App* fit_cmd = app.add_subcommand("fit", "fit a cohesion kernel model");
    fit_cmd->fallthrough();
    fit_cmd->add_option("--features", fit_args.features, "feature CSV (header row)")->required();
    fit_cmd->add_option("--response", fit_args.response, "response CSV (single column)")->required();
    fit_cmd->add_option("--edges", fit_args.edges, "edge-list CSV \"u,v\"")->required();
    fit_cmd->add_option("--nodes", fit_args.nodes, "node count (default: feature rows)");
    fit_cmd->add_option("--kernel", fit_args.kernel, "rbf|laplace|cosine|poly|tangent");
    fit_cmd->add_option("--gamma", fit_args.gamma, "kernel width (default: 1/(p*var))");
    fit_cmd->add_option("--degree", fit_args.degree, "polynomial degree");
    fit_cmd->add_option("--offset", fit_args.offset, "polynomial/tangent offset");
    fit_cmd->add_option("--lambda", fit_args.lambda, "cohesion penalty");
    fit_cmd->add_option("--psi", fit_args.psi, "weight penalty");
    fit_cmd->add_option("--penalty", fit_args.penalty, "euclidean|rkhs");
    fit_cmd->add_option("--select", fit_args.select, "none|gcv|kfold:K");
    fit_cmd->add_flag("--allow-interpolation", fit_args.allow_interpolation,
                      "permit the lambda = psi = 0 interpolating fit");
    fit_cmd->add_flag("--embed-data,!--no-embed-data", fit_args.embed_data,
                      "embed training data in the model file (default on)");
    fit_cmd->add_option("--seed", fit_args.seed, "seed for kfold selection");
    fit_cmd->add_option("--out", fit_args.out, "output directory")->required();

    PredictArgs predict_args;
    CLI::App* predict_cmd = app.add_subcommand("predict", "predict new nodes from a fitted model");
    predict_cmd->fallthrough();
    predict_cmd->add_option("--model", predict_args.model, "model.json from fit")->required();
    predict_cmd->add_option("--features-new", predict_args.features_new, "features of new rows")
        ->required();
    predict_cmd->add_option("--edges-full", predict_args.edges_full,
                            "edge list over training + new nodes")
        ->required();
    predict_cmd->add_option("--train-index", predict_args.train_index,
                            "graph node of each training row (CSV)")
        ->required();
    predict_cmd->add_option("--test-index", predict_args.test_index,
                            "graph node of each new row (default: non-train nodes ascending)");
    predict_cmd->add_option("--nodes", predict_args.nodes, "full graph node count");
    predict_cmd->add_flag("--allow-graph-drift", predict_args.allow_graph_drift,
                          "accept training-subgraph changes");
    predict_cmd->add_option("--out", predict_args.out, "output directory")->required();

    SimArgs sim_args;
    std::string sim_out;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "generate a synthetic dataset");
    sim_cmd->fallthrough();
    auto add_sim_options = [&](CLI::App* cmd, SimArgs& target, bool allow_all) {
        cmd->add_option("--network", target.network,
                        allow_all ? "uniform|tight|open|wideopen|all" : "uniform|tight|open|wideopen");
        cmd->add_option("--n", target.n, "observations");
        cmd->add_option("--p", target.p, "predictors");
        cmd->add_option("--groups", target.groups, "effect groups");
        cmd->add_option("--noise-sd", target.noise_sd, "noise standard deviation");
        cmd->add_option("--effect-scale", target.effect_scale, "group effect spread");
        cmd->add_option("--nonlinearity", target.nonlinearity, "linear|sine|quadratic");
        cmd->add_option("--edge-budget", target.edge_budget, "target mean degree");
        cmd->add_option("--seed", target.seed, "random seed");
        cmd->add_flag("--decouple-groups", target.decouple_groups,
                      "scramble network blocks relative to effect groups");
    };
    add_sim_options(sim_cmd, sim_args, false);
    sim_cmd->add_option("--out", sim_out, "output directory")->required();

    BenchmarkArgs bench_args;
    bench_args.sim.network = "all";
    std::string bench_out;
    CLI::App* bench_cmd = app.add_subcommand("benchmark", "run the machine-comparison study");
    bench_cmd->fallthrough();
    add_sim_options(bench_cmd, bench_args.sim, true);
    bench_cmd->add_option("--runs", bench_args.runs, "repeated runs per network kind");
    bench_cmd->add_option("--split", bench_args.split, "training fraction");
    bench_cmd->add_option("--machines", bench_args.machines,
                          "machine tags (default: mlr lin cohesion-rbf cohesion-laplace krr-rbf "
                          "krr-laplace)")
        ->delimiter(',');
    bench_cmd->add_option("--lambda", bench_args.lambda, "fix lambda instead of GCV");
    bench_cmd->add_option("--psi", bench_args.psi, "fix psi instead of GCV");
    bench_cmd->add_flag("--save-predictions", bench_args.save_predictions,
                        "write per-run predictions.csv");
    bench_cmd->add_flag("--svg", bench_args.svg, "write bar charts per (kind, split)");
    bench_cmd->add_option("--out", bench_out, "output directory")->required();

    std::string summarize_report, summarize_out;
    bool summarize_svg = false;
    CLI::App* summarize_cmd = app.add_subcommand("summarize", "aggregate a report.csv");
    summarize_cmd->fallthrough();
    summarize_cmd->add_option("--report", summarize_report, "report.csv path")->required();
    summarize_cmd->add_flag("--svg", summarize_svg, "write bar charts");
    summarize_cmd->add_option("--out", summarize_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        if (json_errors) {
            std::cerr << json{{"error", "usage"}, {"message", e.what()}, {"exit_code", kExitUsage}}.dump()
                      << '\n';
        } else {
            std::cerr << "netkrr: " << e.what() << '\n';
        }
        return kExitUsage;
    }

    try {
        if (fit_cmd->parsed()) return cmd_fit(fit_args);
        if (predict_cmd->parsed()) return cmd_predict(predict_args);
        if (sim_cmd->parsed()) return cmd_simulate(sim_args, sim_out);
        if (bench_cmd->parsed()) return cmd_benchmark(bench_args, bench_out);
        if (summarize_cmd->parsed()) return cmd_summarize(summarize_report, summarize_svg, summarize_out);
    } catch (const std::exception& e) {
        return report_error(e, json_errors);
    }
    return kExitFailure;
}
