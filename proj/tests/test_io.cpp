#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>

#include "netkrr/io.hpp"
#include "netkrr/predict.hpp"
#include "netkrr/rng.hpp"
#include "oracles.hpp"

using namespace netkrr;

TEST_CASE("format_double round-trips exactly") {
    for (const double v : {0.0, 1.0, -1.5, 1.0 / 3.0, 1e-17, 123456789.123456789, 2.5e300}) {
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    }
}

TEST_CASE("feature CSV parsing and errors") {
    {
        std::istringstream in("x1,x2\n1.5,2\n-3,4e-1\n");
        const Eigen::MatrixXd x = read_features_csv(in);
        REQUIRE(x.rows() == 2);
        REQUIRE(x.cols() == 2);
        CHECK(x(0, 0) == 1.5);
        CHECK(x(1, 1) == 0.4);
    }
    {
        std::istringstream in("x1,x2\n1.5\n");
        CHECK_THROWS_AS(read_features_csv(in), ParseError);
    }
    {
        std::istringstream in("x1\nabc\n");
        CHECK_THROWS_AS(read_features_csv(in), ParseError);
    }
    {
        std::istringstream in("");
        CHECK_THROWS_AS(read_features_csv(in), ParseError);
    }
}

TEST_CASE("feature CSV write-read round trip") {
    Rng rng(3);
    const Eigen::MatrixXd x = oracles::random_matrix(rng, 7, 3);
    std::ostringstream out;
    write_features_csv(x, out);
    std::istringstream in(out.str());
    const Eigen::MatrixXd back = read_features_csv(in);
    CHECK(back == x);
}

TEST_CASE("response CSV with and without header") {
    {
        std::istringstream in("y\n1\n2\n3\n");
        const Eigen::VectorXd y = read_response_csv(in);
        CHECK(y.size() == 3);
        CHECK(y[2] == 3.0);
    }
    {
        std::istringstream in("1.5\n-2\n");
        const Eigen::VectorXd y = read_response_csv(in);
        CHECK(y.size() == 2);
    }
    {
        std::istringstream in("y\n1\nbad\n");
        CHECK_THROWS_AS(read_response_csv(in), ParseError);
    }
}

TEST_CASE("index CSV") {
    std::istringstream in("node\n4\n1\n9\n");
    CHECK(read_index_csv(in) == std::vector<int>{4, 1, 9});
}

TEST_CASE("cohesion fit record: embedded round trip preserves predictions") {
    Rng rng(5);
    const Graph g = oracles::random_graph(rng, 8, 0.4, true);
    const Eigen::MatrixXd x = oracles::random_matrix(rng, 8, 2);
    const Eigen::VectorXd y = oracles::random_vector(rng, 8);
    FitConfig cfg;
    cfg.lambda = 0.6;
    cfg.psi = 0.3;
    const CohesionFit model = fit(y, x, g, KernelSpec::rbf(0.9), cfg);

    const auto path = std::filesystem::temp_directory_path() / "netkrr_test_model.json";
    FitRecordOptions options;
    options.embed_data = true;
    save_cohesion_fit(model, path, options);
    const CohesionFit loaded = load_cohesion_fit(path);
    std::filesystem::remove(path);

    CHECK(loaded.alpha == model.alpha);
    CHECK(loaded.w == model.w);
    CHECK(loaded.kernel.gamma == model.kernel.gamma);
    CHECK(loaded.config.lambda == model.config.lambda);
    CHECK(loaded.graph == model.graph);
    CHECK(loaded.x_train == model.x_train);
    CHECK((fitted_values(loaded) - fitted_values(model)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cohesion fit record: path-referenced data reloads from the recorded files") {
    Rng rng(11);
    const Graph g = oracles::random_graph(rng, 6, 0.5, true);
    const Eigen::MatrixXd x = oracles::random_matrix(rng, 6, 2);
    const Eigen::VectorXd y = oracles::random_vector(rng, 6);
    FitConfig cfg;
    const CohesionFit model = fit(y, x, g, KernelSpec::rbf(1.0), cfg);

    const auto dir = std::filesystem::temp_directory_path() / "netkrr_record_paths";
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / "x.csv");
        write_features_csv(x, f);
    }
    write_edge_list_file(g, dir / "g.csv");

    FitRecordOptions options;
    options.embed_data = false;
    options.features_path = (dir / "x.csv").string();
    options.edges_path = (dir / "g.csv").string();
    save_cohesion_fit(model, dir / "model.json", options);
    const CohesionFit loaded = load_cohesion_fit(dir / "model.json");
    CHECK(loaded.x_train == x);
    CHECK(loaded.graph == g);
    CHECK(loaded.alpha == model.alpha);
    std::filesystem::remove_all(dir);
}

TEST_CASE("baseline fit records carry the machine tag") {
    Rng rng(7);
    const Eigen::MatrixXd x = oracles::random_matrix(rng, 6, 2);
    const Eigen::VectorXd y = oracles::random_vector(rng, 6);
    const KernelRidgeFit krr = fit_kernel_ridge(y, x, KernelSpec::rbf(1.0), 0.5);
    FitRecordOptions options;
    const std::string record = kernel_ridge_fit_record(krr, options);
    CHECK(record.find("\"machine\": \"krr\"") != std::string::npos);

    const Graph g = oracles::random_graph(rng, 6, 0.5, true);
    const LinearCohesionFit lin = fit_linear_cohesion(y, x, build_laplacian(g), 1.0);
    const std::string lin_record = linear_cohesion_fit_record(lin);
    CHECK(lin_record.find("\"machine\": \"lin\"") != std::string::npos);
}

TEST_CASE("report CSV round trip") {
    BenchmarkReport report;
    report.rows = {{"mlr", "uniform", "train", 0, 1.25}, {"cohesion-rbf", "tight", "test", 3, 0.5}};
    std::ostringstream out;
    write_report_csv(report, out);
    std::istringstream in(out.str());
    const BenchmarkReport back = read_report_csv(in);
    REQUIRE(back.rows.size() == 2);
    CHECK(back.rows[0].machine == "mlr");
    CHECK(back.rows[0].mse == 1.25);
    CHECK(back.rows[1].run == 3);
    CHECK(back.rows[1].kind == "tight");
}

TEST_CASE("summary writers produce well-formed output") {
    const std::vector<SummaryRow> summary = {{"mlr", "uniform", "test", 1.7, 0.1, 45},
                                             {"cohesion-rbf", "uniform", "test", 1.3, 0.05, 45}};
    std::ostringstream csv;
    write_summary_csv(summary, csv);
    CHECK(csv.str().find("machine,kind,split,runs,mean_mse,sd_mse") == 0);
    CHECK(csv.str().find("mlr,uniform,test,45,") != std::string::npos);

    std::ostringstream table;
    write_summary_table(summary, table);
    CHECK(table.str().find("cohesion-rbf") != std::string::npos);

    std::ostringstream svg;
    write_summary_svg(summary, "uniform", "test", svg);
    CHECK(svg.str().find("<svg") == 0);
    CHECK(svg.str().find("</svg>") != std::string::npos);
    CHECK(svg.str().find("mlr") != std::string::npos);
}

TEST_CASE("digest is stable and content-sensitive") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") != fnv1a_hex("b"));
    CHECK(fnv1a_hex("abc") == fnv1a_hex("abc"));
}
