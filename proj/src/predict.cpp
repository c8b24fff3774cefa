#include "netkrr/predict.hpp"

#include <algorithm>
#include <string>

namespace netkrr {

Eigen::VectorXd fitted_values(const CohesionFit& fit) {
    if (fit.x_train.rows() != fit.alpha.size()) {
        // Fit built from a precomputed Gram; reconstruct K from retained inputs is impossible.
        if (fit.x_train.size() == 0) {
            throw ConfigError("fitted_values: fit carries no training features; refit from (X, graph, kernel)");
        }
        throw DimensionError("fitted_values: retained features inconsistent with alpha length");
    }
    const Eigen::MatrixXd k = gram(fit.kernel, fit.x_train);
    return fit.alpha + k * fit.w;
}

namespace {

// Edges of the training subgraph of `full`, renumbered to training rows.
std::vector<std::pair<int, int>> train_subgraph_edges(const Graph& full,
                                                      const std::vector<int>& train_index) {
    std::vector<int> position(full.n, -1);
    for (std::size_t i = 0; i < train_index.size(); ++i) position[train_index[i]] = static_cast<int>(i);
    std::vector<std::pair<int, int>> edges;
    for (const auto& [u, v] : full.edges) {
        if (position[u] >= 0 && position[v] >= 0) {
            const int a = std::min(position[u], position[v]);
            const int b = std::max(position[u], position[v]);
            edges.emplace_back(a, b);
        }
    }
    std::sort(edges.begin(), edges.end());
    return edges;
}

}  // namespace

Eigen::VectorXd predict(const CohesionFit& fit, const PredictionInput& input) {
    const Eigen::Index n_train = fit.alpha.size();
    const Eigen::Index n_test = input.x_new.rows();
    if (static_cast<Eigen::Index>(input.train_index.size()) != n_train) {
        throw DimensionError("predict: train_index length " + std::to_string(input.train_index.size()) +
                             " != training size " + std::to_string(n_train));
    }
    if (static_cast<Eigen::Index>(input.test_index.size()) != n_test) {
        throw DimensionError("predict: test_index length " + std::to_string(input.test_index.size()) +
                             " != rows of x_new " + std::to_string(n_test));
    }
    if (fit.x_train.size() == 0) {
        throw ConfigError("predict: fit carries no training features; refit from (X, graph, kernel)");
    }
    if (input.x_new.cols() != fit.x_train.cols()) {
        throw DimensionError("predict: feature dimension " + std::to_string(input.x_new.cols()) +
                             " != training dimension " + std::to_string(fit.x_train.cols()));
    }

    // The training rows of the prediction graph must carry the same edges the
    // model was fitted with; anything else silently changes the cohesion
    // semantics of alpha.
    if (!input.allow_graph_drift &&
        train_subgraph_edges(input.full_graph, input.train_index) != fit.graph.edges) {
        throw GraphDriftError(
            "predict: the training subgraph of the prediction graph differs from the graph the model "
            "was fitted on; pass allow_graph_drift to override");
    }

    const Laplacian full_laplacian = build_laplacian(input.full_graph);
    const LaplacianPartition part =
        partition_laplacian(full_laplacian, input.train_index, input.test_index);
    const Eigen::VectorXd alpha_t = harmonic_extension(part, fit.alpha);
    return alpha_t + cross_gram(fit.kernel, input.x_new, fit.x_train) * fit.w;
}

double mse(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw DimensionError("mse: lengths differ (" + std::to_string(y_true.size()) + " vs " +
                             std::to_string(y_pred.size()) + ")");
    }
    if (y_true.size() == 0) throw DimensionError("mse: empty vectors");
    return (y_true - y_pred).squaredNorm() / static_cast<double>(y_true.size());
}

}  // namespace netkrr
