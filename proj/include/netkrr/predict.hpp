#pragma once

#include <vector>

#include <Eigen/Core>

#include "netkrr/graph.hpp"
#include "netkrr/solver.hpp"

namespace netkrr {

/// New observations plus the graph connecting them to the training nodes.
/// `full_graph` spans training and new nodes together; train_index[i] is the
/// graph node carrying training row i, test_index[j] the node carrying row j
/// of x_new.
struct PredictionInput {
    Eigen::MatrixXd x_new;
    Graph full_graph;
    std::vector<int> train_index;
    std::vector<int> test_index;

    /// Accept a training subgraph that differs from the one the model was
    /// fitted on (otherwise a GraphDriftError is raised).
    bool allow_graph_drift = false;
};

/// In-sample predictions alpha + K w.
Eigen::VectorXd fitted_values(const CohesionFit& fit);

/// Out-of-sample predictions: harmonic extension of the node effects over
/// the full graph plus the kernel expansion against the training inputs.
Eigen::VectorXd predict(const CohesionFit& fit, const PredictionInput& input);

/// Mean squared error between two equal-length vectors.
double mse(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred);

}  // namespace netkrr
