#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "netkrr/errors.hpp"

namespace netkrr {

/// Simple undirected graph: node count plus a canonical edge set
/// (pairs stored with u < v, sorted, duplicates removed).
struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;

    /// Validates endpoints, rejects self-loops, canonicalizes the edge set.
    static Graph from_edges(int n, std::vector<std::pair<int, int>> edges);

    Eigen::MatrixXd adjacency() const;
    Eigen::VectorXd degrees() const;

    /// Connected-component label per node (labels are 0..k-1 in order of
    /// first appearance).
    std::vector<int> components() const;

    /// Subgraph induced by `nodes`; node i of the result is nodes[i].
    Graph induced(const std::vector<int>& nodes) const;

    bool operator==(const Graph& other) const = default;
};

/// Combinatorial Laplacian L = D - A together with its source graph.
struct Laplacian {
    Eigen::MatrixXd matrix;
    Graph source;

    int n() const { return source.n; }
};

/// Laplacian blocks of a train/test split, in (train_index, test_index) order.
struct LaplacianPartition {
    Eigen::MatrixXd ss;  // n_s x n_s
    Eigen::MatrixXd st;  // n_s x n_t
    Eigen::MatrixXd ts;  // n_t x n_s
    Eigen::MatrixXd tt;  // n_t x n_t
    std::vector<int> train_index;
    std::vector<int> test_index;
};

enum class NetworkKind { kUniform, kTight, kOpen, kWideOpen };

const char* to_string(NetworkKind kind);
NetworkKind network_kind_from_string(const std::string& name);

/// Generator family for the four benchmark topologies. Every node draws a
/// block-membership vector from Dirichlet(concentration); the edge
/// probability of a pair is proportional to the dot product of their
/// memberships, scaled so the expected mean degree hits edge_budget.
/// "tight" rotates a peaked concentration onto each node's own block;
/// "uniform" skips the draw entirely (flat memberships, Erdos-Renyi-like).
struct NetworkTopology {
    NetworkKind kind = NetworkKind::kUniform;
    int groups = 4;
    Eigen::VectorXd concentration;  // empty -> kind default
    double edge_budget = 16.0;      // target mean degree

    static NetworkTopology make(NetworkKind kind, int groups = 4, double edge_budget = 16.0);

    /// Concentration pattern implied by `kind` when none is supplied:
    /// tight = peaked (10 on own block, 0.3 elsewhere), open = all ones,
    /// wide-open = all 0.3. Unused for uniform.
    Eigen::VectorXd resolved_concentration() const;
};

Laplacian build_laplacian(const Graph& g);

/// Quadratic form a' L a == sum over edges of (a_u - a_v)^2.
double cohesion_penalty(const Laplacian& laplacian, const Eigen::VectorXd& a);

/// Extract the split blocks. Indices must be disjoint and cover [0, n).
LaplacianPartition partition_laplacian(const Laplacian& laplacian,
                                       const std::vector<int>& train_index,
                                       const std::vector<int>& test_index);

/// Effects on test nodes minimizing the cohesion penalty given fixed
/// training effects: solves L_tt x = -L_ts alpha_s. Throws
/// UnreachableNodesError when a test component has no link to training.
Eigen::VectorXd harmonic_extension(const LaplacianPartition& partition,
                                   const Eigen::VectorXd& alpha_s);

/// Generate a benchmark graph. `group_of`, when given, supplies the block
/// label of each node (values in [0, topology.groups)); otherwise nodes are
/// assigned to contiguous balanced blocks.
Graph generate_network(const NetworkTopology& topology, int n, std::uint64_t seed);
Graph generate_network(const NetworkTopology& topology, int n, std::uint64_t seed,
                       const std::vector<int>& group_of);

/// Edge-list CSV: one "u,v" line per edge, 0-indexed, optional "u,v" header.
/// Node count is taken from `n` or inferred as max index + 1.
Graph read_edge_list(std::istream& source, std::optional<int> n = std::nullopt);
void write_edge_list(const Graph& g, std::ostream& sink);

}  // namespace netkrr
