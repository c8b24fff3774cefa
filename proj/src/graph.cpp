#include "netkrr/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include <Eigen/Cholesky>

#include "netkrr/rng.hpp"

namespace netkrr {

Graph Graph::from_edges(int n, std::vector<std::pair<int, int>> edges) {
    if (n < 0) throw ConfigError("node count must be nonnegative");
    for (auto& [u, v] : edges) {
        if (u == v) {
            throw ConfigError("self-loop at node " + std::to_string(u));
        }
        if (u < 0 || v < 0 || u >= n || v >= n) {
            throw ConfigError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                              ") outside node range [0," + std::to_string(n) + ")");
        }
        if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return Graph{n, std::move(edges)};
}

Eigen::MatrixXd Graph::adjacency() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [u, v] : edges) {
        a(u, v) = 1.0;
        a(v, u) = 1.0;
    }
    return a;
}

Eigen::VectorXd Graph::degrees() const {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    for (const auto& [u, v] : edges) {
        d[u] += 1.0;
        d[v] += 1.0;
    }
    return d;
}

std::vector<int> Graph::components() const {
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto& [u, v] : edges) parent[find(u)] = find(v);

    std::vector<int> label(n, -1);
    int next = 0;
    for (int i = 0; i < n; ++i) {
        const int root = find(i);
        if (label[root] < 0) label[root] = next++;
        label[i] = label[root];
    }
    return label;
}

Graph Graph::induced(const std::vector<int>& nodes) const {
    std::vector<int> position(n, -1);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const int v = nodes[i];
        if (v < 0 || v >= n) throw ConfigError("induced node " + std::to_string(v) + " out of range");
        if (position[v] >= 0) throw ConfigError("duplicate node " + std::to_string(v) + " in induced set");
        position[v] = static_cast<int>(i);
    }
    std::vector<std::pair<int, int>> sub;
    for (const auto& [u, v] : edges) {
        if (position[u] >= 0 && position[v] >= 0) sub.emplace_back(position[u], position[v]);
    }
    return Graph::from_edges(static_cast<int>(nodes.size()), std::move(sub));
}

const char* to_string(NetworkKind kind) {
    switch (kind) {
        case NetworkKind::kUniform: return "uniform";
        case NetworkKind::kTight: return "tight";
        case NetworkKind::kOpen: return "open";
        case NetworkKind::kWideOpen: return "wide-open";
    }
    return "?";
}

NetworkKind network_kind_from_string(const std::string& name) {
    if (name == "uniform") return NetworkKind::kUniform;
    if (name == "tight") return NetworkKind::kTight;
    if (name == "open") return NetworkKind::kOpen;
    if (name == "wideopen" || name == "wide-open" || name == "wide_open") return NetworkKind::kWideOpen;
    throw ConfigError("unknown network kind: " + name);
}

NetworkTopology NetworkTopology::make(NetworkKind kind, int groups, double edge_budget) {
    if (groups < 1) throw ConfigError("groups must be >= 1");
    if (edge_budget <= 0.0) throw ConfigError("edge_budget must be positive");
    NetworkTopology t;
    t.kind = kind;
    t.groups = groups;
    t.edge_budget = edge_budget;
    return t;
}

Eigen::VectorXd NetworkTopology::resolved_concentration() const {
    if (concentration.size() > 0) {
        if (concentration.size() != groups) throw ConfigError("concentration length must equal groups");
        if ((concentration.array() <= 0.0).any()) throw ConfigError("concentration entries must be positive");
        return concentration;
    }
    // First entry is the own-block concentration (rotated onto each node's
    // block by generate_network); the own/other ratio sets how visibly the
    // blocks separate: tight >> open > wide-open, uniform flat.
    Eigen::VectorXd c = Eigen::VectorXd::Constant(groups, 0.3);
    switch (kind) {
        case NetworkKind::kTight:
            c[0] = 10.0;
            return c;
        case NetworkKind::kOpen:
            c[0] = 1.0;
            return c;
        case NetworkKind::kWideOpen:
            c[0] = 0.6;
            return c;
        case NetworkKind::kUniform: return Eigen::VectorXd::Ones(groups);
    }
    return Eigen::VectorXd::Ones(groups);
}

Laplacian build_laplacian(const Graph& g) {
    Eigen::MatrixXd l = -g.adjacency();
    const Eigen::VectorXd d = g.degrees();
    for (int i = 0; i < g.n; ++i) l(i, i) = d[i];
    return Laplacian{std::move(l), g};
}

double cohesion_penalty(const Laplacian& laplacian, const Eigen::VectorXd& a) {
    if (a.size() != laplacian.n()) {
        throw DimensionError("cohesion_penalty: effect vector length " + std::to_string(a.size()) +
                             " != node count " + std::to_string(laplacian.n()));
    }
    return a.dot(laplacian.matrix * a);
}

namespace {

void check_partition_indices(int n, const std::vector<int>& train, const std::vector<int>& test) {
    std::vector<int> seen(n, 0);
    auto mark = [&](const std::vector<int>& idx, const char* name) {
        for (int v : idx) {
            if (v < 0 || v >= n) {
                throw ConfigError(std::string(name) + " index " + std::to_string(v) + " out of range");
            }
            if (seen[v]++) {
                throw ConfigError("node " + std::to_string(v) + " appears twice across train/test indices");
            }
        }
    };
    mark(train, "train");
    mark(test, "test");
    if (static_cast<int>(train.size() + test.size()) != n) {
        throw ConfigError("train/test indices must cover all " + std::to_string(n) + " nodes");
    }
}

}  // namespace

LaplacianPartition partition_laplacian(const Laplacian& laplacian,
                                       const std::vector<int>& train_index,
                                       const std::vector<int>& test_index) {
    check_partition_indices(laplacian.n(), train_index, test_index);
    LaplacianPartition p;
    p.ss = laplacian.matrix(train_index, train_index);
    p.st = laplacian.matrix(train_index, test_index);
    p.ts = laplacian.matrix(test_index, train_index);
    p.tt = laplacian.matrix(test_index, test_index);
    p.train_index = train_index;
    p.test_index = test_index;
    return p;
}

Eigen::VectorXd harmonic_extension(const LaplacianPartition& partition, const Eigen::VectorXd& alpha_s) {
    const auto ns = static_cast<Eigen::Index>(partition.train_index.size());
    const auto nt = static_cast<Eigen::Index>(partition.test_index.size());
    if (alpha_s.size() != ns) {
        throw DimensionError("harmonic_extension: alpha_s length " + std::to_string(alpha_s.size()) +
                             " != train count " + std::to_string(ns));
    }
    if (nt == 0) return Eigen::VectorXd(0);

    // L_tt is positive definite iff every component of the test-induced
    // subgraph has an edge into the training set. Detect violations
    // structurally so the error can name the nodes.
    std::vector<int> parent(nt);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (Eigen::Index i = 0; i < nt; ++i) {
        for (Eigen::Index j = i + 1; j < nt; ++j) {
            if (partition.tt(i, j) != 0.0) parent[find(int(i))] = find(int(j));
        }
    }
    std::vector<char> anchored(nt, 0);
    for (Eigen::Index i = 0; i < nt; ++i) {
        if (partition.ts.row(i).cwiseAbs().sum() > 0.0) anchored[find(int(i))] = 1;
    }
    std::vector<int> offending;
    for (Eigen::Index i = 0; i < nt; ++i) {
        if (!anchored[find(int(i))]) offending.push_back(partition.test_index[i]);
    }
    if (!offending.empty()) {
        throw UnreachableNodesError("harmonic_extension", offending);
    }

    Eigen::LLT<Eigen::MatrixXd> llt(partition.tt);
    if (llt.info() != Eigen::Success) {
        throw SingularSystemError("harmonic_extension: L_tt factorization failed", 0.0);
    }
    return llt.solve(-(partition.ts * alpha_s));
}

namespace {

// Scale factor c with sum_{u<v} min(1, c*s_uv) == target, by bisection.
double edge_probability_scale(const std::vector<double>& similarity, double target) {
    double positive = 0.0;
    for (double s : similarity) {
        if (s > 0.0) positive += 1.0;
    }
    if (positive <= target) return std::numeric_limits<double>::infinity();

    auto expected = [&](double c) {
        double total = 0.0;
        for (double s : similarity) total += std::min(1.0, c * s);
        return total;
    };
    double hi = 1.0;
    while (expected(hi) < target) hi *= 2.0;
    double lo = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (expected(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

Graph generate_network(const NetworkTopology& topology, int n, std::uint64_t seed) {
    if (n < topology.groups) throw ConfigError("node count must be >= groups");
    std::vector<int> group_of(n);
    for (int i = 0; i < n; ++i) {
        group_of[i] = static_cast<int>(static_cast<std::int64_t>(i) * topology.groups / n);
    }
    return generate_network(topology, n, seed, group_of);
}

Graph generate_network(const NetworkTopology& topology, int n, std::uint64_t seed,
                       const std::vector<int>& group_of) {
    if (n < topology.groups) throw ConfigError("node count must be >= groups");
    if (topology.edge_budget > double(n - 1)) {
        throw ConfigError("edge_budget " + std::to_string(topology.edge_budget) +
                          " exceeds the maximum mean degree " + std::to_string(n - 1));
    }
    if (static_cast<int>(group_of.size()) != n) throw ConfigError("group_of length must equal n");
    for (int g : group_of) {
        if (g < 0 || g >= topology.groups) throw ConfigError("group label out of range");
    }

    Rng rng(seed);
    const int groups = topology.groups;
    const Eigen::VectorXd base = topology.resolved_concentration();

    // Node memberships over blocks. The first concentration entry is rotated
    // onto the node's own block so blocks align with the supplied labels;
    // a flat concentration (uniform) degenerates to label-free draws.
    Eigen::MatrixXd membership(n, groups);
    if (topology.kind == NetworkKind::kUniform) {
        membership.setConstant(1.0 / double(groups));
    } else {
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd conc = base;
            std::swap(conc[0], conc[static_cast<Eigen::Index>(group_of[i])]);
            membership.row(i) = rng.dirichlet(conc).transpose();
        }
    }

    std::vector<double> similarity;
    similarity.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            similarity.push_back(membership.row(u).dot(membership.row(v)));
        }
    }
    const double target_edges = topology.edge_budget * n / 2.0;
    const double scale = edge_probability_scale(similarity, target_edges);

    std::vector<std::pair<int, int>> edges;
    std::size_t k = 0;
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v, ++k) {
            const double p = std::min(1.0, scale * similarity[k]);
            if (rng.uniform() < p) edges.emplace_back(u, v);
        }
    }
    return Graph::from_edges(n, std::move(edges));
}

Graph read_edge_list(std::istream& source, std::optional<int> n) {
    std::vector<std::pair<int, int>> edges;
    std::string line;
    int line_no = 0;
    int max_index = -1;
    while (std::getline(source, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t"));
        if (trimmed.empty()) continue;
        if (line_no == 1 && trimmed.rfind("u", 0) == 0) continue;  // header "u,v"

        std::istringstream fields(trimmed);
        std::string tok_u, tok_v, extra;
        if (!std::getline(fields, tok_u, ',') || !std::getline(fields, tok_v, ',')) {
            throw ParseError("edge list line " + std::to_string(line_no) + ": expected \"u,v\"");
        }
        if (std::getline(fields, extra, ',') && !extra.empty()) {
            throw ParseError("edge list line " + std::to_string(line_no) + ": too many fields");
        }
        int u, v;
        try {
            std::size_t pos_u = 0, pos_v = 0;
            u = std::stoi(tok_u, &pos_u);
            v = std::stoi(tok_v, &pos_v);
            while (pos_u < tok_u.size() && std::isspace(static_cast<unsigned char>(tok_u[pos_u]))) ++pos_u;
            while (pos_v < tok_v.size() && std::isspace(static_cast<unsigned char>(tok_v[pos_v]))) ++pos_v;
            if (pos_u != tok_u.size() || pos_v != tok_v.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ParseError("edge list line " + std::to_string(line_no) + ": non-integer token");
        }
        if (u == v) {
            throw ParseError("edge list line " + std::to_string(line_no) + ": self-loop at node " +
                             std::to_string(u));
        }
        if (u < 0 || v < 0) {
            throw ParseError("edge list line " + std::to_string(line_no) + ": negative node index");
        }
        if (n && (u >= *n || v >= *n)) {
            throw ParseError("edge list line " + std::to_string(line_no) + ": node index >= declared n=" +
                             std::to_string(*n));
        }
        max_index = std::max({max_index, u, v});
        edges.emplace_back(u, v);
    }
    const int node_count = n ? *n : max_index + 1;
    return Graph::from_edges(node_count, std::move(edges));
}

void write_edge_list(const Graph& g, std::ostream& sink) {
    sink << "u,v\n";
    for (const auto& [u, v] : g.edges) sink << u << ',' << v << '\n';
}

}  // namespace netkrr
