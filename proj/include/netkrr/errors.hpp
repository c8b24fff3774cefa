#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace netkrr {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mismatched vector/matrix dimensions between arguments.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Malformed input file or stream (CSV, edge list, JSON record).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value (negative penalty, bad grid, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The estimating equations are singular or too ill-conditioned to solve.
class SingularSystemError : public Error {
public:
    SingularSystemError(const std::string& msg, double condition_estimate)
        : Error(msg), condition(condition_estimate) {}

    double condition;
};

/// Test nodes that no training node can reach through the graph.
class UnreachableNodesError : public Error {
public:
    UnreachableNodesError(const std::string& what_failed, std::vector<int> offending)
        : Error(format(what_failed, offending)), nodes(std::move(offending)) {}

    std::vector<int> nodes;

private:
    static std::string format(const std::string& what_failed, const std::vector<int>& offending) {
        std::ostringstream os;
        os << what_failed << ": test node(s) unreachable from any training node:";
        for (int v : offending) os << ' ' << v;
        return os.str();
    }
};

/// The prediction graph disagrees with the graph the model was fitted on.
class GraphDriftError : public Error {
public:
    using Error::Error;
};

}  // namespace netkrr
