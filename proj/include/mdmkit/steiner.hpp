#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mdmkit/geometry.hpp"

namespace mdmkit {

// Abstract Steiner topology. Node ids: 0..n-1 are labelled terminals,
// n..n+k-1 are unlabelled Steiner nodes.
struct Topology {
    int n_terminals = 0;
    std::vector<std::pair<int, int>> edges;

    int node_count() const;
    int steiner_count() const { return node_count() - n_terminals; }
    std::vector<int> degrees() const;
    bool is_tree() const;
    // Full: n-2 Steiner nodes of degree 3, every terminal of degree 1.
    bool is_full() const;
    bool same_structure(const Topology& other) const;
};

// All full topologies on n labelled terminals, (2n-5)!! of them for n >= 3.
std::vector<Topology> enumerate_full_topologies(int n);

struct DiskConstraint {
    Point center;
    double radius = 0.0;
};
using TerminalSpec = std::variant<Point, DiskConstraint>;

struct Realization {
    Topology topology;
    std::vector<Point> coords;  // one per topology node
    double total_length = 0.0;
    bool converged = false;
    std::vector<TerminalSpec> terminal_constraints;

    EmbeddedNetwork as_network() const;
    // Network with edges shorter than eps merged away.
    EmbeddedNetwork collapsed_network(double eps) const;
};

// Exact planar realization of a full topology via the equilateral-point
// merge construction. Returns nullopt when the topology is not realizable
// for these terminals.
std::optional<Realization> melzak_realize_2d(const Topology& topology,
                                             const std::vector<Point>& terminals);

struct RealizeOptions {
    std::uint64_t init_seed = 0;  // 0: deterministic centroid init
};

// Convex minimization of total length over Steiner positions and
// disk-constrained terminal positions.
Realization realize_convex(const Topology& topology, const std::vector<TerminalSpec>& terminals,
                           const RealizeOptions& options = {});

// All tied minimum-length realizations over the full topologies (plus their
// edge-collapse degenerations), ties within 1e-9 relative length.
std::vector<Realization> steiner_tree(const std::vector<Point>& points);

struct AngleViolation {
    std::string kind;  // "degree", "branch-angle", "path-angle"
    int node = -1;
    double value = 0.0;
    std::string message;
};

// Local-minimality checks: degree <= 3, 2*pi/3 at branch points, >= 2*pi/3
// at degree-2 vertices. Runs on the collapsed network.
std::vector<AngleViolation> validate_locally_minimal(const Realization& realization, double tol);

// Length of the network with nodes at alpha*S0 + (1-alpha)*S1.
double length_interpolation(const Realization& s0, const Realization& s1, double alpha);

}  // namespace mdmkit
