#pragma once

#include <cstdint>
#include <vector>

#include "mdmkit/geometry.hpp"

namespace mdmkit {

// Convex minimization of total edge length over node positions, with each
// node free, pinned, or confined to a closed disk/ball. Smoothed-norm
// continuation followed by exact per-node coordinate minimization.
namespace convexmin {

enum class Kind { Free, Fixed, Disk };

struct NodeConstraint {
    Kind kind = Kind::Free;
    Point center;        // Fixed position or disk center
    double radius = 0.0;  // Disk only
};

struct Problem {
    std::vector<Point> init;
    std::vector<std::pair<int, int>> edges;
    std::vector<NodeConstraint> constraints;  // one per node
};

struct Options {
    int smoothing_stages = 6;
    double mu_start_rel = 1e-2;   // first smoothing scale, relative to diameter
    int max_iterations = 4000;    // per smoothing stage
    int polish_sweeps = 4000;     // exact coordinate-descent sweeps
    double rel_tol = 1e-12;
};

struct Result {
    std::vector<Point> coords;
    double length = 0.0;
    bool converged = false;
};

Result minimize_length(const Problem& problem, const Options& options = {});

// Exact Fermat (Torricelli) point of a triangle, any dimension.
Point fermat_point(const Point& a, const Point& b, const Point& c);

// Minimizer of sum of distances to `anchors` over the closed ball
// (center, radius).
Point disk_constrained_min(const Point& center, double radius,
                           const std::vector<Point>& anchors, const Point& current);

}  // namespace convexmin

}  // namespace mdmkit
