#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mdmkit/geometry.hpp"
#include "mdmkit/steiner.hpp"

namespace mdmkit {

// Problem data: a finite point set M (or a convex polygon for the bound
// computations) together with the coverage radius r.
struct Instance {
    int dim = 2;
    double r = 0.0;
    std::vector<Point> points;
    std::vector<Point> polygon;

    bool has_polygon() const { return !polygon.empty(); }
    void validate() const;
};

// max over M of dist(y, S).
double coverage_radius(const EmbeddedNetwork& net, const std::vector<Point>& m_points);

// max(0, (|M| - w_d r^d) / (w_{d-1} r^{d-1})).
double lower_bound_volume(double m_measure, double r, int d);

// (perimeter(M) - 2*pi*r) / 2, clamped at zero; M must be convex.
double lower_bound_perimeter(const std::vector<Point>& convex_polygon, double r);

// Minimizer for a finite M: disk-constrained Steiner realization over all
// full topologies, ties reported. Overlapping disks are only admitted via
// the common-intersection shortcut and the two-point case.
std::vector<Realization> solve_finite_m(const Instance& instance);

// The Steiner tree for `points` with each terminal leg shortened by exactly
// r. Requires a unique full Steiner tree and r < q.
EmbeddedNetwork truncate_full_steiner(const std::vector<Point>& points, double r);

struct CorrespondingPair {
    int node = -1;
    Point y;
    double distance = 0.0;
};

struct StructureViolation {
    std::string kind;  // "cycle", "degree", "branch-angle", "path-angle",
                       // "non-energetic-corner", "non-energetic-leaf"
    int node = -1;
    double value = 0.0;
    std::string message;
};

struct StructureReport {
    double coverage_radius = 0.0;
    std::vector<bool> energetic;  // per network node
    std::vector<CorrespondingPair> corresponding;
    std::vector<StructureViolation> violations;
    bool ok() const { return violations.empty(); }
};

// Structural checks for a minimizer candidate: acyclic, degree <= 3, branch
// angles 2*pi/3, degree-2 angles >= 2*pi/3, corners and leaves energetic.
StructureReport validate_minimizer_structure(const EmbeddedNetwork& net, const Instance& instance,
                                             double tol);

// The corner-point construction: a_i on the circle of radius R with halving
// chord lengths starting at r/N, v_i on the exterior bisectors at distance r,
// truncated at depth k with the reflected-ray terminal point.
struct CornerInstance {
    double R = 0.0, r = 0.0;
    int N = 0, k = 0;
    std::vector<Point> a_points;   // a_1..a_k and the truncated endpoint a^k_inf
    std::vector<Point> v_points;   // v_1..v_k and v^k_inf
    std::vector<double> a_phi;     // central angles of a_1..a_{k+1}
    double phi_inf = 0.0;
    Point a_inf, v_inf, v_inf_plus1;

    Instance instance() const;     // M = v_points with radius r
    PolyCurve expected_polyline() const;  // a_1..a_k, a^k_inf
};
CornerInstance build_corner_instance(double R, double r, int N, int k);

// Shortest chain with vertex i confined to the closed disk around
// centers[i]. Convex; converged means the objective settled and two
// independent initializations agreed within 1e-6.
Realization chain_solve(const std::vector<Point>& centers, double r, std::uint64_t seed);

struct ChainDetail {
    Realization realization;
    double run_disagreement = 0.0;  // max vertex distance between the two runs
    bool unique_verified = false;
};
ChainDetail chain_solve_detailed(const std::vector<Point>& centers, double r, std::uint64_t seed);

// Smallest enclosing ball of up to a handful of points (d <= 3).
struct Ball {
    Point center;
    double radius = 0.0;
};
Ball smallest_enclosing_ball(const std::vector<Point>& points);

}  // namespace mdmkit
