#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mdmkit/geometry.hpp"

namespace mdmkit {

// Volume of the unit ball in R^k.
double unit_ball_volume(int k);

// length * w_{d-1} * R^{d-1} + w_d * R^d.
double tube_upper_bound(double length, double R, int d);

struct McEstimate {
    double estimate = 0.0;
    double ci_halfwidth = 0.0;  // 3 sigma
};

// Monte Carlo volume of the R-neighborhood of the network, sampling the
// exact inflated bounding box. Deterministic for fixed (seed, samples) and
// independent of the worker count.
McEstimate tube_volume_mc(const EmbeddedNetwork& net, double R, std::uint64_t samples,
                          std::uint64_t seed);

// Cell-counting area of the R-neighborhood in the plane; the authoritative
// fallback when the statistical equality verdict is inconclusive.
double grid_tube_area_2d(const EmbeddedNetwork& net, double R, double cell);

// Exact length of the offset boundary (union-of-stadiums boundary) in R^2.
double boundary_length_2d(const EmbeddedNetwork& net, double r);

// The retained boundary pieces, for rendering and diagnostics.
struct BoundaryArc {
    Point center;
    double radius = 0.0;
    double a0 = 0.0, a1 = 0.0;  // angle interval, a0 < a1
};
struct BoundaryPieces {
    std::vector<std::pair<Point, Point>> segments;
    std::vector<BoundaryArc> arcs;
    double length() const;
};
BoundaryPieces boundary_pieces_2d(const EmbeddedNetwork& net, double r);

struct DoubleNearestWitness {
    Point p;
    double t1 = 0.0, t2 = 0.0;  // arc-length parameters, t1 < t2
    double common_distance = 0.0;
};

// Searches B_R(curve) for a point with two distinct nearest feet. Absence of
// a witness is a sampling answer, not a proof.
std::optional<DoubleNearestWitness> find_double_nearest_witness(const PolyCurve& curve, double R,
                                                                std::uint64_t samples,
                                                                std::uint64_t seed);

// Minimum circumradius over consecutive vertex triples; +inf for straight
// polylines.
double curvature_radius_estimate(const PolyCurve& curve);

// min(eps_1, R) with eps_1 = half the minimal spatial distance between
// pairs of curve points separated by at least pi*R in arc length; R is the
// curvature radius estimate capped at the curve length.
double admissible_radius(const PolyCurve& curve);

struct TubeVerdicts {
    bool volume_equality = false;   // item (i)
    bool unique_nearest = false;    // item (ii): no witness found
    bool curvature_ok = false;      // item (iii) curvature component
    bool agree = false;
    std::string volume_source;  // "mc" or "grid"
};

struct TubeReport {
    double curve_length = 0.0;
    double radius = 0.0;
    double volume_estimate = 0.0;
    double volume_ci_halfwidth = 0.0;
    double upper_bound = 0.0;
    bool equality = false;  // all three verdicts positive
    std::optional<DoubleNearestWitness> witness;
    double curvature_estimate = 0.0;
    TubeVerdicts verdicts;
};

struct TubeCheckOptions {
    bool escalate_grid_2d = true;  // rerun an inconclusive volume verdict on the grid
    double grid_cell_rel = 1e-3;   // grid cell as a fraction of the diameter
};

TubeReport check_theorem_c11(const PolyCurve& curve, double R, std::uint64_t samples,
                             std::uint64_t seed, const TubeCheckOptions& options = {});

enum class DistanceWeight { Identity, Square };

// Monte Carlo estimate of the average-distance functional
// integral over B_R(domain) of phi(dist(x, beta)) dx.
McEstimate avg_distance_functional_mc(const EmbeddedNetwork& beta, const PolyCurve& domain,
                                      double R, DistanceWeight phi, std::uint64_t samples,
                                      std::uint64_t seed);
double avg_distance_functional(const EmbeddedNetwork& beta, const PolyCurve& domain, double R,
                               DistanceWeight phi, std::uint64_t samples, std::uint64_t seed);

}  // namespace mdmkit
