#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mdmkit {

// Absolute tolerance for "same distance" decisions (nearest-point ties).
inline constexpr double kTieTol = 1e-9;

// Point in R^d, d in {2,3}. Coordinates beyond dim are kept at zero so that
// Euclidean formulas can run over all three slots unconditionally.
struct Point {
    std::array<double, 3> c{0.0, 0.0, 0.0};
    int dim = 2;

    double& operator[](int i) { return c[static_cast<size_t>(i)]; }
    double operator[](int i) const { return c[static_cast<size_t>(i)]; }

    double x() const { return c[0]; }
    double y() const { return c[1]; }
    double z() const { return c[2]; }
};

inline Point make_point(double x, double y) { return Point{{x, y, 0.0}, 2}; }
inline Point make_point(double x, double y, double z) { return Point{{x, y, z}, 3}; }

inline Point operator+(const Point& a, const Point& b) {
    return Point{{a.c[0] + b.c[0], a.c[1] + b.c[1], a.c[2] + b.c[2]}, a.dim};
}
inline Point operator-(const Point& a, const Point& b) {
    return Point{{a.c[0] - b.c[0], a.c[1] - b.c[1], a.c[2] - b.c[2]}, a.dim};
}
inline Point operator*(double s, const Point& a) {
    return Point{{s * a.c[0], s * a.c[1], s * a.c[2]}, a.dim};
}
inline double dot(const Point& a, const Point& b) {
    return a.c[0] * b.c[0] + a.c[1] * b.c[1] + a.c[2] * b.c[2];
}
double norm(const Point& a);
double distance(const Point& a, const Point& b);
// z-component of the cross product; the 2D orientation test.
inline double cross2(const Point& a, const Point& b) { return a.c[0] * b.c[1] - a.c[1] * b.c[0]; }
Point cross3(const Point& a, const Point& b);
// Unit vector a/|a|; throws on the zero vector.
Point normalized(const Point& a);
inline Point lerp(const Point& a, const Point& b, double t) {
    return Point{{a.c[0] + t * (b.c[0] - a.c[0]), a.c[1] + t * (b.c[1] - a.c[1]),
                  a.c[2] + t * (b.c[2] - a.c[2])},
                 a.dim};
}
bool finite(const Point& a);

// Angle at vertex v between rays toward a and b, in [0, pi].
double angle_at(const Point& v, const Point& a, const Point& b);

// Open polyline with cached cumulative arc lengths. Consecutive vertices
// must be distinct; the first and last vertex may coincide (closed curve).
class PolyCurve {
  public:
    explicit PolyCurve(std::vector<Point> vertices);

    const std::vector<Point>& vertices() const { return verts_; }
    const std::vector<double>& cumulative_lengths() const { return cum_; }
    double length() const { return cum_.back(); }
    int dim() const { return verts_.front().dim; }
    size_t segment_count() const { return verts_.size() - 1; }

    // Position at arc-length parameter s, clamped to [0, length].
    Point point_at(double s) const;
    double max_edge_length() const;
    // Smallest gap between non-adjacent segments; used by simplicity checks.
    double min_self_separation() const;
    bool is_closed(double tol = kTieTol) const;

  private:
    std::vector<Point> verts_;
    std::vector<double> cum_;
};

// Straight-edge network: shared representation for curves, Steiner trees and
// chains. `tree_flag` declares the graph is meant to be a connected tree;
// validate() enforces it when set.
struct EmbeddedNetwork {
    std::vector<Point> nodes;
    std::vector<std::pair<int, int>> edges;
    bool tree_flag = false;

    int dim() const { return nodes.empty() ? 2 : nodes.front().dim; }
    double total_length() const;
    void validate() const;
    bool is_connected() const;
    bool has_cycle() const;
    std::vector<int> degrees() const;

    static EmbeddedNetwork from_curve(const PolyCurve& curve);
    static EmbeddedNetwork single_point(const Point& p);
};

// Axis-aligned bounds of all nodes, inflated by `margin`.
struct Box {
    Point lo;
    Point hi;
};
Box bounding_box(const EmbeddedNetwork& net, double margin);
Box bounding_box(const std::vector<Point>& pts, double margin);
double box_volume(const Box& box, int d);
double diameter_estimate(const std::vector<Point>& pts);

struct SegmentFoot {
    double distance = 0.0;
    double param = 0.0;  // nearest point is a + param * (b - a), param in [0,1]
};
SegmentFoot dist_point_segment(const Point& p, const Point& a, const Point& b);

struct NetworkFoot {
    int edge = -1;
    double param = 0.0;
    double distance = 0.0;
    Point point;
};
struct NetworkDistance {
    double distance = 0.0;
    std::vector<NetworkFoot> nearest;  // every edge-local minimizer within tie_tol
};
NetworkDistance dist_to_network(const Point& p, const EmbeddedNetwork& net,
                                double tie_tol = kTieTol);

// Counterclockwise hull, collinear interior points excluded. A single input
// point yields a singleton hull.
std::vector<Point> convex_hull_2d(std::vector<Point> points);
double polygon_perimeter(const std::vector<Point>& poly);
double polygon_area(const std::vector<Point>& poly);

// Subdivides edges so vertex spacing is at most h; original vertices (and
// hence exact length) are preserved.
PolyCurve resample(const PolyCurve& curve, double h);

// Bounding-volume tree over network edges for fast distance queries. Leaves
// keep contiguous edge-index ranges so curve queries can exclude an arc
// window without visiting it.
class NetworkBvh {
  public:
    explicit NetworkBvh(const EmbeddedNetwork& net);

    double distance(const Point& p) const;
    // True iff dist(p, net) <= radius; early exit.
    bool within(const Point& p, double radius) const;
    // Nearest edge-local foot (global minimizer).
    NetworkFoot nearest(const Point& p) const;
    // Nearest foot among edges with index outside [skip_begin, skip_end).
    NetworkFoot nearest_excluding(const Point& p, int skip_begin, int skip_end) const;
    const EmbeddedNetwork& network() const { return net_; }

  private:
    struct Node {
        Point lo, hi;
        int left = -1, right = -1;
        int begin = 0, end = 0;  // edge index range for leaves
    };
    double box_dist(const Node& n, const Point& p) const;
    void build(int node, int begin, int end);

    EmbeddedNetwork net_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

}  // namespace mdmkit
