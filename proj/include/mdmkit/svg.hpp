#pragma once

#include <string>
#include <vector>

#include "mdmkit/geometry.hpp"
#include "mdmkit/tube.hpp"

namespace mdmkit {

// Collects 2D entities and renders an SVG with a y-up, auto-fitted viewBox.
// One <g> element per entity class.
class SvgScene {
  public:
    void add_network(const EmbeddedNetwork& net);
    void add_curve(const PolyCurve& curve);
    void add_disks(const std::vector<Point>& centers, double radius);
    void add_m_points(const std::vector<Point>& points);
    void add_tube_boundary(const BoundaryPieces& pieces);
    void add_witness(const Point& p);

    std::string render() const;

  private:
    void bump(const Point& p, double pad = 0.0);

    std::vector<std::pair<Point, Point>> network_segments_;
    std::vector<std::pair<Point, double>> disks_;
    std::vector<Point> m_points_;
    std::vector<std::pair<Point, Point>> boundary_segments_;
    std::vector<BoundaryArc> boundary_arcs_;
    std::vector<Point> witnesses_;
    double min_x_ = 1e300, min_y_ = 1e300, max_x_ = -1e300, max_y_ = -1e300;
};

}  // namespace mdmkit
