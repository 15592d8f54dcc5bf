#include "mdmkit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mdmkit {

namespace {

// y negated: the scene is y-up, SVG is y-down.
void put_xy(std::ostringstream& os, const Point& p) { os << p.x() << "," << -p.y(); }

}  // namespace

void SvgScene::bump(const Point& p, double pad) {
    min_x_ = std::min(min_x_, p.x() - pad);
    max_x_ = std::max(max_x_, p.x() + pad);
    min_y_ = std::min(min_y_, p.y() - pad);
    max_y_ = std::max(max_y_, p.y() + pad);
}

void SvgScene::add_network(const EmbeddedNetwork& net) {
    for (auto [i, j] : net.edges) {
        network_segments_.emplace_back(net.nodes[static_cast<size_t>(i)], net.nodes[static_cast<size_t>(j)]);
        bump(net.nodes[static_cast<size_t>(i)]);
        bump(net.nodes[static_cast<size_t>(j)]);
    }
    if (net.edges.empty())
        for (const Point& p : net.nodes) {
            m_points_.push_back(p);
            bump(p);
        }
}

void SvgScene::add_curve(const PolyCurve& curve) {
    add_network(EmbeddedNetwork::from_curve(curve));
}

void SvgScene::add_disks(const std::vector<Point>& centers, double radius) {
    for (const Point& c : centers) {
        disks_.emplace_back(c, radius);
        bump(c, radius);
    }
}

void SvgScene::add_m_points(const std::vector<Point>& points) {
    for (const Point& p : points) {
        m_points_.push_back(p);
        bump(p);
    }
}

void SvgScene::add_tube_boundary(const BoundaryPieces& pieces) {
    for (const auto& [a, b] : pieces.segments) {
        boundary_segments_.emplace_back(a, b);
        bump(a);
        bump(b);
    }
    for (const BoundaryArc& arc : pieces.arcs) {
        boundary_arcs_.push_back(arc);
        bump(arc.center, arc.radius);
    }
}

void SvgScene::add_witness(const Point& p) {
    witnesses_.push_back(p);
    bump(p);
}

std::string SvgScene::render() const {
    double min_x = min_x_, min_y = min_y_, max_x = max_x_, max_y = max_y_;
    if (min_x > max_x) {
        min_x = min_y = 0.0;
        max_x = max_y = 1.0;
    }
    const double w = std::max(max_x - min_x, 1e-9);
    const double h = std::max(max_y - min_y, 1e-9);
    const double margin = 0.05 * std::max(w, h);
    const double stroke = 0.004 * std::max(w, h);
    const double mark = 0.012 * std::max(w, h);

    std::ostringstream os;
    os.precision(12);
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << (min_x - margin) << " "
       << (-max_y - margin) << " " << (w + 2 * margin) << " " << (h + 2 * margin) << "\">\n";

    os << "<g class=\"tube-boundary\" fill=\"none\" stroke=\"#888888\" stroke-width=\""
       << stroke * 0.5 << "\">\n";
    for (const auto& [a, b] : boundary_segments_) {
        os << "<line x1=\"" << a.x() << "\" y1=\"" << -a.y() << "\" x2=\"" << b.x() << "\" y2=\""
           << -b.y() << "\"/>\n";
    }
    for (const BoundaryArc& arc : boundary_arcs_) {
        // Sampled as a short polyline; enough for a debug overlay.
        os << "<polyline fill=\"none\" points=\"";
        int steps = std::max(2, static_cast<int>(std::ceil((arc.a1 - arc.a0) / 0.1)));
        for (int s = 0; s <= steps; ++s) {
            double th = arc.a0 + (arc.a1 - arc.a0) * s / steps;
            Point p = arc.center + arc.radius * make_point(std::cos(th), std::sin(th));
            if (s) os << " ";
            put_xy(os, p);
        }
        os << "\"/>\n";
    }
    os << "</g>\n";

    os << "<g class=\"disks\" fill=\"none\" stroke=\"#4477cc\" stroke-dasharray=\"" << 2 * stroke
       << "," << 2 * stroke << "\" stroke-width=\"" << stroke * 0.5 << "\">\n";
    for (const auto& [c, radius] : disks_)
        os << "<circle cx=\"" << c.x() << "\" cy=\"" << -c.y() << "\" r=\"" << radius << "\"/>\n";
    os << "</g>\n";

    os << "<g class=\"network\" fill=\"none\" stroke=\"#202020\" stroke-width=\"" << stroke
       << "\" stroke-linecap=\"round\">\n";
    for (const auto& [a, b] : network_segments_)
        os << "<line x1=\"" << a.x() << "\" y1=\"" << -a.y() << "\" x2=\"" << b.x() << "\" y2=\""
           << -b.y() << "\"/>\n";
    os << "</g>\n";

    os << "<g class=\"m-points\" stroke=\"#cc3333\" stroke-width=\"" << stroke << "\">\n";
    for (const Point& p : m_points_) {
        os << "<line x1=\"" << p.x() - mark << "\" y1=\"" << -p.y() << "\" x2=\"" << p.x() + mark
           << "\" y2=\"" << -p.y() << "\"/>\n";
        os << "<line x1=\"" << p.x() << "\" y1=\"" << -(p.y() - mark) << "\" x2=\"" << p.x()
           << "\" y2=\"" << -(p.y() + mark) << "\"/>\n";
    }
    os << "</g>\n";

    os << "<g class=\"witnesses\" fill=\"#22aa44\" stroke=\"none\">\n";
    for (const Point& p : witnesses_)
        os << "<circle cx=\"" << p.x() << "\" cy=\"" << -p.y() << "\" r=\"" << mark << "\"/>\n";
    os << "</g>\n";

    os << "</svg>\n";
    return os.str();
}

}  // namespace mdmkit
