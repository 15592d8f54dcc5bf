#pragma once

// Test-only oracles: independent routes to the quantities the library
// computes. Deliberately brute-force and slow.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "mdmkit/geometry.hpp"
#include "mdmkit/rng.hpp"

namespace oracles {

using mdmkit::EmbeddedNetwork;
using mdmkit::Point;
using mdmkit::PolyCurve;

// Distance to a segment by dense parameter sampling.
inline double brute_dist_point_segment(const Point& p, const Point& a, const Point& b, int n = 200001) {
    double best = 1e300;
    for (int i = 0; i < n; ++i) {
        double t = static_cast<double>(i) / (n - 1);
        best = std::min(best, mdmkit::distance(p, mdmkit::lerp(a, b, t)));
    }
    return best;
}

// Gift-wrapping hull; independent of the monotone-chain implementation.
inline std::vector<Point> gift_wrap_hull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Point& a, const Point& b) {
                              return a.x() == b.x() && a.y() == b.y();
                          }),
              pts.end());
    if (pts.size() <= 2) return pts;
    std::vector<Point> hull;
    size_t start = 0;
    Point current = pts[start];
    do {
        hull.push_back(current);
        Point next = pts[0];
        for (const Point& q : pts) {
            if (q.x() == current.x() && q.y() == current.y()) continue;
            if (next.x() == current.x() && next.y() == current.y()) {
                next = q;
                continue;
            }
            double turn = mdmkit::cross2(next - current, q - current);
            if (turn < 0.0 ||
                (turn == 0.0 && mdmkit::distance(current, q) > mdmkit::distance(current, next)))
                next = q;
        }
        current = next;
    } while (!(current.x() == hull.front().x() && current.y() == hull.front().y()) &&
             hull.size() <= pts.size());
    return hull;
}

// Marching-squares length of the iso-contour {dist = r} of the network
// distance field, linear interpolation on cell edges.
inline double marching_squares_boundary_length(const EmbeddedNetwork& net, double r,
                                               double cell) {
    mdmkit::Box box = mdmkit::bounding_box(net, r + 8.0 * cell);
    int nx = static_cast<int>(std::ceil((box.hi[0] - box.lo[0]) / cell));
    int ny = static_cast<int>(std::ceil((box.hi[1] - box.lo[1]) / cell));
    mdmkit::NetworkBvh bvh(net);
    std::vector<double> row0(static_cast<size_t>(nx + 1)), row1(static_cast<size_t>(nx + 1));
    auto field = [&](int ix, int iy) {
        Point p = mdmkit::make_point(box.lo[0] + ix * cell, box.lo[1] + iy * cell);
        return bvh.distance(p) - r;
    };
    for (int ix = 0; ix <= nx; ++ix) row1[static_cast<size_t>(ix)] = field(ix, 0);
    double length = 0.0;
    for (int iy = 0; iy < ny; ++iy) {
        row0.swap(row1);
        for (int ix = 0; ix <= nx; ++ix) row1[static_cast<size_t>(ix)] = field(ix, iy + 1);
        for (int ix = 0; ix < nx; ++ix) {
            double f00 = row0[static_cast<size_t>(ix)], f10 = row0[static_cast<size_t>(ix + 1)];
            double f01 = row1[static_cast<size_t>(ix)], f11 = row1[static_cast<size_t>(ix + 1)];
            // Edge crossings of the zero level.
            std::vector<std::pair<double, double>> pts;
            auto crossing = [](double fa, double fb) { return fa / (fa - fb); };
            if ((f00 < 0) != (f10 < 0)) pts.emplace_back(crossing(f00, f10), 0.0);
            if ((f01 < 0) != (f11 < 0)) pts.emplace_back(crossing(f01, f11), 1.0);
            if ((f00 < 0) != (f01 < 0)) pts.emplace_back(0.0, crossing(f00, f01));
            if ((f10 < 0) != (f11 < 0)) pts.emplace_back(1.0, crossing(f10, f11));
            if (pts.size() == 2) {
                double dx = (pts[0].first - pts[1].first) * cell;
                double dy = (pts[0].second - pts[1].second) * cell;
                length += std::sqrt(dx * dx + dy * dy);
            } else if (pts.size() == 4) {
                // Ambiguous saddle: pair by the cell-center sign.
                double fc = 0.25 * (f00 + f10 + f01 + f11);
                auto seg = [&](int a, int b) {
                    double dx = (pts[static_cast<size_t>(a)].first - pts[static_cast<size_t>(b)].first) * cell;
                    double dy = (pts[static_cast<size_t>(a)].second - pts[static_cast<size_t>(b)].second) * cell;
                    return std::sqrt(dx * dx + dy * dy);
                };
                if ((fc < 0) == (f00 < 0)) length += seg(0, 3) + seg(1, 2);
                else length += seg(0, 2) + seg(1, 3);
            }
        }
    }
    return length;
}

// Cell-center counting area of {dist <= r}.
inline double grid_area(const EmbeddedNetwork& net, double r, double cell) {
    mdmkit::Box box = mdmkit::bounding_box(net, r + 2.0 * cell);
    int nx = static_cast<int>(std::ceil((box.hi[0] - box.lo[0]) / cell));
    int ny = static_cast<int>(std::ceil((box.hi[1] - box.lo[1]) / cell));
    mdmkit::NetworkBvh bvh(net);
    long hits = 0;
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            Point p = mdmkit::make_point(box.lo[0] + (ix + 0.5) * cell, box.lo[1] + (iy + 0.5) * cell);
            if (bvh.within(p, r)) ++hits;
        }
    return static_cast<double>(hits) * cell * cell;
}

// Circle through three points via perpendicular-bisector intersection.
inline double three_point_circle_radius(const Point& a, const Point& b, const Point& c) {
    Point m1 = 0.5 * (a + b), m2 = 0.5 * (b + c);
    Point d1 = mdmkit::make_point(-(b - a).y(), (b - a).x());
    Point d2 = mdmkit::make_point(-(c - b).y(), (c - b).x());
    double den = mdmkit::cross2(d1, d2);
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    double t = mdmkit::cross2(m2 - m1, d2) / den;
    Point center = m1 + t * d1;
    return mdmkit::distance(center, a);
}

// Inscribed polygon on a circular arc (counterclockwise from angle a0 to a1).
inline PolyCurve polygonize_arc(const Point& center, double radius, double a0, double a1,
                                double h) {
    int n = std::max(2, static_cast<int>(std::ceil(radius * (a1 - a0) / h)));
    std::vector<Point> verts;
    for (int i = 0; i <= n; ++i) {
        double th = a0 + (a1 - a0) * i / n;
        verts.push_back(center + radius * mdmkit::make_point(std::cos(th), std::sin(th)));
    }
    return PolyCurve(std::move(verts));
}

// Random tree on `nodes` uniform points in the unit square; parent links
// keep it connected and acyclic. Rejects nearly collinear adjacent edges and
// nearly coincident nodes so the offset boundary stays generic.
inline EmbeddedNetwork random_tree(mdmkit::Rng& rng, int nodes) {
    for (;;) {
        EmbeddedNetwork net;
        for (int i = 0; i < nodes; ++i)
            net.nodes.push_back(mdmkit::make_point(rng.uniform(), rng.uniform()));
        for (int i = 1; i < nodes; ++i) {
            int parent = static_cast<int>(rng.bits() % static_cast<std::uint64_t>(i));
            net.edges.emplace_back(parent, i);
        }
        bool ok = true;
        for (size_t i = 0; i < net.nodes.size() && ok; ++i)
            for (size_t j = i + 1; j < net.nodes.size() && ok; ++j)
                if (mdmkit::distance(net.nodes[i], net.nodes[j]) < 0.05) ok = false;
        std::vector<std::vector<int>> adj(net.nodes.size());
        for (auto [i, j] : net.edges) {
            adj[static_cast<size_t>(i)].push_back(j);
            adj[static_cast<size_t>(j)].push_back(i);
        }
        for (size_t v = 0; v < adj.size() && ok; ++v)
            for (size_t x = 0; x < adj[v].size() && ok; ++x)
                for (size_t y = x + 1; y < adj[v].size() && ok; ++y) {
                    double ang = mdmkit::angle_at(net.nodes[v], net.nodes[static_cast<size_t>(adj[v][x])],
                                                  net.nodes[static_cast<size_t>(adj[v][y])]);
                    if (ang > std::numbers::pi - 0.1 || ang < 0.1) ok = false;
                }
        if (ok) return net;
    }
}

}  // namespace oracles
