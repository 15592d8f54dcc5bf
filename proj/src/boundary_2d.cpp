#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "mdmkit/tube.hpp"

namespace mdmkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Distance to the union of edges and isolated nodes. Every node with no
// incident edge is part of the set and must count.
double set_distance(const EmbeddedNetwork& net, const std::vector<int>& degs, const Point& p) {
    double best = std::numeric_limits<double>::infinity();
    for (auto [i, j] : net.edges)
        best = std::min(best, dist_point_segment(p, net.nodes[static_cast<size_t>(i)],
                                                 net.nodes[static_cast<size_t>(j)])
                                  .distance);
    for (size_t i = 0; i < net.nodes.size(); ++i)
        if (degs[i] == 0) best = std::min(best, distance(p, net.nodes[i]));
    return best;
}

double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    return a;
}

}  // namespace

double BoundaryPieces::length() const {
    double s = 0.0;
    for (const auto& [a, b] : segments) s += distance(a, b);
    for (const BoundaryArc& arc : arcs) s += arc.radius * (arc.a1 - arc.a0);
    return s;
}

BoundaryPieces boundary_pieces_2d(const EmbeddedNetwork& net, double r) {
    if (net.dim() != 2) throw std::invalid_argument("boundary_pieces_2d: non-planar input");
    if (r <= 0.0) throw std::invalid_argument("boundary_pieces_2d: r must be positive");
    net.validate();
    const std::vector<int> degs = net.degrees();
    const double inside_tol = 1e-12 * std::max(1.0, r);
    BoundaryPieces out;

    // Offset segments: each edge contributes its two parallel sides, clipped
    // against every capsule. A point of a side is on the union boundary iff
    // its distance to the whole set is (still) r; cuts can only happen where
    // the side meets another offset line or a node circle, so collecting all
    // such parameters and classifying interval midpoints is exact.
    for (size_t e = 0; e < net.edges.size(); ++e) {
        auto [ia, ib] = net.edges[e];
        const Point a = net.nodes[static_cast<size_t>(ia)];
        const Point b = net.nodes[static_cast<size_t>(ib)];
        const Point d = b - a;
        const double len = norm(d);
        const Point dir = (1.0 / len) * d;
        const Point nrm = make_point(-dir.y(), dir.x());
        for (int side = -1; side <= 1; side += 2) {
            const Point p0 = a + (side * r) * nrm;
            const Point p1 = b + (side * r) * nrm;
            std::vector<double> cuts{0.0, 1.0};
            // Crossings with every other edge's offset lines.
            for (size_t f = 0; f < net.edges.size(); ++f) {
                if (f == e) continue;
                auto [ja, jb] = net.edges[f];
                const Point fa = net.nodes[static_cast<size_t>(ja)];
                const Point fb = net.nodes[static_cast<size_t>(jb)];
                const Point fd = normalized(fb - fa);
                const double den = cross2(p1 - p0, fd);
                if (std::abs(den) < 1e-14) continue;  // parallel
                for (int fside = -1; fside <= 1; fside += 2) {
                    const Point q0 = fa + (fside * r) * make_point(-fd.y(), fd.x());
                    const double t = cross2(q0 - p0, fd) / den;
                    if (t > 0.0 && t < 1.0) cuts.push_back(t);
                }
            }
            // Crossings with every node circle.
            for (const Point& v : net.nodes) {
                const Point w = p0 - v;
                const Point u = p1 - p0;
                const double A = dot(u, u);
                const double B = 2.0 * dot(w, u);
                const double C = dot(w, w) - r * r;
                double disc = B * B - 4.0 * A * C;
                if (disc < 0.0) continue;
                disc = std::sqrt(disc);
                for (double t : {(-B - disc) / (2.0 * A), (-B + disc) / (2.0 * A)})
                    if (t > 0.0 && t < 1.0) cuts.push_back(t);
            }
            std::sort(cuts.begin(), cuts.end());
            for (size_t i = 0; i + 1 < cuts.size(); ++i) {
                const double t0 = cuts[i], t1 = cuts[i + 1];
                if (t1 - t0 < 1e-15) continue;
                const Point mid = lerp(p0, p1, 0.5 * (t0 + t1));
                if (set_distance(net, degs, mid) < r - inside_tol) continue;
                out.segments.emplace_back(lerp(p0, p1, t0), lerp(p0, p1, t1));
            }
        }
    }

    // Node circles: end caps, corner fans and isolated points. Tangency
    // angles against incident edges are added analytically so the straight
    // stadium case stays exact.
    for (size_t vi = 0; vi < net.nodes.size(); ++vi) {
        const Point v = net.nodes[vi];
        std::vector<double> angles;
        for (size_t e = 0; e < net.edges.size(); ++e) {
            auto [ia, ib] = net.edges[e];
            if (static_cast<size_t>(ia) == vi || static_cast<size_t>(ib) == vi) {
                const Point other =
                    static_cast<size_t>(ia) == vi ? net.nodes[static_cast<size_t>(ib)] : net.nodes[static_cast<size_t>(ia)];
                const double phi = std::atan2(other.y() - v.y(), other.x() - v.x());
                angles.push_back(wrap_angle(phi + std::numbers::pi / 2.0));
                angles.push_back(wrap_angle(phi - std::numbers::pi / 2.0));
            }
            // Circle against the edge's offset lines.
            const Point fa = net.nodes[static_cast<size_t>(ia)];
            const Point fb = net.nodes[static_cast<size_t>(ib)];
            const Point fd = normalized(fb - fa);
            const double phi_d = std::atan2(fd.y(), fd.x());
            const double sv = cross2(fd, v - fa);  // signed distance of v to the edge line
            // A node on the edge line meets the offset lines exactly at the
            // perpendicular tangency angles added above; the asin form loses
            // half the digits there.
            if (std::abs(sv) <= 1e-9 * r) continue;
            for (int fside = -1; fside <= 1; fside += 2) {
                const double c = (fside * r - sv) / r;
                if (c < -1.0 || c > 1.0) continue;
                const double asc = std::asin(std::clamp(c, -1.0, 1.0));
                angles.push_back(wrap_angle(phi_d + asc));
                angles.push_back(wrap_angle(phi_d + std::numbers::pi - asc));
            }
        }
        for (size_t wi = 0; wi < net.nodes.size(); ++wi) {
            if (wi == vi) continue;
            const double dist_vw = distance(v, net.nodes[wi]);
            if (dist_vw >= 2.0 * r || dist_vw == 0.0) continue;
            const double base = std::atan2(net.nodes[wi].y() - v.y(), net.nodes[wi].x() - v.x());
            const double half = std::acos(std::clamp(dist_vw / (2.0 * r), -1.0, 1.0));
            angles.push_back(wrap_angle(base + half));
            angles.push_back(wrap_angle(base - half));
        }
        if (angles.empty()) {
            const Point mid = v + r * make_point(1.0, 0.0);
            if (set_distance(net, degs, mid) >= r - inside_tol)
                out.arcs.push_back(BoundaryArc{v, r, 0.0, kTwoPi});
            continue;
        }
        std::sort(angles.begin(), angles.end());
        const size_t n = angles.size();
        for (size_t i = 0; i < n; ++i) {
            const double a0 = angles[i];
            const double a1 = i + 1 < n ? angles[i + 1] : angles[0] + kTwoPi;
            if (a1 - a0 < 1e-15) continue;
            const double am = 0.5 * (a0 + a1);
            const Point mid = v + r * make_point(std::cos(am), std::sin(am));
            if (set_distance(net, degs, mid) < r - inside_tol) continue;
            out.arcs.push_back(BoundaryArc{v, r, a0, a1});
        }
    }
    return out;
}

double boundary_length_2d(const EmbeddedNetwork& net, double r) {
    return boundary_pieces_2d(net, r).length();
}

}  // namespace mdmkit
