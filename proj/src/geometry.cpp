#include "mdmkit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mdmkit {

double norm(const Point& a) { return std::sqrt(dot(a, a)); }

double distance(const Point& a, const Point& b) { return norm(a - b); }

Point cross3(const Point& a, const Point& b) {
    return Point{{a.c[1] * b.c[2] - a.c[2] * b.c[1], a.c[2] * b.c[0] - a.c[0] * b.c[2],
                  a.c[0] * b.c[1] - a.c[1] * b.c[0]},
                 3};
}

Point normalized(const Point& a) {
    double n = norm(a);
    if (n == 0.0) throw std::invalid_argument("normalized: zero vector");
    return (1.0 / n) * a;
}

bool finite(const Point& a) {
    return std::isfinite(a.c[0]) && std::isfinite(a.c[1]) && std::isfinite(a.c[2]);
}

double angle_at(const Point& v, const Point& a, const Point& b) {
    Point u = a - v;
    Point w = b - v;
    double nu = norm(u), nw = norm(w);
    if (nu == 0.0 || nw == 0.0) throw std::invalid_argument("angle_at: coincident points");
    double c = dot(u, w) / (nu * nw);
    c = std::clamp(c, -1.0, 1.0);
    return std::acos(c);
}

PolyCurve::PolyCurve(std::vector<Point> vertices) : verts_(std::move(vertices)) {
    if (verts_.size() < 2) throw std::invalid_argument("PolyCurve: needs at least 2 vertices");
    int d = verts_.front().dim;
    cum_.resize(verts_.size());
    cum_[0] = 0.0;
    for (size_t i = 0; i + 1 < verts_.size(); ++i) {
        if (verts_[i].dim != d || !finite(verts_[i]))
            throw std::invalid_argument("PolyCurve: inconsistent or non-finite vertex");
        double len = distance(verts_[i], verts_[i + 1]);
        if (len == 0.0) throw std::invalid_argument("PolyCurve: consecutive vertices coincide");
        cum_[i + 1] = cum_[i] + len;
    }
}

Point PolyCurve::point_at(double s) const {
    if (s <= 0.0) return verts_.front();
    if (s >= length()) return verts_.back();
    auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
    size_t i = static_cast<size_t>(it - cum_.begin()) - 1;
    if (i + 1 >= verts_.size()) return verts_.back();
    double t = (s - cum_[i]) / (cum_[i + 1] - cum_[i]);
    return lerp(verts_[i], verts_[i + 1], t);
}

double PolyCurve::max_edge_length() const {
    double m = 0.0;
    for (size_t i = 0; i + 1 < cum_.size(); ++i) m = std::max(m, cum_[i + 1] - cum_[i]);
    return m;
}

namespace {

double segment_segment_distance(const Point& a0, const Point& a1, const Point& b0,
                                const Point& b1) {
    // Sampled lower envelope of point-segment distances; exact for the use
    // here (separation screening), refined by endpoint projections.
    double best = std::numeric_limits<double>::infinity();
    auto upd = [&](const Point& p, const Point& a, const Point& b) {
        best = std::min(best, dist_point_segment(p, a, b).distance);
    };
    upd(a0, b0, b1);
    upd(a1, b0, b1);
    upd(b0, a0, a1);
    upd(b1, a0, a1);
    // Interior-interior minimum for skew segments: solve the 2x2 system.
    Point u = a1 - a0, v = b1 - b0, w = a0 - b0;
    double A = dot(u, u), B = dot(u, v), C = dot(v, v), D = dot(u, w), E = dot(v, w);
    double den = A * C - B * B;
    if (den > 1e-14 * A * C) {
        double s = (B * E - C * D) / den;
        double t = (A * E - B * D) / den;
        if (s > 0 && s < 1 && t > 0 && t < 1)
            best = std::min(best, distance(a0 + s * u, b0 + t * v));
    }
    return best;
}

}  // namespace

double PolyCurve::min_self_separation() const {
    double best = std::numeric_limits<double>::infinity();
    size_t n = segment_count();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1 && is_closed()) continue;
            best = std::min(best, segment_segment_distance(verts_[i], verts_[i + 1], verts_[j],
                                                           verts_[j + 1]));
        }
    return best;
}

bool PolyCurve::is_closed(double tol) const {
    return distance(verts_.front(), verts_.back()) <= tol;
}

double EmbeddedNetwork::total_length() const {
    double s = 0.0;
    for (auto [i, j] : edges) s += distance(nodes[static_cast<size_t>(i)], nodes[static_cast<size_t>(j)]);
    return s;
}

void EmbeddedNetwork::validate() const {
    if (nodes.empty()) throw std::invalid_argument("EmbeddedNetwork: empty node set");
    int n = static_cast<int>(nodes.size());
    for (auto [i, j] : edges) {
        if (i < 0 || i >= n || j < 0 || j >= n)
            throw std::invalid_argument("EmbeddedNetwork: edge index out of range");
        if (distance(nodes[static_cast<size_t>(i)], nodes[static_cast<size_t>(j)]) == 0.0)
            throw std::invalid_argument("EmbeddedNetwork: zero-length edge");
    }
    for (const Point& p : nodes)
        if (!finite(p)) throw std::invalid_argument("EmbeddedNetwork: non-finite node");
    if (tree_flag && (!is_connected() || has_cycle()))
        throw std::invalid_argument("EmbeddedNetwork: tree flag set but graph is not a tree");
}

bool EmbeddedNetwork::is_connected() const {
    if (nodes.empty()) return false;
    std::vector<std::vector<int>> adj(nodes.size());
    for (auto [i, j] : edges) {
        adj[static_cast<size_t>(i)].push_back(j);
        adj[static_cast<size_t>(j)].push_back(i);
    }
    std::vector<char> seen(nodes.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : adj[static_cast<size_t>(v)])
            if (!seen[static_cast<size_t>(w)]) {
                seen[static_cast<size_t>(w)] = 1;
                stack.push_back(w);
            }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

bool EmbeddedNetwork::has_cycle() const {
    // For a connected graph: cycle iff |E| >= |V|. For general graphs run a
    // union-find and look for an edge joining an already-connected pair.
    std::vector<int> parent(nodes.size());
    for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    auto find = [&](int v) {
        while (parent[static_cast<size_t>(v)] != v) {
            parent[static_cast<size_t>(v)] = parent[static_cast<size_t>(parent[static_cast<size_t>(v)])];
            v = parent[static_cast<size_t>(v)];
        }
        return v;
    };
    for (auto [i, j] : edges) {
        int a = find(i), b = find(j);
        if (a == b) return true;
        parent[static_cast<size_t>(a)] = b;
    }
    return false;
}

std::vector<int> EmbeddedNetwork::degrees() const {
    std::vector<int> deg(nodes.size(), 0);
    for (auto [i, j] : edges) {
        ++deg[static_cast<size_t>(i)];
        ++deg[static_cast<size_t>(j)];
    }
    return deg;
}

EmbeddedNetwork EmbeddedNetwork::from_curve(const PolyCurve& curve) {
    EmbeddedNetwork net;
    net.nodes = curve.vertices();
    for (size_t i = 0; i + 1 < net.nodes.size(); ++i)
        net.edges.emplace_back(static_cast<int>(i), static_cast<int>(i + 1));
    return net;
}

EmbeddedNetwork EmbeddedNetwork::single_point(const Point& p) {
    EmbeddedNetwork net;
    net.nodes.push_back(p);
    return net;
}

Box bounding_box(const std::vector<Point>& pts, double margin) {
    if (pts.empty()) throw std::invalid_argument("bounding_box: empty point set");
    Point lo = pts.front(), hi = pts.front();
    for (const Point& p : pts)
        for (int k = 0; k < 3; ++k) {
            lo.c[static_cast<size_t>(k)] = std::min(lo.c[static_cast<size_t>(k)], p.c[static_cast<size_t>(k)]);
            hi.c[static_cast<size_t>(k)] = std::max(hi.c[static_cast<size_t>(k)], p.c[static_cast<size_t>(k)]);
        }
    int d = pts.front().dim;
    for (int k = 0; k < d; ++k) {
        lo.c[static_cast<size_t>(k)] -= margin;
        hi.c[static_cast<size_t>(k)] += margin;
    }
    lo.dim = hi.dim = d;
    return Box{lo, hi};
}

Box bounding_box(const EmbeddedNetwork& net, double margin) {
    return bounding_box(net.nodes, margin);
}

double box_volume(const Box& box, int d) {
    double v = 1.0;
    for (int k = 0; k < d; ++k) v *= box.hi[k] - box.lo[k];
    return v;
}

double diameter_estimate(const std::vector<Point>& pts) {
    Box b = bounding_box(pts, 0.0);
    return distance(b.lo, b.hi);
}

SegmentFoot dist_point_segment(const Point& p, const Point& a, const Point& b) {
    Point ab = b - a;
    double len2 = dot(ab, ab);
    if (len2 == 0.0) throw std::invalid_argument("degenerate segment");
    double t = dot(p - a, ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return SegmentFoot{distance(p, a + t * ab), t};
}

NetworkDistance dist_to_network(const Point& p, const EmbeddedNetwork& net, double tie_tol) {
    if (net.nodes.empty()) throw std::invalid_argument("dist_to_network: empty network");
    NetworkDistance out;
    out.distance = std::numeric_limits<double>::infinity();
    std::vector<NetworkFoot> feet;
    if (net.edges.empty()) {
        // Degenerate point network: distance to the node set.
        for (size_t i = 0; i < net.nodes.size(); ++i) {
            double d = distance(p, net.nodes[i]);
            feet.push_back(NetworkFoot{static_cast<int>(i), 0.0, d, net.nodes[i]});
            out.distance = std::min(out.distance, d);
        }
    } else {
        feet.reserve(net.edges.size());
        for (size_t e = 0; e < net.edges.size(); ++e) {
            auto [i, j] = net.edges[e];
            SegmentFoot f = dist_point_segment(p, net.nodes[static_cast<size_t>(i)], net.nodes[static_cast<size_t>(j)]);
            Point foot = lerp(net.nodes[static_cast<size_t>(i)], net.nodes[static_cast<size_t>(j)], f.param);
            feet.push_back(NetworkFoot{static_cast<int>(e), f.param, f.distance, foot});
            out.distance = std::min(out.distance, f.distance);
        }
    }
    for (const NetworkFoot& f : feet) {
        if (f.distance > out.distance + tie_tol) continue;
        bool duplicate = false;
        for (const NetworkFoot& g : out.nearest)
            if (distance(f.point, g.point) <= tie_tol) {
                duplicate = true;
                break;
            }
        if (!duplicate) out.nearest.push_back(f);
    }
    return out;
}

std::vector<Point> convex_hull_2d(std::vector<Point> points) {
    if (points.empty()) throw std::invalid_argument("convex_hull_2d: empty input");
    for (const Point& p : points)
        if (p.dim != 2) throw std::invalid_argument("convex_hull_2d: requires d = 2");
    std::sort(points.begin(), points.end(), [](const Point& a, const Point& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    points.erase(std::unique(points.begin(), points.end(),
                             [](const Point& a, const Point& b) {
                                 return a.x() == b.x() && a.y() == b.y();
                             }),
                 points.end());
    size_t n = points.size();
    if (n == 1) return points;
    std::vector<Point> hull(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) {  // lower chain
        while (k >= 2 && cross2(hull[k - 1] - hull[k - 2], points[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = points[i];
    }
    for (size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper chain
        while (k >= t && cross2(hull[k - 1] - hull[k - 2], points[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = points[i];
    }
    hull.resize(k - 1);
    if (hull.empty()) hull.push_back(points.front());
    return hull;
}

double polygon_perimeter(const std::vector<Point>& poly) {
    if (poly.size() < 2) return 0.0;
    double s = 0.0;
    for (size_t i = 0; i < poly.size(); ++i) s += distance(poly[i], poly[(i + 1) % poly.size()]);
    return s;
}

double polygon_area(const std::vector<Point>& poly) {
    double a = 0.0;
    for (size_t i = 0; i < poly.size(); ++i) {
        const Point& p = poly[i];
        const Point& q = poly[(i + 1) % poly.size()];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return std::abs(a) / 2.0;
}

PolyCurve resample(const PolyCurve& curve, double h) {
    if (h <= 0.0) throw std::invalid_argument("resample: h must be positive");
    std::vector<Point> out;
    const auto& v = curve.vertices();
    for (size_t i = 0; i + 1 < v.size(); ++i) {
        double len = distance(v[i], v[i + 1]);
        int m = std::max(1, static_cast<int>(std::ceil(len / h - 1e-12)));
        for (int k = 0; k < m; ++k) out.push_back(lerp(v[i], v[i + 1], static_cast<double>(k) / m));
    }
    out.push_back(v.back());
    return PolyCurve(std::move(out));
}

NetworkBvh::NetworkBvh(const EmbeddedNetwork& net) : net_(net) {
    if (net_.nodes.empty()) throw std::invalid_argument("NetworkBvh: empty network");
    int n_edges = static_cast<int>(net_.edges.size());
    if (n_edges == 0) {
        // Point-only network: model each node as a degenerate leaf range.
        nodes_.push_back(Node{net_.nodes.front(), net_.nodes.front(), -1, -1, 0, 0});
        Point lo = net_.nodes.front(), hi = lo;
        for (const Point& p : net_.nodes)
            for (int k = 0; k < 3; ++k) {
                lo.c[static_cast<size_t>(k)] = std::min(lo.c[static_cast<size_t>(k)], p.c[static_cast<size_t>(k)]);
                hi.c[static_cast<size_t>(k)] = std::max(hi.c[static_cast<size_t>(k)], p.c[static_cast<size_t>(k)]);
            }
        nodes_[0].lo = lo;
        nodes_[0].hi = hi;
        root_ = 0;
        return;
    }
    nodes_.reserve(static_cast<size_t>(2 * n_edges));
    nodes_.push_back(Node{});
    root_ = 0;
    build(0, 0, n_edges);
}

void NetworkBvh::build(int node, int begin, int end) {
    Point lo = net_.nodes[static_cast<size_t>(net_.edges[static_cast<size_t>(begin)].first)];
    Point hi = lo;
    for (int e = begin; e < end; ++e) {
        for (int which = 0; which < 2; ++which) {
            int idx = which == 0 ? net_.edges[static_cast<size_t>(e)].first : net_.edges[static_cast<size_t>(e)].second;
            const Point& p = net_.nodes[static_cast<size_t>(idx)];
            for (int k = 0; k < 3; ++k) {
                lo.c[static_cast<size_t>(k)] = std::min(lo.c[static_cast<size_t>(k)], p.c[static_cast<size_t>(k)]);
                hi.c[static_cast<size_t>(k)] = std::max(hi.c[static_cast<size_t>(k)], p.c[static_cast<size_t>(k)]);
            }
        }
    }
    nodes_[static_cast<size_t>(node)].lo = lo;
    nodes_[static_cast<size_t>(node)].hi = hi;
    nodes_[static_cast<size_t>(node)].begin = begin;
    nodes_[static_cast<size_t>(node)].end = end;
    if (end - begin <= 4) return;  // leaf
    int mid = begin + (end - begin) / 2;
    int left = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{});
    int right = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{});
    nodes_[static_cast<size_t>(node)].left = left;
    nodes_[static_cast<size_t>(node)].right = right;
    build(left, begin, mid);
    build(right, mid, end);
}

double NetworkBvh::box_dist(const Node& n, const Point& p) const {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) {
        double v = p.c[static_cast<size_t>(k)];
        double d = 0.0;
        if (v < n.lo.c[static_cast<size_t>(k)]) d = n.lo.c[static_cast<size_t>(k)] - v;
        else if (v > n.hi.c[static_cast<size_t>(k)]) d = v - n.hi.c[static_cast<size_t>(k)];
        s += d * d;
    }
    return std::sqrt(s);
}

NetworkFoot NetworkBvh::nearest(const Point& p) const {
    return nearest_excluding(p, 0, 0);
}

NetworkFoot NetworkBvh::nearest_excluding(const Point& p, int skip_begin, int skip_end) const {
    NetworkFoot best;
    best.distance = std::numeric_limits<double>::infinity();
    if (net_.edges.empty()) {
        for (size_t i = 0; i < net_.nodes.size(); ++i) {
            double d = mdmkit::distance(p, net_.nodes[i]);
            if (d < best.distance) best = NetworkFoot{static_cast<int>(i), 0.0, d, net_.nodes[i]};
        }
        return best;
    }
    std::vector<int> stack{root_};
    while (!stack.empty()) {
        int ni = stack.back();
        stack.pop_back();
        const Node& n = nodes_[static_cast<size_t>(ni)];
        if (skip_begin < skip_end && n.begin >= skip_begin && n.end <= skip_end) continue;
        if (box_dist(n, p) >= best.distance) continue;
        if (n.left < 0) {
            for (int e = n.begin; e < n.end; ++e) {
                if (e >= skip_begin && e < skip_end) continue;
                auto [i, j] = net_.edges[static_cast<size_t>(e)];
                SegmentFoot f = dist_point_segment(p, net_.nodes[static_cast<size_t>(i)], net_.nodes[static_cast<size_t>(j)]);
                if (f.distance < best.distance) {
                    best.edge = e;
                    best.param = f.param;
                    best.distance = f.distance;
                    best.point = lerp(net_.nodes[static_cast<size_t>(i)], net_.nodes[static_cast<size_t>(j)], f.param);
                }
            }
        } else {
            double dl = box_dist(nodes_[static_cast<size_t>(n.left)], p);
            double dr = box_dist(nodes_[static_cast<size_t>(n.right)], p);
            if (dl < dr) {
                stack.push_back(n.right);
                stack.push_back(n.left);
            } else {
                stack.push_back(n.left);
                stack.push_back(n.right);
            }
        }
    }
    return best;
}

double NetworkBvh::distance(const Point& p) const { return nearest(p).distance; }

bool NetworkBvh::within(const Point& p, double radius) const {
    if (net_.edges.empty()) {
        for (const Point& q : net_.nodes)
            if (mdmkit::distance(p, q) <= radius) return true;
        return false;
    }
    std::vector<int> stack{root_};
    while (!stack.empty()) {
        int ni = stack.back();
        stack.pop_back();
        const Node& n = nodes_[static_cast<size_t>(ni)];
        if (box_dist(n, p) > radius) continue;
        if (n.left < 0) {
            for (int e = n.begin; e < n.end; ++e) {
                auto [i, j] = net_.edges[static_cast<size_t>(e)];
                if (dist_point_segment(p, net_.nodes[static_cast<size_t>(i)], net_.nodes[static_cast<size_t>(j)]).distance <= radius)
                    return true;
            }
        } else {
            stack.push_back(n.left);
            stack.push_back(n.right);
        }
    }
    return false;
}

}  // namespace mdmkit
