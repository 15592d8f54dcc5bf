#include "mdmkit/steiner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "mdmkit/convex_min.hpp"
#include "mdmkit/rng.hpp"

namespace mdmkit {

namespace {
constexpr double kCollapseRel = 1e-8;   // degenerate-edge threshold vs diameter
constexpr double kSteinerTieRel = 1e-9;  // tie tolerance for non-uniqueness reports
}  // namespace

int Topology::node_count() const {
    int m = n_terminals;
    for (auto [i, j] : edges) m = std::max({m, i + 1, j + 1});
    return m;
}

std::vector<int> Topology::degrees() const {
    std::vector<int> deg(static_cast<size_t>(node_count()), 0);
    for (auto [i, j] : edges) {
        ++deg[static_cast<size_t>(i)];
        ++deg[static_cast<size_t>(j)];
    }
    return deg;
}

bool Topology::is_tree() const {
    int m = node_count();
    if (static_cast<int>(edges.size()) != m - 1) return false;
    std::vector<int> parent(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) parent[static_cast<size_t>(i)] = i;
    auto find = [&](int v) {
        while (parent[static_cast<size_t>(v)] != v)
            v = parent[static_cast<size_t>(v)] = parent[static_cast<size_t>(parent[static_cast<size_t>(v)])];
        return v;
    };
    for (auto [i, j] : edges) {
        int a = find(i), b = find(j);
        if (a == b) return false;
        parent[static_cast<size_t>(a)] = b;
    }
    return true;
}

bool Topology::is_full() const {
    if (!is_tree()) return false;
    if (n_terminals == 2) return steiner_count() == 0 && edges.size() == 1;
    if (steiner_count() != n_terminals - 2) return false;
    auto deg = degrees();
    for (int i = 0; i < n_terminals; ++i)
        if (deg[static_cast<size_t>(i)] != 1) return false;
    for (int i = n_terminals; i < node_count(); ++i)
        if (deg[static_cast<size_t>(i)] != 3) return false;
    return true;
}

bool Topology::same_structure(const Topology& other) const {
    if (n_terminals != other.n_terminals || edges.size() != other.edges.size()) return false;
    auto canon = [](const Topology& t) {
        std::vector<std::pair<int, int>> e = t.edges;
        for (auto& [i, j] : e)
            if (i > j) std::swap(i, j);
        std::sort(e.begin(), e.end());
        return e;
    };
    return canon(*this) == canon(other);
}

std::vector<Topology> enumerate_full_topologies(int n) {
    if (n < 2 || n > 8)
        throw std::invalid_argument("enumerate_full_topologies: n must be in [2, 8]");
    std::vector<Topology> current;
    {
        Topology t;
        t.n_terminals = 2;
        t.edges = {{0, 1}};
        current = {t};
    }
    // Grow terminal m-1 by splitting an existing edge with a fresh Steiner
    // node; this yields each full topology exactly once, (2n-5)!! in total.
    for (int m = 3; m <= n; ++m) {
        std::vector<Topology> next;
        auto shift = [&](int v) { return v >= m - 1 ? v + 1 : v; };
        for (const Topology& t : current) {
            for (size_t e = 0; e < t.edges.size(); ++e) {
                Topology grown;
                grown.n_terminals = m;
                int fresh = 2 * m - 3;  // last Steiner id after renumbering
                for (size_t f = 0; f < t.edges.size(); ++f) {
                    auto [i, j] = t.edges[f];
                    if (f == e) {
                        grown.edges.emplace_back(shift(i), fresh);
                        grown.edges.emplace_back(fresh, shift(j));
                    } else {
                        grown.edges.emplace_back(shift(i), shift(j));
                    }
                }
                grown.edges.emplace_back(m - 1, fresh);
                next.push_back(std::move(grown));
            }
        }
        current = std::move(next);
    }
    return current;
}

EmbeddedNetwork Realization::as_network() const {
    EmbeddedNetwork net;
    net.nodes = coords;
    net.edges = topology.edges;
    return net;
}

EmbeddedNetwork Realization::collapsed_network(double eps) const {
    size_t m = coords.size();
    std::vector<int> parent(m);
    for (size_t i = 0; i < m; ++i) parent[i] = static_cast<int>(i);
    auto find = [&](int v) {
        while (parent[static_cast<size_t>(v)] != v)
            v = parent[static_cast<size_t>(v)] = parent[static_cast<size_t>(parent[static_cast<size_t>(v)])];
        return v;
    };
    for (auto [i, j] : topology.edges)
        if (distance(coords[static_cast<size_t>(i)], coords[static_cast<size_t>(j)]) < eps) {
            int a = find(i), b = find(j);
            if (a != b) parent[static_cast<size_t>(a)] = b;
        }
    std::map<int, int> remap;
    EmbeddedNetwork net;
    for (size_t i = 0; i < m; ++i) {
        int root = find(static_cast<int>(i));
        if (!remap.count(root)) {
            remap[root] = static_cast<int>(net.nodes.size());
            net.nodes.push_back(coords[static_cast<size_t>(root)]);
        }
    }
    for (auto [i, j] : topology.edges) {
        int a = remap[find(i)], b = remap[find(j)];
        if (a != b) {
            bool dup = false;
            for (auto [u, v] : net.edges)
                if ((u == a && v == b) || (u == b && v == a)) dup = true;
            if (!dup) net.edges.emplace_back(a, b);
        }
    }
    return net;
}

Realization realize_convex(const Topology& topology, const std::vector<TerminalSpec>& terminals,
                           const RealizeOptions& options) {
    if (static_cast<int>(terminals.size()) != topology.n_terminals)
        throw std::invalid_argument("realize_convex: terminal count mismatch");
    if (!topology.is_tree()) throw std::invalid_argument("realize_convex: topology is not a tree");
    int m = topology.node_count();
    std::vector<Point> anchor_pts;
    convexmin::Problem problem;
    problem.edges = topology.edges;
    problem.constraints.resize(static_cast<size_t>(m));
    for (int i = 0; i < topology.n_terminals; ++i) {
        if (const Point* p = std::get_if<Point>(&terminals[static_cast<size_t>(i)])) {
            problem.constraints[static_cast<size_t>(i)] = {convexmin::Kind::Fixed, *p, 0.0};
            anchor_pts.push_back(*p);
        } else {
            const auto& disk = std::get<DiskConstraint>(terminals[static_cast<size_t>(i)]);
            if (disk.radius <= 0.0)
                throw std::invalid_argument("realize_convex: disk radius must be positive");
            problem.constraints[static_cast<size_t>(i)] = {convexmin::Kind::Disk, disk.center,
                                                           disk.radius};
            anchor_pts.push_back(disk.center);
        }
    }
    Point centroid{{0, 0, 0}, anchor_pts.front().dim};
    for (const Point& p : anchor_pts) centroid = centroid + p;
    centroid = (1.0 / static_cast<double>(anchor_pts.size())) * centroid;
    double diam = std::max(diameter_estimate(anchor_pts), 1e-9);

    problem.init.resize(static_cast<size_t>(m), centroid);
    for (int i = 0; i < topology.n_terminals; ++i)
        problem.init[static_cast<size_t>(i)] = anchor_pts[static_cast<size_t>(i)];
    Rng rng(options.init_seed == 0 ? 0x6d646d6bULL : options.init_seed);
    for (int i = topology.n_terminals; i < m; ++i) {
        Point jitter{{0, 0, 0}, centroid.dim};
        for (int k = 0; k < centroid.dim; ++k)
            jitter[k] = (options.init_seed == 0 ? 1e-3 : 0.45) * diam * (2.0 * rng.uniform() - 1.0);
        problem.init[static_cast<size_t>(i)] = centroid + jitter;
    }
    if (options.init_seed != 0) {
        for (int i = 0; i < topology.n_terminals; ++i) {
            if (std::holds_alternative<DiskConstraint>(terminals[static_cast<size_t>(i)])) {
                const auto& disk = std::get<DiskConstraint>(terminals[static_cast<size_t>(i)]);
                Point jitter{{0, 0, 0}, centroid.dim};
                for (int k = 0; k < centroid.dim; ++k)
                    jitter[k] = 0.9 * disk.radius * (2.0 * rng.uniform() - 1.0);
                problem.init[static_cast<size_t>(i)] = disk.center + jitter;
            }
        }
    }

    convexmin::Result result = convexmin::minimize_length(problem);
    Realization realization;
    realization.topology = topology;
    realization.coords = std::move(result.coords);
    realization.total_length = result.length;
    realization.converged = result.converged;
    realization.terminal_constraints = terminals;
    return realization;
}

// ---- Melzak construction ------------------------------------------------
//
// Repeatedly merge a Steiner node adjacent to two position-carrying nodes
// into the equilateral apex of that pair (both apex choices branch), down to
// a single edge. Unwinding places each merged node at the second
// intersection of the apex-to-attachment segment with the circumcircle of
// (a, b, apex); the point must land on the arc away from the apex, which is
// the admissible-arc test. Proposition-level uniqueness means at most one
// branch survives.

namespace {

struct MelzakState {
    std::vector<Point> pos;      // per node id; valid when known
    std::vector<char> known;
    std::vector<std::pair<int, int>> edges;
};

Point equilateral_apex(const Point& a, const Point& b, bool side) {
    const double c = 0.5;
    const double s = side ? std::numbers::sqrt3 / 2.0 : -std::numbers::sqrt3 / 2.0;
    Point v = b - a;
    return a + make_point(c * v.x() - s * v.y(), s * v.x() + c * v.y());
}

bool melzak_recurse(MelzakState state, double scale, std::vector<Point>& out_pos,
                    std::vector<char>& out_known) {
    // Remaining unknown nodes with incident edges?
    std::vector<int> deg(state.pos.size(), 0);
    for (auto [i, j] : state.edges) {
        ++deg[static_cast<size_t>(i)];
        ++deg[static_cast<size_t>(j)];
    }
    bool any_unknown = false;
    for (size_t i = 0; i < state.pos.size(); ++i)
        if (!state.known[i] && deg[i] > 0) any_unknown = true;

    if (!any_unknown) {
        if (state.edges.size() != 1) return false;
        auto [i, j] = state.edges[0];
        if (distance(state.pos[static_cast<size_t>(i)], state.pos[static_cast<size_t>(j)]) < 1e-12 * scale) return false;
        out_pos = state.pos;
        out_known = state.known;
        return true;
    }

    // Cherry: lowest-id unknown Steiner node with two known neighbours.
    int s = -1, na = -1, nb = -1;
    for (size_t i = 0; i < state.pos.size() && s < 0; ++i) {
        if (state.known[i] || deg[i] != 3) continue;
        std::vector<int> known_nb;
        for (auto [u, v] : state.edges) {
            if (u == static_cast<int>(i) && state.known[static_cast<size_t>(v)]) known_nb.push_back(v);
            if (v == static_cast<int>(i) && state.known[static_cast<size_t>(u)]) known_nb.push_back(u);
        }
        if (known_nb.size() >= 2) {
            s = static_cast<int>(i);
            na = known_nb[0];
            nb = known_nb[1];
        }
    }
    if (s < 0) return false;
    int nc = -1;
    for (auto [u, v] : state.edges) {
        if (u == s && v != na && v != nb) nc = v;
        if (v == s && u != na && u != nb) nc = u;
    }
    if (nc < 0) return false;

    const Point pa = state.pos[static_cast<size_t>(na)];
    const Point pb = state.pos[static_cast<size_t>(nb)];
    if (distance(pa, pb) < 1e-12 * scale) return false;

    bool found = false;
    std::vector<Point> best_pos;
    std::vector<char> best_known;
    double best_len = std::numeric_limits<double>::infinity();
    for (bool side : {false, true}) {
        const Point apex = equilateral_apex(pa, pb, side);
        MelzakState reduced;
        reduced.pos = state.pos;
        reduced.known = state.known;
        int pseudo = static_cast<int>(reduced.pos.size());
        reduced.pos.push_back(apex);
        reduced.known.push_back(1);
        for (auto [u, v] : state.edges) {
            if (u == s || v == s) continue;
            reduced.edges.emplace_back(u, v);
        }
        reduced.edges.emplace_back(pseudo, nc);

        std::vector<Point> sub_pos;
        std::vector<char> sub_known;
        if (!melzak_recurse(std::move(reduced), scale, sub_pos, sub_known)) continue;

        const Point z = sub_pos[static_cast<size_t>(nc)];
        // Second circle intersection along [apex, z]; the first is the apex.
        const Point center = (1.0 / 3.0) * (pa + pb + apex);
        Point dz = z - apex;
        double dz2 = dot(dz, dz);
        if (dz2 < 1e-24 * scale * scale) continue;
        double t = 2.0 * dot(center - apex, dz) / dz2;
        if (t <= 1e-12 || t >= 1.0 - 1e-12) continue;
        const Point sp = apex + t * dz;
        // Admissible arc: opposite side of (a, b) from the apex, clear of
        // the endpoints.
        double side_apex = cross2(pb - pa, apex - pa);
        double side_s = cross2(pb - pa, sp - pa);
        if (side_apex * side_s >= 0.0) continue;
        if (distance(sp, pa) < 1e-10 * scale || distance(sp, pb) < 1e-10 * scale) continue;

        sub_pos[static_cast<size_t>(s)] = sp;
        sub_known[static_cast<size_t>(s)] = 1;
        double len = 0.0;
        for (auto [u, v] : state.edges) {
            if (u == s || v == s) continue;
            len += distance(sub_pos[static_cast<size_t>(u)], sub_pos[static_cast<size_t>(v)]);
        }
        len += distance(sp, pa) + distance(sp, pb) + distance(sp, z);
        if (!found || len < best_len) {
            found = true;
            best_len = len;
            best_pos = std::move(sub_pos);
            best_known = std::move(sub_known);
        }
    }
    if (!found) return false;
    out_pos = std::move(best_pos);
    out_known = std::move(best_known);
    return true;
}

}  // namespace

std::optional<Realization> melzak_realize_2d(const Topology& topology,
                                             const std::vector<Point>& terminals) {
    if (static_cast<int>(terminals.size()) != topology.n_terminals)
        throw std::invalid_argument("melzak_realize_2d: terminal count mismatch");
    for (const Point& p : terminals)
        if (p.dim != 2) throw std::invalid_argument("melzak_realize_2d: requires d = 2");
    if (!topology.is_full()) throw std::invalid_argument("melzak_realize_2d: topology is not full");

    double scale = std::max(diameter_estimate(terminals), 1e-12);
    int m = topology.node_count();
    MelzakState state;
    state.pos.resize(static_cast<size_t>(m));
    state.known.assign(static_cast<size_t>(m), 0);
    for (int i = 0; i < topology.n_terminals; ++i) {
        state.pos[static_cast<size_t>(i)] = terminals[static_cast<size_t>(i)];
        state.known[static_cast<size_t>(i)] = 1;
    }
    state.edges = topology.edges;

    std::vector<Point> pos;
    std::vector<char> known;
    if (!melzak_recurse(std::move(state), scale, pos, known)) return std::nullopt;

    Realization realization;
    realization.topology = topology;
    realization.coords.assign(pos.begin(), pos.begin() + m);
    double len = 0.0;
    for (auto [i, j] : topology.edges)
        len += distance(realization.coords[static_cast<size_t>(i)], realization.coords[static_cast<size_t>(j)]);
    realization.total_length = len;
    realization.converged = true;
    realization.terminal_constraints.assign(terminals.begin(), terminals.end());
    return realization;
}

namespace {

bool realizations_geometrically_equal(const Realization& a, const Realization& b, double tol) {
    EmbeddedNetwork na = a.collapsed_network(tol);
    EmbeddedNetwork nb = b.collapsed_network(tol);
    if (na.edges.size() != nb.edges.size()) return false;
    std::vector<char> used(nb.edges.size(), 0);
    for (auto [i, j] : na.edges) {
        const Point& p = na.nodes[static_cast<size_t>(i)];
        const Point& q = na.nodes[static_cast<size_t>(j)];
        bool matched = false;
        for (size_t f = 0; f < nb.edges.size() && !matched; ++f) {
            if (used[f]) continue;
            const Point& u = nb.nodes[static_cast<size_t>(nb.edges[f].first)];
            const Point& v = nb.nodes[static_cast<size_t>(nb.edges[f].second)];
            if ((distance(p, u) <= tol && distance(q, v) <= tol) ||
                (distance(p, v) <= tol && distance(q, u) <= tol)) {
                used[f] = 1;
                matched = true;
            }
        }
        if (!matched) return false;
    }
    return true;
}

}  // namespace

std::vector<Realization> steiner_tree(const std::vector<Point>& points) {
    const int n = static_cast<int>(points.size());
    if (n < 2 || n > 8) throw std::invalid_argument("steiner_tree: n must be in [2, 8]");
    const double diam = std::max(diameter_estimate(points), 1e-12);
    std::vector<TerminalSpec> fixed(points.begin(), points.end());

    std::vector<Realization> candidates;
    for (const Topology& topology : enumerate_full_topologies(n)) {
        std::optional<Realization> realization;
        if (points.front().dim == 2 && n >= 3) realization = melzak_realize_2d(topology, points);
        if (!realization) realization = realize_convex(topology, fixed);
        candidates.push_back(std::move(*realization));
    }
    double best = std::numeric_limits<double>::infinity();
    for (const Realization& r : candidates) best = std::min(best, r.total_length);

    std::vector<Realization> ties;
    for (Realization& r : candidates) {
        if (r.total_length > best * (1.0 + kSteinerTieRel) + 1e-300) continue;
        bool dup = false;
        for (const Realization& kept : ties)
            if (realizations_geometrically_equal(r, kept, 1e-6 * diam)) dup = true;
        if (!dup) ties.push_back(std::move(r));
    }
    std::sort(ties.begin(), ties.end(),
              [](const Realization& a, const Realization& b) { return a.total_length < b.total_length; });
    return ties;
}

std::vector<AngleViolation> validate_locally_minimal(const Realization& realization, double tol) {
    std::vector<AngleViolation> out;
    const double diam = std::max(diameter_estimate(realization.coords), 1e-12);
    EmbeddedNetwork net = realization.collapsed_network(kCollapseRel * diam);
    std::vector<std::vector<int>> adj(net.nodes.size());
    for (auto [i, j] : net.edges) {
        adj[static_cast<size_t>(i)].push_back(j);
        adj[static_cast<size_t>(j)].push_back(i);
    }
    const double target = 2.0 * std::numbers::pi / 3.0;
    for (size_t v = 0; v < net.nodes.size(); ++v) {
        const auto& nbr = adj[v];
        if (nbr.size() > 3) {
            out.push_back(AngleViolation{"degree", static_cast<int>(v), static_cast<double>(nbr.size()),
                                         "degree " + std::to_string(nbr.size()) + " exceeds 3"});
            continue;
        }
        if (nbr.size() == 3) {
            for (size_t a = 0; a < 3; ++a)
                for (size_t b = a + 1; b < 3; ++b) {
                    double ang = angle_at(net.nodes[v], net.nodes[static_cast<size_t>(nbr[a])],
                                          net.nodes[static_cast<size_t>(nbr[b])]);
                    if (std::abs(ang - target) > tol)
                        out.push_back(AngleViolation{"branch-angle", static_cast<int>(v), ang,
                                                     "branch angle deviates from 2*pi/3"});
                }
        } else if (nbr.size() == 2) {
            double ang = angle_at(net.nodes[v], net.nodes[static_cast<size_t>(nbr[0])],
                                  net.nodes[static_cast<size_t>(nbr[1])]);
            if (ang < target - tol)
                out.push_back(AngleViolation{"path-angle", static_cast<int>(v), ang,
                                             "degree-2 angle below 2*pi/3"});
        }
    }
    return out;
}

double length_interpolation(const Realization& s0, const Realization& s1, double alpha) {
    if (!s0.topology.same_structure(s1.topology))
        throw std::invalid_argument("length_interpolation: topology mismatch");
    if (s0.coords.size() != s1.coords.size())
        throw std::invalid_argument("length_interpolation: coordinate count mismatch");
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("length_interpolation: alpha outside [0, 1]");
    double len = 0.0;
    for (auto [i, j] : s0.topology.edges) {
        Point a = alpha * s0.coords[static_cast<size_t>(i)] + (1.0 - alpha) * s1.coords[static_cast<size_t>(i)];
        Point b = alpha * s0.coords[static_cast<size_t>(j)] + (1.0 - alpha) * s1.coords[static_cast<size_t>(j)];
        a.dim = s0.coords.front().dim;
        b.dim = a.dim;
        len += distance(a, b);
    }
    return len;
}

}  // namespace mdmkit
