#include "mdmkit/mdm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mdmkit/convex_min.hpp"
#include "mdmkit/tube.hpp"

namespace mdmkit {

namespace {
constexpr double kEnergeticBand = 1e-6;  // relative band for property (b)
}

void Instance::validate() const {
    if (r <= 0.0) throw std::invalid_argument("Instance: r must be positive");
    if (points.empty() && polygon.empty())
        throw std::invalid_argument("Instance: M must be non-empty");
    if (dim != 2 && dim != 3) throw std::invalid_argument("Instance: dim must be 2 or 3");
}

double coverage_radius(const EmbeddedNetwork& net, const std::vector<Point>& m_points) {
    if (net.nodes.empty() || m_points.empty())
        throw std::invalid_argument("coverage_radius: empty input");
    double worst = 0.0;
    for (const Point& y : m_points) worst = std::max(worst, dist_to_network(y, net).distance);
    return worst;
}

double lower_bound_volume(double m_measure, double r, int d) {
    if (r <= 0.0) throw std::invalid_argument("lower_bound_volume: r must be positive");
    if (m_measure < 0.0) throw std::invalid_argument("lower_bound_volume: negative measure");
    double bound = (m_measure - unit_ball_volume(d) * std::pow(r, d)) /
                   (unit_ball_volume(d - 1) * std::pow(r, d - 1));
    return std::max(0.0, bound);
}

double lower_bound_perimeter(const std::vector<Point>& convex_polygon, double r) {
    if (r <= 0.0) throw std::invalid_argument("lower_bound_perimeter: r must be positive");
    if (convex_polygon.size() < 3)
        throw std::invalid_argument("lower_bound_perimeter: polygon needs 3 vertices");
    // Convexity via hull round-trip: every input vertex must lie on the
    // hull boundary (collinear side points are fine).
    std::vector<Point> hull = convex_hull_2d(convex_polygon);
    if (hull.size() < 3) throw std::invalid_argument("lower_bound_perimeter: degenerate polygon");
    EmbeddedNetwork hull_net;
    hull_net.nodes = hull;
    for (size_t i = 0; i < hull.size(); ++i)
        hull_net.edges.emplace_back(static_cast<int>(i), static_cast<int>((i + 1) % hull.size()));
    const double scale = std::max(1.0, diameter_estimate(convex_polygon));
    for (const Point& p : convex_polygon)
        if (dist_to_network(p, hull_net).distance > 1e-9 * scale)
            throw std::invalid_argument("lower_bound_perimeter: polygon is not convex");
    const double perimeter = polygon_perimeter(hull);
    return std::max(0.0, (perimeter - 2.0 * std::numbers::pi * r) / 2.0);
}

// ---- Smallest enclosing ball (Welzl) ------------------------------------

namespace {

Ball ball_from(const std::vector<Point>& support) {
    const int d = support.empty() ? 2 : support.front().dim;
    switch (support.size()) {
        case 0:
            return Ball{Point{{0, 0, 0}, d}, -1.0};
        case 1:
            return Ball{support[0], 0.0};
        case 2: {
            Point c = 0.5 * (support[0] + support[1]);
            return Ball{c, distance(c, support[0])};
        }
        case 3: {
            const Point &a = support[0], &b = support[1], &cc = support[2];
            Point ab = b - a, ac = cc - a;
            Point n = cross3(ab, ac);
            double n2 = dot(n, n);
            if (n2 < 1e-30) {  // collinear: widest pair
                Ball best{a, -1.0};
                for (size_t i = 0; i < 3; ++i)
                    for (size_t j = i + 1; j < 3; ++j) {
                        Point c = 0.5 * (support[i] + support[j]);
                        double rad = distance(c, support[i]);
                        if (rad > best.radius) best = Ball{c, rad};
                    }
                return best;
            }
            Point center = a + (1.0 / (2.0 * n2)) *
                                   (dot(ac, ac) * cross3(n, ab) + dot(ab, ab) * cross3(ac, n));
            center.dim = d;
            return Ball{center, distance(center, a)};
        }
        default: {  // 4 points, d = 3: circumsphere by a 3x3 solve
            const Point& a = support[0];
            double m[3][4];
            for (int row = 0; row < 3; ++row) {
                Point diff = support[static_cast<size_t>(row + 1)] - a;
                m[row][0] = diff[0];
                m[row][1] = diff[1];
                m[row][2] = diff[2];
                m[row][3] = 0.5 * dot(diff, diff);
            }
            for (int col = 0; col < 3; ++col) {
                int pivot = col;
                for (int row = col + 1; row < 3; ++row)
                    if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
                std::swap(m[col], m[pivot]);
                if (std::abs(m[col][col]) < 1e-30) return Ball{a, -1.0};  // degenerate
                for (int row = 0; row < 3; ++row) {
                    if (row == col) continue;
                    double f = m[row][col] / m[col][col];
                    for (int cc2 = col; cc2 < 4; ++cc2) m[row][cc2] -= f * m[col][cc2];
                }
            }
            Point offset{{m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]}, 3};
            Point center = a + offset;
            return Ball{center, distance(center, a)};
        }
    }
}

Ball welzl(std::vector<Point>& pts, size_t n, std::vector<Point>& support) {
    const int d = pts.empty() ? 2 : pts.front().dim;
    if (n == 0 || support.size() == static_cast<size_t>(d) + 1) return ball_from(support);
    Ball ball = welzl(pts, n - 1, support);
    const Point& p = pts[n - 1];
    if (ball.radius >= 0.0 && distance(p, ball.center) <= ball.radius * (1.0 + 1e-12)) return ball;
    support.push_back(p);
    Ball better = welzl(pts, n - 1, support);
    support.pop_back();
    return better;
}

}  // namespace

Ball smallest_enclosing_ball(const std::vector<Point>& points) {
    if (points.empty()) throw std::invalid_argument("smallest_enclosing_ball: empty input");
    std::vector<Point> pts = points;
    std::vector<Point> support;
    Ball ball = welzl(pts, pts.size(), support);
    if (ball.radius < 0.0) ball = Ball{points.front(), 0.0};
    return ball;
}

// ---- Finite-M solver -----------------------------------------------------

namespace {

Realization single_point_realization(const Point& p) {
    Realization realization;
    realization.topology.n_terminals = 1;
    realization.coords = {p};
    realization.total_length = 0.0;
    realization.converged = true;
    return realization;
}

bool same_collapsed_tree(const Realization& a, const Realization& b, double tol) {
    EmbeddedNetwork na = a.collapsed_network(tol);
    EmbeddedNetwork nb = b.collapsed_network(tol);
    if (na.edges.size() != nb.edges.size()) return false;
    std::vector<char> used(nb.edges.size(), 0);
    for (auto [i, j] : na.edges) {
        bool matched = false;
        for (size_t f = 0; f < nb.edges.size() && !matched; ++f) {
            if (used[f]) continue;
            const Point& u = nb.nodes[static_cast<size_t>(nb.edges[f].first)];
            const Point& v = nb.nodes[static_cast<size_t>(nb.edges[f].second)];
            const Point& p = na.nodes[static_cast<size_t>(i)];
            const Point& q = na.nodes[static_cast<size_t>(j)];
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

std::vector<Realization> solve_finite_m(const Instance& instance) {
    instance.validate();
    if (instance.has_polygon())
        throw std::invalid_argument("solve_finite_m: requires a finite point set");
    const auto& m_points = instance.points;
    const int n = static_cast<int>(m_points.size());
    if (n > 8) throw std::invalid_argument("solve_finite_m: n must be at most 8");
    const double r = instance.r;

    if (n == 1) return {single_point_realization(m_points[0])};

    Ball seb = smallest_enclosing_ball(m_points);
    if (seb.radius <= r) return {single_point_realization(seb.center)};

    if (n == 2) {
        Point u = normalized(m_points[1] - m_points[0]);
        Realization realization;
        realization.topology.n_terminals = 2;
        realization.topology.edges = {{0, 1}};
        realization.coords = {m_points[0] + r * u, m_points[1] - (r)*u};
        realization.total_length = distance(realization.coords[0], realization.coords[1]);
        realization.converged = true;
        realization.terminal_constraints = {DiskConstraint{m_points[0], r},
                                            DiskConstraint{m_points[1], r}};
        return {realization};
    }

    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (distance(m_points[static_cast<size_t>(i)], m_points[static_cast<size_t>(j)]) <= 2.0 * r)
                throw std::invalid_argument("solve_finite_m: overlapping constraint disks");

    std::vector<TerminalSpec> disks;
    disks.reserve(static_cast<size_t>(n));
    for (const Point& p : m_points) disks.push_back(DiskConstraint{p, r});

    const double diam = std::max(diameter_estimate(m_points), 1e-12);
    std::vector<Realization> candidates;
    for (const Topology& topology : enumerate_full_topologies(n))
        candidates.push_back(realize_convex(topology, disks));
    double best = std::numeric_limits<double>::infinity();
    for (const Realization& c : candidates) best = std::min(best, c.total_length);
    std::vector<Realization> ties;
    for (Realization& c : candidates) {
        if (c.total_length > best * (1.0 + 1e-9) + 1e-300) continue;
        bool dup = false;
        for (const Realization& kept : ties)
            if (same_collapsed_tree(c, kept, 1e-6 * diam)) dup = true;
        if (!dup) ties.push_back(std::move(c));
    }
    std::sort(ties.begin(), ties.end(),
              [](const Realization& a, const Realization& b) { return a.total_length < b.total_length; });
    return ties;
}

EmbeddedNetwork truncate_full_steiner(const std::vector<Point>& points, double r) {
    if (r <= 0.0) throw std::invalid_argument("truncate_full_steiner: r must be positive");
    std::vector<Realization> optima = steiner_tree(points);
    if (optima.size() > 1) throw std::invalid_argument("truncate_full_steiner: tied Steiner trees");
    const Realization& st = optima.front();
    const int n = st.topology.n_terminals;
    const double diam = std::max(diameter_estimate(points), 1e-12);

    if (n == 2) {
        double q = 0.5 * distance(points[0], points[1]);
        if (r >= q) throw std::invalid_argument("truncate_full_steiner: r >= q");
        Point u = normalized(points[1] - points[0]);
        EmbeddedNetwork net;
        net.nodes = {points[0] + r * u, points[1] - r * u};
        net.edges = {{0, 1}};
        net.tree_flag = true;
        return net;
    }

    // Full means no collapsed edges in the realized optimum.
    for (auto [i, j] : st.topology.edges)
        if (distance(st.coords[static_cast<size_t>(i)], st.coords[static_cast<size_t>(j)]) < 1e-7 * diam)
            throw std::invalid_argument("truncate_full_steiner: optimal tree is not full");

    // q: smallest terminal-to-adjacent-branch-point distance.
    std::vector<int> neighbor(static_cast<size_t>(n), -1);
    for (auto [i, j] : st.topology.edges) {
        if (i < n) neighbor[static_cast<size_t>(i)] = j;
        if (j < n) neighbor[static_cast<size_t>(j)] = i;
    }
    double q = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        q = std::min(q, distance(points[static_cast<size_t>(i)], st.coords[static_cast<size_t>(neighbor[static_cast<size_t>(i)])]));
    if (r >= q) throw std::invalid_argument("truncate_full_steiner: r >= q");

    EmbeddedNetwork net;
    net.nodes = st.coords;
    for (int i = 0; i < n; ++i) {
        Point u = normalized(st.coords[static_cast<size_t>(neighbor[static_cast<size_t>(i)])] - points[static_cast<size_t>(i)]);
        net.nodes[static_cast<size_t>(i)] = points[static_cast<size_t>(i)] + r * u;
    }
    net.edges = st.topology.edges;
    net.tree_flag = true;
    return net;
}

StructureReport validate_minimizer_structure(const EmbeddedNetwork& net, const Instance& instance,
                                             double tol) {
    net.validate();
    instance.validate();
    if (!net.is_connected())
        throw std::invalid_argument("validate_minimizer_structure: disconnected input");
    if (instance.points.empty())
        throw std::invalid_argument("validate_minimizer_structure: needs a finite point set");
    const double r = instance.r;

    StructureReport report;
    report.coverage_radius = coverage_radius(net, instance.points);

    if (net.has_cycle())
        report.violations.push_back(StructureViolation{"cycle", -1, 0.0, "network contains a cycle"});

    std::vector<std::vector<int>> adj(net.nodes.size());
    for (auto [i, j] : net.edges) {
        adj[static_cast<size_t>(i)].push_back(j);
        adj[static_cast<size_t>(j)].push_back(i);
    }

    // Energetic flags: some y in M at distance r (within the band) whose
    // open r-ball misses the network.
    report.energetic.assign(net.nodes.size(), false);
    for (size_t v = 0; v < net.nodes.size(); ++v) {
        for (const Point& y : instance.points) {
            double d = distance(net.nodes[v], y);
            if (d < r * (1.0 - kEnergeticBand) || d > r * (1.0 + kEnergeticBand)) continue;
            if (dist_to_network(y, net).distance < r * (1.0 - kEnergeticBand)) continue;
            report.energetic[v] = true;
            report.corresponding.push_back(CorrespondingPair{static_cast<int>(v), y, d});
            break;
        }
    }

    const double target = 2.0 * std::numbers::pi / 3.0;
    const double corner_eps = std::max(tol, 1e-6);
    for (size_t v = 0; v < net.nodes.size(); ++v) {
        const auto& nbr = adj[v];
        if (nbr.size() > 3) {
            report.violations.push_back(StructureViolation{
                "degree", static_cast<int>(v), static_cast<double>(nbr.size()),
                "degree " + std::to_string(nbr.size()) + " exceeds 3"});
            continue;
        }
        if (nbr.size() == 3) {
            for (size_t a = 0; a < 3; ++a)
                for (size_t b = a + 1; b < 3; ++b) {
                    double ang = angle_at(net.nodes[v], net.nodes[static_cast<size_t>(nbr[a])],
                                          net.nodes[static_cast<size_t>(nbr[b])]);
                    if (std::abs(ang - target) > tol)
                        report.violations.push_back(
                            StructureViolation{"branch-angle", static_cast<int>(v), ang,
                                               "branch angle deviates from 2*pi/3"});
                }
        } else if (nbr.size() == 2) {
            double ang = angle_at(net.nodes[v], net.nodes[static_cast<size_t>(nbr[0])],
                                  net.nodes[static_cast<size_t>(nbr[1])]);
            if (ang < target - tol)
                report.violations.push_back(StructureViolation{
                    "path-angle", static_cast<int>(v), ang, "degree-2 angle below 2*pi/3"});
            if (ang < std::numbers::pi - corner_eps && !report.energetic[v])
                report.violations.push_back(
                    StructureViolation{"non-energetic-corner", static_cast<int>(v), ang,
                                       "corner without a corresponding M point"});
        } else if (nbr.size() == 1) {
            if (!report.energetic[v])
                report.violations.push_back(
                    StructureViolation{"non-energetic-leaf", static_cast<int>(v), 0.0,
                                       "leaf without a corresponding M point"});
        }
    }
    return report;
}

// ---- Disk-chain solver ---------------------------------------------------

ChainDetail chain_solve_detailed(const std::vector<Point>& centers, double r,
                                 std::uint64_t seed) {
    if (centers.empty()) throw std::invalid_argument("chain_solve: empty centers");
    if (r <= 0.0) throw std::invalid_argument("chain_solve: r must be positive");
    const size_t m = centers.size();
    Topology path;
    path.n_terminals = static_cast<int>(m);
    for (size_t i = 0; i + 1 < m; ++i)
        path.edges.emplace_back(static_cast<int>(i), static_cast<int>(i + 1));
    std::vector<TerminalSpec> disks;
    disks.reserve(m);
    for (const Point& c : centers) disks.push_back(DiskConstraint{c, r});

    if (m == 1) {
        ChainDetail detail;
        detail.realization.topology = path;
        detail.realization.coords = {centers[0]};
        detail.realization.total_length = 0.0;
        detail.realization.converged = true;
        detail.realization.terminal_constraints = disks;
        detail.unique_verified = true;
        return detail;
    }

    RealizeOptions first;
    first.init_seed = 0;  // start at the disk centers
    Realization run_a = realize_convex(path, disks, first);
    RealizeOptions second;
    second.init_seed = seed == 0 ? 0x9e3779b97f4a7c15ULL : seed;
    Realization run_b = realize_convex(path, disks, second);

    double disagreement = 0.0;
    for (size_t i = 0; i < m; ++i)
        disagreement = std::max(disagreement, distance(run_a.coords[i], run_b.coords[i]));

    ChainDetail detail;
    detail.realization = run_a.total_length <= run_b.total_length ? run_a : run_b;
    detail.run_disagreement = disagreement;
    detail.unique_verified = disagreement <= 1e-6;
    detail.realization.converged =
        run_a.converged && run_b.converged && detail.unique_verified;
    return detail;
}

Realization chain_solve(const std::vector<Point>& centers, double r, std::uint64_t seed) {
    return chain_solve_detailed(centers, r, seed).realization;
}

}  // namespace mdmkit
