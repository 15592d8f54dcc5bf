#include "mdmkit/convex_min.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mdmkit::convexmin {

namespace {

double exact_length(const std::vector<Point>& x, const std::vector<std::pair<int, int>>& edges) {
    double s = 0.0;
    for (auto [i, j] : edges) s += distance(x[static_cast<size_t>(i)], x[static_cast<size_t>(j)]);
    return s;
}

double smoothed_length(const std::vector<Point>& x, const std::vector<std::pair<int, int>>& edges,
                       double mu) {
    double s = 0.0;
    for (auto [i, j] : edges) {
        Point e = x[static_cast<size_t>(i)] - x[static_cast<size_t>(j)];
        s += std::sqrt(dot(e, e) + mu * mu);
    }
    return s;
}

void smoothed_gradient(const std::vector<Point>& x, const std::vector<std::pair<int, int>>& edges,
                       const std::vector<NodeConstraint>& cons, double mu,
                       std::vector<Point>& g) {
    for (Point& gi : g) gi = Point{{0, 0, 0}, x.front().dim};
    for (auto [i, j] : edges) {
        Point e = x[static_cast<size_t>(i)] - x[static_cast<size_t>(j)];
        double n = std::sqrt(dot(e, e) + mu * mu);
        if (n == 0.0) continue;
        Point t = (1.0 / n) * e;
        g[static_cast<size_t>(i)] = g[static_cast<size_t>(i)] + t;
        g[static_cast<size_t>(j)] = g[static_cast<size_t>(j)] - t;
    }
    for (size_t i = 0; i < g.size(); ++i)
        if (cons[i].kind == Kind::Fixed) g[i] = Point{{0, 0, 0}, x.front().dim};
}

void project(std::vector<Point>& x, const std::vector<NodeConstraint>& cons) {
    for (size_t i = 0; i < x.size(); ++i) {
        const NodeConstraint& c = cons[i];
        if (c.kind == Kind::Fixed) {
            x[i] = c.center;
        } else if (c.kind == Kind::Disk) {
            Point off = x[i] - c.center;
            double n = norm(off);
            if (n > c.radius) x[i] = c.center + (c.radius / n) * off;
        }
    }
}

double step_norm(const std::vector<Point>& a, const std::vector<Point>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        Point d = a[i] - b[i];
        s += dot(d, d);
    }
    return std::sqrt(s);
}

// Projected Barzilai-Borwein descent with a nonmonotone Armijo safeguard.
void bb_stage(std::vector<Point>& x, const std::vector<std::pair<int, int>>& edges,
              const std::vector<NodeConstraint>& cons, double mu, double scale,
              const Options& opt) {
    const size_t n = x.size();
    std::vector<Point> g(n), g_new(n), x_new(n);
    smoothed_gradient(x, edges, cons, mu, g);
    double fx = smoothed_length(x, edges, mu);
    double gn = 0.0;
    for (const Point& gi : g) gn += dot(gi, gi);
    gn = std::sqrt(gn);
    double alpha = gn > 0.0 ? 0.1 * scale / gn : scale;
    std::vector<double> hist{fx};
    int flat = 0;
    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        double fref = *std::max_element(hist.begin(), hist.end());
        double fnew = 0.0;
        int backtracks = 0;
        for (;;) {
            for (size_t i = 0; i < n; ++i) x_new[i] = x[i] - alpha * g[i];
            project(x_new, cons);
            fnew = smoothed_length(x_new, edges, mu);
            double move2 = 0.0;
            for (size_t i = 0; i < n; ++i) {
                Point d = x_new[i] - x[i];
                move2 += dot(d, d);
            }
            if (fnew <= fref - 1e-4 * move2 / std::max(alpha, 1e-300) || backtracks >= 60) break;
            alpha *= 0.5;
            ++backtracks;
        }
        double move = step_norm(x_new, x);
        if (move <= 1e-16 * std::max(1.0, scale)) break;
        smoothed_gradient(x_new, edges, cons, mu, g_new);
        double sy = 0.0, ss = 0.0;
        for (size_t i = 0; i < n; ++i) {
            Point s = x_new[i] - x[i];
            Point y = g_new[i] - g[i];
            sy += dot(s, y);
            ss += dot(s, s);
        }
        alpha = sy > 1e-300 ? std::clamp(ss / sy, 1e-16 * scale, 1e6 * scale) : alpha * 2.0;
        x.swap(x_new);
        g.swap(g_new);
        if (std::abs(fx - fnew) <= opt.rel_tol * std::max(1.0, std::abs(fx))) {
            if (++flat >= 4) {
                fx = fnew;
                break;
            }
        } else {
            flat = 0;
        }
        fx = fnew;
        hist.push_back(fx);
        if (hist.size() > 6) hist.erase(hist.begin());
    }
}

Point weiszfeld(const std::vector<Point>& anchors, Point x, int iterations) {
    for (int it = 0; it < iterations; ++it) {
        Point num{{0, 0, 0}, x.dim};
        double den = 0.0;
        bool at_anchor = false;
        for (const Point& a : anchors) {
            double dist_a = distance(x, a);
            if (dist_a < 1e-15) {
                at_anchor = true;
                break;
            }
            double w = 1.0 / dist_a;
            num = num + w * a;
            den += w;
        }
        if (at_anchor || den == 0.0) break;
        x = (1.0 / den) * num;
    }
    return x;
}

Point project_to_segment(const Point& p, const Point& a, const Point& b) {
    Point ab = b - a;
    double l2 = dot(ab, ab);
    if (l2 == 0.0) return a;
    double t = std::clamp(dot(p - a, ab) / l2, 0.0, 1.0);
    return a + t * ab;
}

double anchors_cost(const Point& x, const std::vector<Point>& anchors) {
    double s = 0.0;
    for (const Point& a : anchors) s += distance(x, a);
    return s;
}

// Global minimum of the anchor-distance sum over a circle (2D boundary):
// coarse scan, golden-section bracketing, then a secant polish on the
// stationarity condition so repeated node solves do not jitter.
Point circle_boundary_min(const Point& center, double radius, const std::vector<Point>& anchors) {
    auto at = [&](double th) {
        return center + radius * make_point(std::cos(th), std::sin(th));
    };
    auto slope = [&](double th) {
        Point x = at(th);
        Point tangent = radius * make_point(-std::sin(th), std::cos(th));
        double s = 0.0;
        for (const Point& a : anchors) {
            double d = distance(x, a);
            if (d > 1e-300) s += dot(tangent, x - a) / d;
        }
        return s;
    };
    const int coarse = 256;
    double best_th = 0.0, best_f = std::numeric_limits<double>::infinity();
    for (int k = 0; k < coarse; ++k) {
        double th = 2.0 * std::numbers::pi * k / coarse;
        double f = anchors_cost(at(th), anchors);
        if (f < best_f) {
            best_f = f;
            best_th = th;
        }
    }
    const double step = 2.0 * std::numbers::pi / coarse;
    double a = best_th - step;
    double b = best_th + step;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = anchors_cost(at(x1), anchors), f2 = anchors_cost(at(x2), anchors);
    while (b - a > 1e-10) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = anchors_cost(at(x1), anchors);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = anchors_cost(at(x2), anchors);
        }
    }
    // Stationarity by sign bisection within the (widened) golden bracket;
    // gives a reproducible machine-precision angle, so repeated node solves
    // reach an exact fixed point.
    double lo = a - 1e-9, hi = b + 1e-9;
    double slo = slope(lo), shi = slope(hi);
    if (slo < 0.0 && shi > 0.0) {
        for (int it = 0; it < 80 && hi - lo > 4e-17; ++it) {
            double mid = 0.5 * (lo + hi);
            double sm = slope(mid);
            if (sm == 0.0) return at(mid);
            if (sm < 0.0) lo = mid;
            else hi = mid;
        }
        return at(0.5 * (lo + hi));
    }
    return at(0.5 * (a + b));
}

// Projected gradient over the closed ball; used for the 3D boundary case.
Point ball_pg_min(const Point& center, double radius, const std::vector<Point>& anchors,
                  Point x) {
    auto proj = [&](Point p) {
        Point off = p - center;
        double n = norm(off);
        if (n > radius) p = center + (radius / n) * off;
        return p;
    };
    x = proj(x);
    double fx = anchors_cost(x, anchors);
    double alpha = 0.25 * radius;
    for (int it = 0; it < 400; ++it) {
        Point g{{0, 0, 0}, x.dim};
        for (const Point& a : anchors) {
            double dist_a = distance(x, a);
            if (dist_a > 1e-15) g = g + (1.0 / dist_a) * (x - a);
        }
        Point x_new = proj(x - alpha * g);
        double fn = anchors_cost(x_new, anchors);
        if (fn < fx) {
            if (step_norm({x_new}, {x}) < 1e-16 * std::max(1.0, radius)) {
                x = x_new;
                break;
            }
            x = x_new;
            fx = fn;
            alpha *= 1.3;
        } else {
            alpha *= 0.5;
            if (alpha < 1e-18 * radius) break;
        }
    }
    return x;
}

}  // namespace

Point fermat_point(const Point& a, const Point& b, const Point& c) {
    const double ab = distance(a, b), ac = distance(a, c), bc = distance(b, c);
    if (ab == 0.0) return a;
    if (ac == 0.0) return a;
    if (bc == 0.0) return b;
    // A vertex with angle >= 2*pi/3 is itself the minimizer.
    if (dot(b - a, c - a) <= -0.5 * ab * ac) return a;
    if (dot(a - b, c - b) <= -0.5 * ab * bc) return b;
    if (dot(a - c, b - c) <= -0.5 * ac * bc) return c;
    // Torricelli construction in the triangle's plane.
    Point u = (1.0 / ab) * (b - a);
    Point w = (c - a) - dot(c - a, u) * u;
    double wn = norm(w);
    if (wn < 1e-15 * std::max(ab, ac)) {
        // Degenerate (collinear) triangle: the middle point wins.
        return project_to_segment(c, a, b);
    }
    w = (1.0 / wn) * w;
    const double bx = ab;
    const double cx = dot(c - a, u), cy = dot(c - a, w);  // cy > 0
    // Equilateral apexes on the far sides of AB (below the axis, since C is
    // above) and AC (away from B).
    const double s3 = std::sqrt(3.0) / 2.0;
    const double e_ab_x = 0.5 * bx, e_ab_y = -s3 * bx;
    const double e_ac_x = 0.5 * cx - s3 * cy, e_ac_y = 0.5 * cy + s3 * cx;
    // Intersection of C--E_ab with B--E_ac.
    const double r1x = e_ab_x - cx, r1y = e_ab_y - cy;
    const double r2x = e_ac_x - bx, r2y = e_ac_y;
    const double den = r1x * r2y - r1y * r2x;
    if (std::abs(den) < 1e-300) return project_to_segment(c, a, b);
    const double t = ((bx - cx) * r2y - (0.0 - cy) * r2x) / den;
    const double px = cx + t * r1x, py = cy + t * r1y;
    return a + px * u + py * w;
}

Point disk_constrained_min(const Point& center, double radius, const std::vector<Point>& anchors,
                           const Point& current) {
    if (anchors.empty()) return current;
    Point unconstrained;
    switch (anchors.size()) {
        case 1:
            unconstrained = anchors[0];
            break;
        case 2:
            unconstrained = project_to_segment(current, anchors[0], anchors[1]);
            break;
        case 3:
            unconstrained = fermat_point(anchors[0], anchors[1], anchors[2]);
            break;
        default:
            unconstrained = weiszfeld(anchors, current, 60);
            break;
    }
    if (distance(unconstrained, center) <= radius) return unconstrained;
    if (anchors.size() == 2) {
        // The optimal set is the chord of [p,q] inside the disk, if any;
        // pick its point nearest the unconstrained choice.
        const Point p = anchors[0], q = anchors[1];
        Point u = q - p;
        double l2 = dot(u, u);
        if (l2 > 0.0) {
            Point w = p - center;
            double A = l2, B = 2.0 * dot(w, u), C = dot(w, w) - radius * radius;
            double disc = B * B - 4.0 * A * C;
            if (disc >= 0.0) {
                double sq = std::sqrt(disc);
                double t0 = std::max(0.0, (-B - sq) / (2.0 * A));
                double t1 = std::min(1.0, (-B + sq) / (2.0 * A));
                if (t0 <= t1) {
                    double tc = std::clamp(dot(unconstrained - p, u) / l2, t0, t1);
                    return p + tc * u;
                }
            }
        }
    }
    if (center.dim == 2) return circle_boundary_min(center, radius, anchors);
    return ball_pg_min(center, radius, anchors, current);
}

Result minimize_length(const Problem& problem, const Options& options) {
    const size_t n = problem.init.size();
    if (n == 0) throw std::invalid_argument("minimize_length: no nodes");
    if (problem.constraints.size() != n)
        throw std::invalid_argument("minimize_length: constraint count mismatch");
    std::vector<Point> x = problem.init;
    project(x, problem.constraints);

    std::vector<Point> scale_pts = x;
    for (const NodeConstraint& c : problem.constraints)
        if (c.kind != Kind::Free) scale_pts.push_back(c.center);
    const double diam = std::max(diameter_estimate(scale_pts), 1e-12);

    double mu = options.mu_start_rel * diam;
    for (int stage = 0; stage < options.smoothing_stages; ++stage) {
        bb_stage(x, problem.edges, problem.constraints, mu, diam, options);
        mu *= 0.1;
    }

    // Exact coordinate descent: every node solve is closed-form (or a 1D
    // boundary search), so the polish drives degenerate edges fully shut.
    std::vector<std::vector<int>> adj(n);
    for (auto [i, j] : problem.edges) {
        adj[static_cast<size_t>(i)].push_back(j);
        adj[static_cast<size_t>(j)].push_back(i);
    }
    double last_move = std::numeric_limits<double>::infinity();
    const double move_tol = 1e-14 * std::max(1.0, diam);
    const double merge_window = 1e-4 * diam;
    auto anchors_of = [&](size_t i, int excluded) {
        std::vector<Point> anchors;
        for (int j : adj[i])
            if (j != excluded) anchors.push_back(x[static_cast<size_t>(j)]);
        return anchors;
    };
    auto free_min = [&](const std::vector<Point>& anchors, const Point& current) {
        switch (anchors.size()) {
            case 1: return anchors[0];
            case 2: return project_to_segment(current, anchors[0], anchors[1]);
            case 3: return fermat_point(anchors[0], anchors[1], anchors[2]);
            default: return weiszfeld(anchors, current, 200);
        }
    };
    for (int sweep = 0; sweep < options.polish_sweeps; ++sweep) {
        last_move = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const NodeConstraint& c = problem.constraints[i];
            if (c.kind == Kind::Fixed) continue;
            std::vector<Point> anchors = anchors_of(i, -1);
            if (anchors.empty()) continue;
            Point moved = c.kind == Kind::Disk
                              ? disk_constrained_min(c.center, c.radius, anchors, x[i])
                              : free_min(anchors, x[i]);
            last_move = std::max(last_move, distance(moved, x[i]));
            x[i] = moved;
        }
        // A collapsed edge hides the coupling from the per-node solves, so
        // coordinate descent stalls there; solve the merged pair instead and
        // keep the move only if it does not lengthen the network.
        for (auto [i, j] : problem.edges) {
            size_t si = static_cast<size_t>(i), sj = static_cast<size_t>(j);
            if (distance(x[si], x[sj]) > merge_window) continue;
            const NodeConstraint& ci = problem.constraints[si];
            const NodeConstraint& cj = problem.constraints[sj];
            if (ci.kind == Kind::Fixed && cj.kind == Kind::Fixed) continue;
            if (ci.kind == Kind::Disk && cj.kind == Kind::Disk) continue;
            std::vector<Point> anchors = anchors_of(si, j);
            for (const Point& a : anchors_of(sj, i)) anchors.push_back(a);
            if (anchors.empty()) continue;
            Point merged;
            if (ci.kind == Kind::Fixed) merged = ci.center;
            else if (cj.kind == Kind::Fixed) merged = cj.center;
            else if (ci.kind == Kind::Disk)
                merged = disk_constrained_min(ci.center, ci.radius, anchors, x[si]);
            else if (cj.kind == Kind::Disk)
                merged = disk_constrained_min(cj.center, cj.radius, anchors, x[sj]);
            else merged = free_min(anchors, x[si]);
            double before = distance(x[si], x[sj]);
            for (const Point& a : anchors_of(si, j)) before += distance(x[si], a);
            for (const Point& a : anchors_of(sj, i)) before += distance(x[sj], a);
            double after = 0.0;
            for (const Point& a : anchors) after += distance(merged, a);
            if (after <= before) {
                last_move = std::max(last_move, std::max(distance(merged, x[si]),
                                                         distance(merged, x[sj])));
                x[si] = merged;
                x[sj] = merged;
            }
        }
        if (last_move < move_tol) break;
    }

    Result out;
    out.coords = std::move(x);
    out.length = exact_length(out.coords, problem.edges);
    out.converged = last_move < 1e-9 * std::max(1.0, diam);
    return out;
}

}  // namespace mdmkit::convexmin
