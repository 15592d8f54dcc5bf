#include "mdmkit/tube.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mdmkit/rng.hpp"

namespace mdmkit {

namespace {

constexpr std::uint64_t kBatchSize = 1 << 16;

Point sample_box(const Box& box, int d, Rng& rng) {
    Point p;
    p.dim = d;
    for (int k = 0; k < d; ++k) p[k] = rng.uniform(box.lo[k], box.hi[k]);
    return p;
}

}  // namespace

double unit_ball_volume(int k) {
    if (k < 0) throw std::invalid_argument("unit_ball_volume: negative dimension");
    return std::pow(std::numbers::pi, k / 2.0) / std::tgamma(k / 2.0 + 1.0);
}

double tube_upper_bound(double length, double R, int d) {
    if (R <= 0.0) throw std::invalid_argument("tube_upper_bound: R must be positive");
    if (length < 0.0) throw std::invalid_argument("tube_upper_bound: negative length");
    if (d < 2) throw std::invalid_argument("tube_upper_bound: d must be at least 2");
    return length * unit_ball_volume(d - 1) * std::pow(R, d - 1) +
           unit_ball_volume(d) * std::pow(R, d);
}

McEstimate tube_volume_mc(const EmbeddedNetwork& net, double R, std::uint64_t samples,
                          std::uint64_t seed) {
    if (net.nodes.empty()) throw std::invalid_argument("tube_volume_mc: empty network");
    if (R <= 0.0) throw std::invalid_argument("tube_volume_mc: R must be positive");
    if (samples < 10000) throw std::invalid_argument("tube_volume_mc: needs at least 10^4 samples");
    const int d = net.dim();
    const Box box = bounding_box(net, R);
    const double vol = box_volume(box, d);
    NetworkBvh bvh(net);

    auto partials = map_batches<std::uint64_t>(
        seed, samples, kBatchSize,
        [&](std::uint64_t, std::uint64_t count, Rng& rng) {
            std::uint64_t hits = 0;
            for (std::uint64_t i = 0; i < count; ++i)
                if (bvh.within(sample_box(box, d, rng), R)) ++hits;
            return hits;
        });
    std::uint64_t hits = 0;
    for (std::uint64_t h : partials) hits += h;

    const double n = static_cast<double>(samples);
    const double p = static_cast<double>(hits) / n;
    McEstimate out;
    out.estimate = vol * p;
    out.ci_halfwidth = 3.0 * vol * std::sqrt(std::max(p * (1.0 - p), 0.0) / n);
    return out;
}

double grid_tube_area_2d(const EmbeddedNetwork& net, double R, double cell) {
    if (net.dim() != 2) throw std::invalid_argument("grid_tube_area_2d: requires d = 2");
    if (cell <= 0.0) throw std::invalid_argument("grid_tube_area_2d: cell must be positive");
    const Box box = bounding_box(net, R + cell);
    const std::int64_t nx = static_cast<std::int64_t>(std::ceil((box.hi[0] - box.lo[0]) / cell));
    const std::int64_t ny = static_cast<std::int64_t>(std::ceil((box.hi[1] - box.lo[1]) / cell));
    if (nx * ny > (std::int64_t{1} << 31))
        throw std::invalid_argument("grid_tube_area_2d: grid too fine");
    NetworkBvh bvh(net);
    std::uint64_t hits = 0;
    for (std::int64_t iy = 0; iy < ny; ++iy) {
        double y = box.lo[1] + (static_cast<double>(iy) + 0.5) * cell;
        for (std::int64_t ix = 0; ix < nx; ++ix) {
            double x = box.lo[0] + (static_cast<double>(ix) + 0.5) * cell;
            if (bvh.within(make_point(x, y), R)) ++hits;
        }
    }
    return static_cast<double>(hits) * cell * cell;
}

double curvature_radius_estimate(const PolyCurve& curve) {
    const auto& v = curve.vertices();
    if (v.size() < 3) throw std::invalid_argument("curvature_radius_estimate: needs 3 vertices");
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 1; i + 1 < v.size(); ++i) {
        Point u = v[i] - v[i - 1];
        Point w = v[i + 1] - v[i];
        double a = norm(u);
        double b = norm(w);
        double c = distance(v[i - 1], v[i + 1]);
        double area2 = norm(cross3(u, w));  // twice the triangle area
        if (area2 == 0.0) continue;         // straight triple
        best = std::min(best, a * b * c / (2.0 * area2));
    }
    return best;
}

double admissible_radius(const PolyCurve& curve) {
    if (curve.vertices().size() > 2 && curve.min_self_separation() <= kTieTol)
        throw std::invalid_argument("admissible_radius: self-intersecting curve");
    double r_curv = curve.vertices().size() >= 3 ? curvature_radius_estimate(curve)
                                                 : std::numeric_limits<double>::infinity();
    const double r_eff = std::min(r_curv, curve.length());
    const double arc_gap = std::numbers::pi * r_eff;
    const auto& v = curve.vertices();
    const auto& cum = curve.cumulative_lengths();
    double min_dist = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < v.size(); ++i)
        for (size_t j = i + 1; j < v.size(); ++j)
            if (cum[j] - cum[i] >= arc_gap - 1e-12) min_dist = std::min(min_dist, distance(v[i], v[j]));
    // Segment pairs whose whole arc gap qualifies sharpen the vertex scan.
    size_t nseg = curve.segment_count();
    for (size_t i = 0; i < nseg; ++i)
        for (size_t j = i + 1; j < nseg; ++j) {
            if (cum[j] - cum[i + 1] < arc_gap - 1e-12) continue;
            double d = dist_point_segment(v[i], v[j], v[j + 1]).distance;
            d = std::min(d, dist_point_segment(v[i + 1], v[j], v[j + 1]).distance);
            d = std::min(d, dist_point_segment(v[j], v[i], v[i + 1]).distance);
            d = std::min(d, dist_point_segment(v[j + 1], v[i], v[i + 1]).distance);
            min_dist = std::min(min_dist, d);
        }
    if (!std::isfinite(min_dist)) return r_eff;  // no separated pairs
    return std::min(0.5 * min_dist, r_eff);
}

namespace {

struct WitnessCandidate {
    Point p;
    double t1 = 0.0, t2 = 0.0;
    double separation = 0.0;
};

double arc_of_foot(const PolyCurve& curve, const NetworkFoot& foot) {
    const auto& cum = curve.cumulative_lengths();
    size_t e = static_cast<size_t>(foot.edge);
    return cum[e] + foot.param * (cum[e + 1] - cum[e]);
}

// Nearest curve point within the arc window [t0 - w, t0 + w]: exact
// per-segment feet clamped into the window, so the refinement resolves the
// parameter to machine precision without leaving the local branch.
struct LocalFoot {
    double t = 0.0;
    double dist = 0.0;
};
LocalFoot local_foot_range(const PolyCurve& curve, const Point& p, double lo, double hi) {
    const auto& cum = curve.cumulative_lengths();
    const auto& v = curve.vertices();
    lo = std::max(0.0, lo);
    hi = std::min(curve.length(), hi);
    if (lo > hi) lo = hi;
    size_t first = static_cast<size_t>(std::upper_bound(cum.begin(), cum.end(), lo) - cum.begin());
    first = first > 0 ? first - 1 : 0;
    LocalFoot best;
    best.dist = std::numeric_limits<double>::infinity();
    for (size_t e = first; e + 1 < cum.size() && cum[e] < hi; ++e) {
        double seg_len = cum[e + 1] - cum[e];
        SegmentFoot f = dist_point_segment(p, v[e], v[e + 1]);
        double t = std::clamp(cum[e] + f.param * seg_len, std::max(lo, cum[e]),
                              std::min(hi, cum[e + 1]));
        double d = distance(p, curve.point_at(t));
        if (d < best.dist) best = LocalFoot{t, d};
    }
    return best;
}

LocalFoot local_foot(const PolyCurve& curve, const Point& p, double t0, double w) {
    return local_foot_range(curve, p, t0 - w, t0 + w);
}

// Arc separation scale distinguishing genuine double-nearest witnesses from
// discretization corners: polygonization artifacts have foot separations of
// at most about one edge (for curvature radius >= R), while genuine corner
// witnesses reach 2 R tan(theta/2). Ten of these is the minimum accepted
// separation.
double separation_scale(const PolyCurve& curve, double R) {
    return std::min({curve.max_edge_length(), curve.length() / 64.0, R / 64.0});
}

// Arc separation; measured around the shorter way for closed curves, where
// parameters 0 and L name the same point.
double arc_separation(const PolyCurve& curve, double t1, double t2) {
    double sep = std::abs(t2 - t1);
    if (curve.is_closed()) sep = std::min(sep, curve.length() - sep);
    return sep;
}

// Shared search state: the curve, its accelerator, and the separation
// policy. The refinement equalizes the two feet by a clamped Newton walk and,
// when the pair is shadowed by a closer third branch (a surrounded witness
// like a circle center), ascends the distance field along the tie bisector.
struct WitnessSearch {
    const PolyCurve& curve;
    const NetworkBvh& bvh;
    double R;
    double sep_min;

    double window() const { return 0.25 * sep_min; }

    // Best foot with arc separation at least sep_min from t1: a BVH query
    // excluding the covered edge range, plus clamped probes on the two
    // boundary edges the rounding may swallow.
    bool second_foot(const Point& p, double t1, double& t2_out, double& d2_out) const {
        const auto& cum = curve.cumulative_lengths();
        const auto& verts = curve.vertices();
        const int n_edges = static_cast<int>(curve.segment_count());
        auto lo_it = std::upper_bound(cum.begin(), cum.end(), t1 - sep_min);
        auto hi_it = std::lower_bound(cum.begin(), cum.end(), t1 + sep_min);
        int skip_lo = std::max<int>(0, static_cast<int>(lo_it - cum.begin()) - 1);
        int skip_hi = std::min<int>(n_edges, static_cast<int>(hi_it - cum.begin()));
        double t2 = -1.0, d2 = std::numeric_limits<double>::infinity();
        NetworkFoot f2 = bvh.nearest_excluding(p, skip_lo, skip_hi);
        if (f2.edge >= 0) {
            t2 = arc_of_foot(curve, f2);
            d2 = f2.distance;
        }
        auto probe = [&](int e, double arc_lo, double arc_hi) {
            if (e < 0 || e >= n_edges) return;
            size_t ei = static_cast<size_t>(e);
            double lo = std::max(arc_lo, cum[ei]);
            double hi = std::min(arc_hi, cum[ei + 1]);
            if (lo >= hi) return;
            double seg_len = cum[ei + 1] - cum[ei];
            SegmentFoot f = dist_point_segment(p, verts[ei], verts[ei + 1]);
            double t = std::clamp(cum[ei] + f.param * seg_len, lo, hi);
            double d = distance(p, curve.point_at(t));
            if (d < d2) {
                t2 = t;
                d2 = d;
            }
        };
        if (skip_lo < skip_hi) {
            probe(skip_lo, 0.0, t1 - sep_min);
            probe(skip_hi - 1, t1 + sep_min, curve.length());
        }
        if (t2 < 0.0) return false;
        t2_out = t2;
        d2_out = d2;
        return true;
    }

    // Clamped Newton along the foot-to-foot direction until the two local
    // distances agree. Feet track their windows but keep the separation
    // floor between them, otherwise an unpinned foot slides downhill and
    // the pair collapses.
    bool pair_equalize(Point& p, double& t1, double& t2) const {
        const double w = window();
        if (t1 > t2) std::swap(t1, t2);
        for (int iter = 0; iter < 160; ++iter) {
            LocalFoot f1 = local_foot_range(curve, p, t1 - w, std::min(t1 + w, t2 - sep_min));
            LocalFoot f2 = local_foot_range(curve, p, std::max(t2 - w, t1 + sep_min), t2 + w);
            t1 = f1.t;
            t2 = f2.t;
            double g = f1.dist - f2.dist;
            if (std::abs(g) <= 1e-14 * std::max(1.0, R)) return true;
            if (f1.dist <= 0.0 || f2.dist <= 0.0) return false;
            Point g1 = curve.point_at(t1), g2 = curve.point_at(t2);
            Point dir = g2 - g1;
            double dn = norm(dir);
            if (dn < 1e-12) return false;
            dir = (1.0 / dn) * dir;
            Point u1 = (1.0 / f1.dist) * (p - g1);
            Point u2 = (1.0 / f2.dist) * (p - g2);
            double slope = dot(dir, u1) - dot(dir, u2);
            if (std::abs(slope) < 1e-9) return false;
            double delta = std::clamp(-g / slope, -0.5 * w, 0.5 * w);
            p = p + delta * dir;
        }
        return true;
    }

    std::optional<DoubleNearestWitness> refine(const WitnessCandidate& cand) const {
        Point p = cand.p;
        double t1 = cand.t1, t2 = cand.t2;
        for (int outer = 0; outer < 12; ++outer) {
            if (!pair_equalize(p, t1, t2)) return std::nullopt;
            LocalFoot f1 = local_foot_range(curve, p, t1 - window(),
                                            std::min(t1 + window(), t2 - sep_min));
            LocalFoot f2 = local_foot_range(curve, p, std::max(t2 - window(), t1 + sep_min),
                                            t2 + window());
            double common = 0.5 * (f1.dist + f2.dist);
            if (bvh.distance(p) >= common - kTieTol) break;
            // A third branch is closer: lift the tie by walking up the
            // distance field along the bisector of the two foot directions,
            // then re-seed the pair from the new global foot.
            if (f1.dist <= 0.0 || f2.dist <= 0.0) return std::nullopt;
            Point u1 = (1.0 / f1.dist) * (p - curve.point_at(t1));
            Point u2 = (1.0 / f2.dist) * (p - curve.point_at(t2));
            Point b = u1 + u2;
            double bn = norm(b);
            if (bn < 1e-9) return std::nullopt;
            b = (1.0 / bn) * b;
            double lo = 0.0, hi = R;
            for (int it = 0; it < 200; ++it) {
                double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
                if (bvh.distance(p + m1 * b) < bvh.distance(p + m2 * b)) lo = m1;
                else hi = m2;
            }
            p = p + (0.5 * (lo + hi)) * b;
            NetworkFoot g1 = bvh.nearest(p);
            if (!(g1.distance < R)) return std::nullopt;
            t1 = arc_of_foot(curve, g1);
            double d2 = 0.0;
            if (!second_foot(p, t1, t2, d2) || !(d2 < R)) return std::nullopt;
            if (t1 > t2) std::swap(t1, t2);
        }
        LocalFoot f1 = local_foot_range(curve, p, t1 - window(),
                                        std::min(t1 + window(), t2 - sep_min));
        LocalFoot f2 = local_foot_range(curve, p, std::max(t2 - window(), t1 + sep_min),
                                        t2 + window());
        if (f1.t > f2.t) std::swap(f1, f2);
        const double common = 0.5 * (f1.dist + f2.dist);
        if (std::abs(f1.dist - f2.dist) > kTieTol) return std::nullopt;
        if (arc_separation(curve, f1.t, f2.t) < sep_min) return std::nullopt;
        if (!(common < R * (1.0 - 1e-12)) || common <= 0.0) return std::nullopt;
        if (bvh.distance(p) < common - kTieTol) return std::nullopt;
        return DoubleNearestWitness{p, f1.t, f2.t, common};
    }
};

}  // namespace

std::optional<DoubleNearestWitness> find_double_nearest_witness(const PolyCurve& curve, double R,
                                                                std::uint64_t samples,
                                                                std::uint64_t seed) {
    if (R <= 0.0) throw std::invalid_argument("find_double_nearest_witness: R must be positive");
    const EmbeddedNetwork net = EmbeddedNetwork::from_curve(curve);
    if (net.edges.size() < 2) return std::nullopt;  // a segment has unique feet
    NetworkBvh bvh(net);
    const int d = curve.dim();
    const Box box = bounding_box(net, R);
    const double sep_min = 10.0 * separation_scale(curve, R);
    const double band = 0.25 * R;
    WitnessSearch search{curve, bvh, R, sep_min};

    auto candidates_of_batch = [&](std::uint64_t, std::uint64_t count, Rng& rng) {
        std::vector<WitnessCandidate> best;
        for (std::uint64_t i = 0; i < count; ++i) {
            Point p = sample_box(box, d, rng);
            NetworkFoot f1 = bvh.nearest(p);
            if (!(f1.distance < R)) continue;
            double t1 = arc_of_foot(curve, f1);
            double t2 = 0.0, d2 = 0.0;
            if (!search.second_foot(p, t1, t2, d2)) continue;
            if (!(d2 < R)) continue;
            if (d2 - f1.distance > band) continue;
            double sep = arc_separation(curve, t1, t2);
            if (sep < sep_min) continue;
            WitnessCandidate c{p, std::min(t1, t2), std::max(t1, t2), sep};
            best.push_back(c);
            if (best.size() > 8) {
                std::sort(best.begin(), best.end(),
                          [](const WitnessCandidate& a, const WitnessCandidate& b) {
                              return a.separation > b.separation;
                          });
                best.resize(8);
            }
        }
        return best;
    };
    auto partials = map_batches<std::vector<WitnessCandidate>>(seed, samples, kBatchSize,
                                                               candidates_of_batch);
    std::vector<WitnessCandidate> all;
    for (auto& part : partials) all.insert(all.end(), part.begin(), part.end());
    std::sort(all.begin(), all.end(), [](const WitnessCandidate& a, const WitnessCandidate& b) {
        if (a.separation != b.separation) return a.separation > b.separation;
        if (a.t1 != b.t1) return a.t1 < b.t1;
        return a.p.x() < b.p.x();
    });
    if (all.size() > 48) all.resize(48);

    std::optional<DoubleNearestWitness> best;
    double best_sep = 0.0;
    for (const WitnessCandidate& c : all) {
        auto w = search.refine(c);
        if (!w) continue;
        double sep = arc_separation(curve, w->t1, w->t2);
        if (!best || sep > best_sep) {
            best = w;
            best_sep = sep;
        }
    }
    return best;
}

TubeReport check_theorem_c11(const PolyCurve& curve, double R, std::uint64_t samples,
                             std::uint64_t seed, const TubeCheckOptions& options) {
    TubeReport report;
    report.curve_length = curve.length();
    report.radius = R;
    report.upper_bound = tube_upper_bound(curve.length(), R, curve.dim());

    const EmbeddedNetwork net = EmbeddedNetwork::from_curve(curve);
    McEstimate mc = tube_volume_mc(net, R, samples, seed);
    report.volume_estimate = mc.estimate;
    report.volume_ci_halfwidth = mc.ci_halfwidth;
    bool vol_eq = std::abs(mc.estimate - report.upper_bound) <= mc.ci_halfwidth;
    report.verdicts.volume_source = "mc";
    if (!vol_eq && curve.dim() == 2 && options.escalate_grid_2d) {
        double diam = diameter_estimate(curve.vertices());
        double cell = std::max(options.grid_cell_rel * diam, 1e-6);
        double area = grid_tube_area_2d(net, R, cell);
        double tol = 2.0 * (2.0 * curve.length() + 2.0 * std::numbers::pi * R) * cell;
        vol_eq = std::abs(area - report.upper_bound) <= tol;
        report.verdicts.volume_source = "grid";
    }
    report.verdicts.volume_equality = vol_eq;

    report.witness = find_double_nearest_witness(curve, R, samples, seed);
    if (!report.witness && curve.is_closed()) {
        // A closed parametrization fails uniqueness at the seam: points next
        // to gamma(0) are reached at both parameter ends.
        const auto& verts = curve.vertices();
        Point tangent = normalized(verts[1] - verts[0]);
        Point perp = curve.dim() == 2
                         ? make_point(-tangent.y(), tangent.x())
                         : normalized(cross3(tangent, make_point(0.13, 0.71, 0.69)));
        NetworkBvh bvh(net);
        const double len = curve.length();
        for (double sign : {1.0, -1.0}) {
            Point p = verts[0] + (sign * 0.5 * R) * perp;
            double w = std::min(0.45 * len, 2.0 * curve.max_edge_length());
            LocalFoot f1 = local_foot_range(curve, p, 0.0, w);
            LocalFoot f2 = local_foot_range(curve, p, len - w, len);
            double common = 0.5 * (f1.dist + f2.dist);
            if (std::abs(f1.dist - f2.dist) > kTieTol) continue;
            if (!(common < R) || common <= 0.0) continue;
            if (bvh.distance(p) < common - kTieTol) continue;
            report.witness = DoubleNearestWitness{p, f1.t, f2.t, common};
            break;
        }
    }
    report.verdicts.unique_nearest = !report.witness.has_value();

    // Evaluate curvature at the working resolution: the triple-circumradius
    // surrogate only sees a corner once the local edges are short against R.
    PolyCurve fine = resample(curve, std::min(curve.max_edge_length(), R / 64.0));
    report.curvature_estimate = fine.vertices().size() >= 3
                                    ? curvature_radius_estimate(fine)
                                    : std::numeric_limits<double>::infinity();
    report.verdicts.curvature_ok = report.curvature_estimate >= R;

    report.verdicts.agree = (report.verdicts.volume_equality == report.verdicts.unique_nearest) &&
                            (report.verdicts.volume_equality == report.verdicts.curvature_ok);
    report.equality = report.verdicts.volume_equality && report.verdicts.unique_nearest &&
                      report.verdicts.curvature_ok;
    return report;
}

McEstimate avg_distance_functional_mc(const EmbeddedNetwork& beta, const PolyCurve& domain,
                                      double R, DistanceWeight phi, std::uint64_t samples,
                                      std::uint64_t seed) {
    if (R <= 0.0) throw std::invalid_argument("avg_distance_functional: R must be positive");
    const EmbeddedNetwork domain_net = EmbeddedNetwork::from_curve(domain);
    NetworkBvh domain_bvh(domain_net);
    NetworkBvh beta_bvh(beta);
    const int d = domain.dim();
    const Box box = bounding_box(domain_net, R);
    const double vol = box_volume(box, d);

    struct Partial {
        double sum = 0.0;
        double sum_sq = 0.0;
    };
    auto partials = map_batches<Partial>(
        seed, samples, kBatchSize, [&](std::uint64_t, std::uint64_t count, Rng& rng) {
            Partial part;
            for (std::uint64_t i = 0; i < count; ++i) {
                Point p = sample_box(box, d, rng);
                if (domain_bvh.distance(p) >= R) continue;
                double dist = beta_bvh.distance(p);
                double v = phi == DistanceWeight::Identity ? dist : dist * dist;
                part.sum += v;
                part.sum_sq += v * v;
            }
            return part;
        });
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& part : partials) {
        sum += part.sum;
        sum_sq += part.sum_sq;
    }
    const double n = static_cast<double>(samples);
    const double mean = sum / n;
    const double var = std::max(sum_sq / n - mean * mean, 0.0);
    McEstimate out;
    out.estimate = vol * mean;
    out.ci_halfwidth = 3.0 * vol * std::sqrt(var / n);
    return out;
}

double avg_distance_functional(const EmbeddedNetwork& beta, const PolyCurve& domain, double R,
                               DistanceWeight phi, std::uint64_t samples, std::uint64_t seed) {
    return avg_distance_functional_mc(beta, domain, R, phi, samples, seed).estimate;
}

}  // namespace mdmkit
