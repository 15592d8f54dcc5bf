#include <cmath>
#include <numbers>

#include "mdmkit/mdm.hpp"

namespace mdmkit {

namespace {

// Central angle subtending a chord of length c on a circle of radius R,
// solved by bisection (the mapping 2R sin(theta/2) is monotone on [0, pi]).
double chord_angle(double R, double c) {
    double lo = 0.0, hi = std::numbers::pi;
    for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
        double mid = 0.5 * (lo + hi);
        if (2.0 * R * std::sin(0.5 * mid) < c) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

Point on_circle(double R, double phi) { return make_point(R * std::cos(phi), R * std::sin(phi)); }

// Unit direction from the circle point at angle `from` toward the point at
// angle `to`: the chord direction in closed form, free of cancellation.
Point chord_direction(double from, double to) {
    double m = 0.5 * (from + to);
    double s = std::sin(0.5 * (to - from)) >= 0.0 ? 1.0 : -1.0;
    return make_point(-s * std::sin(m), s * std::cos(m));
}

}  // namespace

Instance CornerInstance::instance() const {
    Instance inst;
    inst.dim = 2;
    inst.r = r;
    inst.points = v_points;
    return inst;
}

PolyCurve CornerInstance::expected_polyline() const { return PolyCurve(a_points); }

CornerInstance build_corner_instance(double R, double r, int N, int k) {
    if (R <= 0.0 || r <= 0.0) throw std::invalid_argument("build_corner_instance: R, r > 0");
    if (k < 2) throw std::invalid_argument("build_corner_instance: k must be at least 2");
    if (N < 1) throw std::invalid_argument("build_corner_instance: N must be positive");
    const double c1 = r / static_cast<double>(N);
    if (c1 >= 2.0 * R) throw std::invalid_argument("build_corner_instance: N too small");

    CornerInstance out;
    out.R = R;
    out.r = r;
    out.N = N;
    out.k = k;

    // Chord angles theta_i for chords c_1, c_1/2, c_1/4, ...
    std::vector<double> theta(static_cast<size_t>(k + 1));
    double c = c1;
    for (int i = 0; i <= k; ++i) {
        theta[static_cast<size_t>(i)] = chord_angle(R, c);
        c *= 0.5;
    }
    // The inscribed-angle condition at a_{i+1} is theta_i + theta_{i+1} < pi.
    for (int i = 0; i + 1 <= k; ++i)
        if (theta[static_cast<size_t>(i)] + theta[static_cast<size_t>(i + 1)] >= std::numbers::pi)
            throw std::invalid_argument("build_corner_instance: N too small (chord angle)");

    // Central angles, a_1 at phi = 0 to keep chord arithmetic well
    // conditioned.
    out.a_phi.resize(static_cast<size_t>(k + 2));
    out.a_phi[0] = 0.0;
    for (int i = 0; i <= k; ++i) out.a_phi[static_cast<size_t>(i + 1)] = out.a_phi[static_cast<size_t>(i)] + theta[static_cast<size_t>(i)];

    // phi_inf: the full converging sum of chord angles.
    double phi_inf = 0.0;
    double comp = 0.0;
    double ci = c1;
    for (int i = 0; i < 1200; ++i) {
        double term = i <= k ? theta[static_cast<size_t>(i)] : 2.0 * std::asin(ci / (2.0 * R));
        double y = term - comp;
        double t = phi_inf + y;
        comp = (t - phi_inf) - y;
        phi_inf = t;
        ci *= 0.5;
        if (term < 1e-22) break;
    }
    out.phi_inf = phi_inf;

    std::vector<Point> a(static_cast<size_t>(k + 2));
    for (int i = 1; i <= k + 1; ++i) a[static_cast<size_t>(i)] = on_circle(R, out.a_phi[static_cast<size_t>(i - 1)]);
    out.a_inf = on_circle(R, phi_inf);

    // v_1 sits at distance r from a_1 on the chord line, away from a_2.
    Point v1 = a[1] - r * chord_direction(out.a_phi[0], out.a_phi[1]);
    out.v_points.push_back(v1);
    // Interior v_i on the exterior bisector: direction (cos mu, sin mu) with
    // mu = (phi_{i-1} + 2 phi_i + phi_{i+1}) / 4, which bisects the two chord
    // directions exactly.
    for (int i = 2; i <= k; ++i) {
        double mu = (out.a_phi[static_cast<size_t>(i - 2)] + 2.0 * out.a_phi[static_cast<size_t>(i - 1)] +
                     out.a_phi[static_cast<size_t>(i)]) /
                    4.0;
        out.v_points.push_back(a[static_cast<size_t>(i)] + r * make_point(std::cos(mu), std::sin(mu)));
    }

    // Forward tangent at a_inf; v_inf radially outward; v_{inf+1} on the
    // tangent at distance r.
    Point tangent = make_point(-std::sin(phi_inf), std::cos(phi_inf));
    out.v_inf = on_circle(R + r, phi_inf);
    out.v_inf_plus1 = out.a_inf + r * tangent;

    // Reflected ray at a_k: reflect the direction toward a_{k-1} across the
    // bisector direction toward v_k; the terminal point v^k_inf is the
    // closest point to v_{inf+1} on that ray.
    Point w = chord_direction(out.a_phi[static_cast<size_t>(k - 1)], out.a_phi[static_cast<size_t>(k - 2)]);
    Point bis = normalized(out.v_points[static_cast<size_t>(k - 1)] - a[static_cast<size_t>(k)]);
    Point refl = 2.0 * dot(w, bis) * bis - w;
    refl = normalized(refl);
    double t = std::max(0.0, dot(out.v_inf_plus1 - a[static_cast<size_t>(k)], refl));
    Point v_k_inf = a[static_cast<size_t>(k)] + t * refl;
    out.v_points.push_back(v_k_inf);

    if (t <= r)
        throw std::invalid_argument("build_corner_instance: truncated terminal collapses (N too small)");
    Point a_k_inf = a[static_cast<size_t>(k)] + (t - r) * refl;

    out.a_points.assign(a.begin() + 1, a.begin() + 1 + k);
    out.a_points.push_back(a_k_inf);
    out.a_phi.resize(static_cast<size_t>(k + 1));  // angles of a_1..a_{k+1}
    return out;
}

}  // namespace mdmkit
