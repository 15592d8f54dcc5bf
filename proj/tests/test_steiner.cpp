#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mdmkit/rng.hpp"
#include "mdmkit/steiner.hpp"

using namespace mdmkit;

namespace {

std::vector<Point> unit_square() {
    return {make_point(0, 0), make_point(1, 0), make_point(1, 1), make_point(0, 1)};
}

std::vector<Point> equilateral_triangle() {
    return {make_point(0, 0), make_point(1, 0), make_point(0.5, std::numbers::sqrt3 / 2)};
}

}  // namespace

TEST_CASE("enumerate_full_topologies counts") {
    CHECK(enumerate_full_topologies(2).size() == 1);
    CHECK(enumerate_full_topologies(3).size() == 1);
    CHECK(enumerate_full_topologies(4).size() == 3);
    CHECK(enumerate_full_topologies(5).size() == 15);
    CHECK(enumerate_full_topologies(6).size() == 105);
    for (const Topology& t : enumerate_full_topologies(5)) CHECK(t.is_full());
    CHECK_THROWS_AS(enumerate_full_topologies(1), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_full_topologies(9), std::invalid_argument);
}

TEST_CASE("melzak on the equilateral triangle") {
    auto topologies = enumerate_full_topologies(3);
    auto realization = melzak_realize_2d(topologies[0], equilateral_triangle());
    REQUIRE(realization.has_value());
    CHECK(realization->total_length == doctest::Approx(std::numbers::sqrt3).epsilon(1e-12));
    // Fermat point of the equilateral triangle is its centroid.
    Point centroid = make_point(0.5, std::numbers::sqrt3 / 6);
    CHECK(distance(realization->coords[3], centroid) < 1e-12);
}

TEST_CASE("melzak on the unit square") {
    auto topologies = enumerate_full_topologies(4);
    int realizable = 0;
    int optimal = 0;
    const double expected = 1.0 + std::numbers::sqrt3;
    for (const Topology& topology : topologies) {
        auto realization = melzak_realize_2d(topology, unit_square());
        if (!realization) continue;
        ++realizable;
        if (std::abs(realization->total_length - expected) < 1e-9) ++optimal;
        else CHECK(realization->total_length > expected);
    }
    CHECK(optimal == 2);  // the two parallel pairings
    CHECK(realizable >= 2);
}

TEST_CASE("realize_convex matches melzak") {
    auto topologies = enumerate_full_topologies(3);
    std::vector<TerminalSpec> fixed;
    for (const Point& p : equilateral_triangle()) fixed.push_back(p);
    Realization convex = realize_convex(topologies[0], fixed);
    CHECK(convex.converged);
    CHECK(convex.total_length == doctest::Approx(std::numbers::sqrt3).epsilon(1e-9));
}

TEST_CASE("melzak vs realize_convex on random planar sets") {
    Rng rng(61);
    for (int trial = 0; trial < 12; ++trial) {
        int n = 3 + static_cast<int>(rng.bits() % 4);  // 3..6
        std::vector<Point> pts;
        for (int i = 0; i < n; ++i) pts.push_back(make_point(rng.uniform(), rng.uniform()));
        std::vector<TerminalSpec> fixed(pts.begin(), pts.end());
        for (const Topology& topology : enumerate_full_topologies(n)) {
            auto exact = melzak_realize_2d(topology, pts);
            if (!exact) continue;
            Realization convex = realize_convex(topology, fixed);
            CHECK(convex.total_length ==
                  doctest::Approx(exact->total_length).epsilon(1e-9));
        }
    }
}

TEST_CASE("realize_convex with disk constraints: two disks") {
    Topology edge;
    edge.n_terminals = 2;
    edge.edges = {{0, 1}};
    double D = 2.0, r = 0.4;
    std::vector<TerminalSpec> disks{DiskConstraint{make_point(0, 0), r},
                                    DiskConstraint{make_point(D, 0), r}};
    Realization chain = realize_convex(edge, disks);
    CHECK(chain.total_length == doctest::Approx(D - 2 * r).epsilon(1e-9));
}

TEST_CASE("realize_convex on the regular tetrahedron") {
    std::vector<Point> tetra{
        make_point(1, 1, 1), make_point(1, -1, -1), make_point(-1, 1, -1), make_point(-1, -1, 1)};
    std::vector<TerminalSpec> fixed(tetra.begin(), tetra.end());
    std::vector<double> lengths;
    for (const Topology& topology : enumerate_full_topologies(4))
        lengths.push_back(realize_convex(topology, fixed).total_length);
    CHECK(lengths[0] == doctest::Approx(lengths[1]).epsilon(1e-9));
    CHECK(lengths[1] == doctest::Approx(lengths[2]).epsilon(1e-9));
    CHECK(lengths[0] > 2.0 * std::numbers::sqrt3 - 1e-9);  // above the MST/2 scale sanity
}

TEST_CASE("steiner_tree basics") {
    auto two = steiner_tree({make_point(0, 0), make_point(2, 1)});
    REQUIRE(two.size() == 1);
    CHECK(two[0].total_length == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));

    auto triangle = steiner_tree(equilateral_triangle());
    REQUIRE(triangle.size() == 1);
    CHECK(triangle[0].total_length == doctest::Approx(std::numbers::sqrt3).epsilon(1e-9));

    CHECK_THROWS_AS(steiner_tree({make_point(0, 0)}), std::invalid_argument);
}

TEST_CASE("steiner_tree on the square reports exactly two tied optima") {
    auto optima = steiner_tree(unit_square());
    REQUIRE(optima.size() == 2);
    const double expected = 1.0 + std::numbers::sqrt3;
    for (const Realization& r : optima) {
        CHECK(r.total_length == doctest::Approx(expected).epsilon(1e-9));
        CHECK(validate_locally_minimal(r, 1e-6).empty());
    }
}

TEST_CASE("steiner_tree is invariant under rigid motion and scales under dilation") {
    Rng rng(67);
    std::vector<Point> pts;
    for (int i = 0; i < 5; ++i) pts.push_back(make_point(rng.uniform(), rng.uniform()));
    double base = steiner_tree(pts)[0].total_length;

    double theta = 0.83, tx = 2.5, ty = -1.25, scale = 3.7;
    std::vector<Point> moved, scaled;
    for (const Point& p : pts) {
        moved.push_back(make_point(std::cos(theta) * p.x() - std::sin(theta) * p.y() + tx,
                                   std::sin(theta) * p.x() + std::cos(theta) * p.y() + ty));
        scaled.push_back(make_point(scale * p.x(), scale * p.y()));
    }
    CHECK(steiner_tree(moved)[0].total_length == doctest::Approx(base).epsilon(1e-9));
    CHECK(steiner_tree(scaled)[0].total_length == doctest::Approx(scale * base).epsilon(1e-9));
}

TEST_CASE("steiner_tree solutions validate as locally minimal") {
    Rng rng(71);
    for (int trial = 0; trial < 6; ++trial) {
        std::vector<Point> pts;
        for (int i = 0; i < 5; ++i) pts.push_back(make_point(rng.uniform(), rng.uniform()));
        auto optima = steiner_tree(pts);
        REQUIRE(!optima.empty());
        CHECK(validate_locally_minimal(optima[0], 1e-6).empty());
    }
}

TEST_CASE("validate_locally_minimal catches violations") {
    // Plus sign: a degree-4 node.
    Topology plus;
    plus.n_terminals = 4;
    plus.edges = {{0, 4}, {1, 4}, {2, 4}, {3, 4}};
    Realization bad;
    bad.topology = plus;
    bad.coords = {make_point(1, 0), make_point(0, 1), make_point(-1, 0), make_point(0, -1),
                  make_point(0, 0)};
    bad.total_length = 4.0;
    auto violations = validate_locally_minimal(bad, 1e-6);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].kind == "degree");

    // Right-angle path corner: angle pi/2 below 2*pi/3.
    Topology path;
    path.n_terminals = 3;
    path.edges = {{0, 2}, {2, 1}};
    Realization corner;
    corner.topology = path;
    corner.coords = {make_point(1, 0), make_point(0, 1), make_point(0, 0)};
    corner.total_length = 2.0;
    violations = validate_locally_minimal(corner, 1e-6);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].kind == "path-angle");
    CHECK(violations[0].value == doctest::Approx(std::numbers::pi / 2));
}

TEST_CASE("length_interpolation and convexity") {
    Rng rng(73);
    Topology topology = enumerate_full_topologies(4)[0];
    int m = topology.node_count();
    auto random_realization = [&]() {
        Realization r;
        r.topology = topology;
        for (int i = 0; i < m; ++i) r.coords.push_back(make_point(rng.uniform(), rng.uniform()));
        double len = 0.0;
        for (auto [a, b] : topology.edges) len += distance(r.coords[static_cast<size_t>(a)], r.coords[static_cast<size_t>(b)]);
        r.total_length = len;
        return r;
    };

    Realization s0 = random_realization();
    CHECK(length_interpolation(s0, s0, 0.3) == doctest::Approx(s0.total_length).epsilon(1e-12));

    Realization s1 = random_realization();
    CHECK(length_interpolation(s0, s1, 0.0) == doctest::Approx(s1.total_length).epsilon(1e-15));
    CHECK(length_interpolation(s0, s1, 1.0) == doctest::Approx(s0.total_length).epsilon(1e-15));

    for (int trial = 0; trial < 100; ++trial) {
        Realization a = random_realization();
        Realization b = random_realization();
        for (int k = 0; k <= 10; ++k) {
            double alpha = k / 10.0;
            double mid = length_interpolation(a, b, alpha);
            CHECK(mid <= alpha * a.total_length + (1 - alpha) * b.total_length + 1e-12);
        }
    }

    Topology other = enumerate_full_topologies(4)[1];
    Realization mismatched;
    mismatched.topology = other;
    mismatched.coords = s0.coords;
    CHECK_THROWS_AS(length_interpolation(s0, mismatched, 0.5), std::invalid_argument);
}

TEST_CASE("disk-constrained minimum is unique and boundary-orthogonal") {
    Rng rng(79);
    for (int trial = 0; trial < 5; ++trial) {
        // Strictly separated disks around a random triangle.
        std::vector<Point> centers;
        for (int i = 0; i < 3; ++i)
            centers.push_back(make_point(3.0 * rng.uniform(), 3.0 * rng.uniform()));
        double min_gap = 1e9;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) min_gap = std::min(min_gap, distance(centers[static_cast<size_t>(i)], centers[static_cast<size_t>(j)]));
        if (min_gap < 1.0) continue;
        double r = 0.2 * min_gap;
        std::vector<TerminalSpec> disks;
        for (const Point& c : centers) disks.push_back(DiskConstraint{c, r});
        Topology topology = enumerate_full_topologies(3)[0];

        RealizeOptions run_a, run_b;
        run_a.init_seed = 1000 + static_cast<std::uint64_t>(trial);
        run_b.init_seed = 2000 + static_cast<std::uint64_t>(trial);
        Realization a = realize_convex(topology, disks, run_a);
        Realization b = realize_convex(topology, disks, run_b);
        // Hausdorff agreement of the node sets (labels may slide along a
        // collapsed configuration).
        double hausdorff = 0.0;
        for (const Point& p : a.coords) {
            double best = 1e300;
            for (const Point& q : b.coords) best = std::min(best, distance(p, q));
            hausdorff = std::max(hausdorff, best);
        }
        for (const Point& p : b.coords) {
            double best = 1e300;
            for (const Point& q : a.coords) best = std::min(best, distance(p, q));
            hausdorff = std::max(hausdorff, best);
        }
        CHECK(hausdorff < 1e-6);

        // Degree-1 constrained terminals sit on the boundary with the edge
        // along the radius (skip terminals the Steiner node collapsed onto).
        for (int i = 0; i < 3; ++i) {
            Point steiner_node = a.coords[3];
            if (distance(a.coords[static_cast<size_t>(i)], steiner_node) < 1e-7) continue;
            double dist_c = distance(a.coords[static_cast<size_t>(i)], centers[static_cast<size_t>(i)]);
            CHECK(dist_c == doctest::Approx(r).epsilon(1e-9));
            double ang = angle_at(a.coords[static_cast<size_t>(i)], centers[static_cast<size_t>(i)], steiner_node);
            CHECK(std::abs(ang - std::numbers::pi) < 1e-5);
        }
    }
}

TEST_CASE("stadium constraints admit many equal-length networks (strict convexity matters)") {
    // Viviani: inside an equilateral triangle the distances to the three
    // sides sum to the altitude, so every orthogonal tripod between the
    // stadium-shaped constraint sets of the figure has the same length.
    Rng rng(83);
    Point a = make_point(0, 0), b = make_point(1, 0), c = make_point(0.5, std::numbers::sqrt3 / 2);
    double altitude = std::numbers::sqrt3 / 2;
    auto side_distance = [](const Point& p, const Point& u, const Point& v) {
        return std::abs(cross2(v - u, p - u)) / distance(u, v);
    };
    for (int trial = 0; trial < 20; ++trial) {
        // Random interior point via barycentric coordinates.
        double w1 = rng.uniform(), w2 = rng.uniform(0.0, 1.0 - w1);
        double w3 = 1.0 - w1 - w2;
        Point p = w1 * a + (w2 * b + w3 * c);
        double tripod = side_distance(p, a, b) + side_distance(p, b, c) + side_distance(p, c, a);
        CHECK(tripod == doctest::Approx(altitude).epsilon(1e-12));
    }
}
