#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "mdmkit/mdm.hpp"
#include "mdmkit/serialization.hpp"
#include "mdmkit/steiner.hpp"
#include "mdmkit/svg.hpp"
#include "mdmkit/tube.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";

using nlohmann::json;
using namespace mdmkit;

struct Config {
    std::string subcommand;
    std::string input_path;
    std::string output_path;
    std::string svg_path;
    std::uint64_t seed = 42;
    std::uint64_t samples = 1000000;
    double r_override = -1.0;
    double tol = 1e-6;
};

json read_input(const Config& config) {
    std::ifstream in(config.input_path);
    if (!in) throw std::runtime_error("cannot open input file: " + config.input_path);
    json j;
    in >> j;
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
}

json run_steiner(const Config& config, const json& input, SvgScene& scene) {
    if (!input.contains("points")) throw std::runtime_error("schema violation: needs \"points\"");
    std::vector<Point> points;
    for (const auto& v : input.at("points")) points.push_back(jsonio::decode_point(v));
    std::vector<Realization> optima = steiner_tree(points);
    json list = json::array();
    for (const Realization& r : optima) {
        list.push_back(jsonio::encode(r));
        scene.add_network(r.as_network());
    }
    scene.add_m_points(points);
    return json{{"optima", list},
                {"tie_count", optima.size()},
                {"length", optima.front().total_length}};
}

json run_solve(const Config& config, const json& input, SvgScene& scene) {
    Instance instance = jsonio::decode_instance(input);
    if (config.r_override > 0.0) instance.r = config.r_override;
    std::vector<Realization> optima = solve_finite_m(instance);
    json list = json::array();
    for (const Realization& r : optima) {
        list.push_back(jsonio::encode(r));
        scene.add_network(r.as_network());
    }
    scene.add_m_points(instance.points);
    scene.add_disks(instance.points, instance.r);
    double coverage = coverage_radius(optima.front().as_network(), instance.points);
    return json{{"optima", list},
                {"tie_count", optima.size()},
                {"length", optima.front().total_length},
                {"coverage_radius", coverage},
                {"r", instance.r}};
}

json run_bounds(const Config& config, const json& input, SvgScene&) {
    Instance instance = jsonio::decode_instance(input);
    if (config.r_override > 0.0) instance.r = config.r_override;
    if (!instance.has_polygon())
        throw std::runtime_error("schema violation: bounds needs a polygon instance");
    const double area = polygon_area(instance.polygon);
    const double perimeter_bound = lower_bound_perimeter(instance.polygon, instance.r);
    const double volume_bound = lower_bound_volume(area, instance.r, 2);
    return json{{"perimeter_bound", perimeter_bound},
                {"volume_bound", volume_bound},
                {"area", area},
                {"perimeter", polygon_perimeter(convex_hull_2d(instance.polygon))}};
}

json run_tube_check(const Config& config, const json& input, SvgScene& scene) {
    PolyCurve curve = jsonio::decode_curve(input);
    double R = config.r_override > 0.0
                   ? config.r_override
                   : (input.contains("R") ? input.at("R").get<double>() : -1.0);
    if (R <= 0.0) throw std::runtime_error("schema violation: tube-check needs R (or --r)");
    TubeReport report = check_theorem_c11(curve, R, config.samples, config.seed);
    scene.add_curve(curve);
    if (curve.dim() == 2) scene.add_tube_boundary(boundary_pieces_2d(EmbeddedNetwork::from_curve(curve), R));
    if (report.witness) scene.add_witness(report.witness->p);
    return jsonio::encode(report);
}

json run_corner_example(const Config& config, const json& input, SvgScene& scene) {
    double R = input.value("R", 1.0);
    double r = input.value("r", 0.01);
    int N = input.value("N", 100);
    int k = input.value("k", 10);
    if (config.r_override > 0.0) r = config.r_override;
    CornerInstance instance = build_corner_instance(R, r, N, k);
    Realization chain = chain_solve(instance.v_points, r, config.seed);
    scene.add_network(chain.as_network());
    scene.add_m_points(instance.v_points);
    scene.add_disks(instance.v_points, r);
    StructureReport report =
        validate_minimizer_structure(chain.as_network(), instance.instance(), config.tol);
    return json{{"instance", jsonio::encode(instance)},
                {"chain", jsonio::encode(chain)},
                {"structure", jsonio::encode(report)}};
}

json run_validate(const Config& config, const json& input, SvgScene& scene, int& exit_code) {
    if (!input.contains("network") || !input.contains("instance"))
        throw std::runtime_error("schema violation: validate needs \"network\" and \"instance\"");
    EmbeddedNetwork net = jsonio::decode_network(input.at("network"));
    Instance instance = jsonio::decode_instance(input.at("instance"));
    if (config.r_override > 0.0) instance.r = config.r_override;
    StructureReport report = validate_minimizer_structure(net, instance, config.tol);
    scene.add_network(net);
    scene.add_m_points(instance.points);
    scene.add_disks(instance.points, instance.r);
    if (!report.ok()) exit_code = 2;
    return jsonio::encode(report);
}

json run_avg_distance(const Config& config, const json& input, SvgScene& scene) {
    if (!input.contains("beta") || !input.contains("domain"))
        throw std::runtime_error("schema violation: avg-distance needs \"beta\" and \"domain\"");
    EmbeddedNetwork beta = jsonio::decode_network(input.at("beta"));
    PolyCurve domain = jsonio::decode_curve(input.at("domain"));
    double R = config.r_override > 0.0 ? config.r_override : input.value("R", -1.0);
    if (R <= 0.0) throw std::runtime_error("schema violation: avg-distance needs R (or --r)");
    std::string phi_name = input.value("phi", "identity");
    DistanceWeight phi;
    if (phi_name == "identity") phi = DistanceWeight::Identity;
    else if (phi_name == "square") phi = DistanceWeight::Square;
    else throw std::runtime_error("schema violation: phi must be \"identity\" or \"square\"");
    McEstimate estimate =
        avg_distance_functional_mc(beta, domain, R, phi, config.samples, config.seed);
    scene.add_network(beta);
    scene.add_curve(domain);
    return json{{"estimate", estimate.estimate},
                {"ci_halfwidth", estimate.ci_halfwidth},
                {"phi", phi_name},
                {"R", R}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mdmkit: tube volumes, Steiner trees and maximal distance minimizers"};
    app.require_subcommand(1);

    Config config;
    const std::vector<std::string> names{"steiner",        "solve",    "bounds",      "tube-check",
                                         "corner-example", "validate", "avg-distance"};
    for (const std::string& name : names) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--input", config.input_path, "input JSON path")->required();
        sub->add_option("--output", config.output_path, "output JSON path (default stdout)");
        sub->add_option("--svg", config.svg_path, "SVG overlay path");
        sub->add_option("--seed", config.seed, "RNG seed");
        sub->add_option("--samples", config.samples, "Monte Carlo samples");
        sub->add_option("--r", config.r_override, "radius override");
        sub->add_option("--tol", config.tol, "validation tolerance");
    }

    CLI11_PARSE(app, argc, argv);
    config.subcommand = app.get_subcommands().front()->get_name();

    int exit_code = 0;
    try {
        json input = read_input(config);
        SvgScene scene;
        json payload;
        if (config.subcommand == "steiner") payload = run_steiner(config, input, scene);
        else if (config.subcommand == "solve") payload = run_solve(config, input, scene);
        else if (config.subcommand == "bounds") payload = run_bounds(config, input, scene);
        else if (config.subcommand == "tube-check") payload = run_tube_check(config, input, scene);
        else if (config.subcommand == "corner-example")
            payload = run_corner_example(config, input, scene);
        else if (config.subcommand == "validate")
            payload = run_validate(config, input, scene, exit_code);
        else if (config.subcommand == "avg-distance")
            payload = run_avg_distance(config, input, scene);

        json out{{"tool_version", kToolVersion},
                 {"seed", config.seed},
                 {"samples", config.samples},
                 {"config_echo",
                  json{{"subcommand", config.subcommand},
                       {"input", config.input_path},
                       {"r_override", config.r_override},
                       {"tol", config.tol}}},
                 {"payload", payload}};
        write_text(config.output_path, out.dump(2) + "\n");
        if (!config.svg_path.empty()) write_text(config.svg_path, scene.render());
    } catch (const std::exception& e) {
        json err{{"error", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return exit_code;
}
