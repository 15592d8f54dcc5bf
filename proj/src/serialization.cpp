#include "mdmkit/serialization.hpp"

#include <stdexcept>

namespace mdmkit::jsonio {

namespace {

[[noreturn]] void fail(const std::string& what) {
    throw std::runtime_error("schema violation: " + what);
}

std::string node_label(int id, int n_terminals) {
    return id < n_terminals ? "t" + std::to_string(id + 1)
                            : "s" + std::to_string(id - n_terminals + 1);
}

int node_id(const std::string& label, int n_terminals) {
    if (label.size() < 2 || (label[0] != 't' && label[0] != 's')) fail("bad node label " + label);
    int index = 0;
    try {
        index = std::stoi(label.substr(1));
    } catch (...) {
        fail("bad node label " + label);
    }
    if (index < 1) fail("bad node label " + label);
    return label[0] == 't' ? index - 1 : n_terminals + index - 1;
}

}  // namespace

json encode(const Point& p) {
    json j = json::array();
    for (int k = 0; k < p.dim; ++k) j.push_back(p[k]);
    return j;
}

Point decode_point(const json& j) {
    if (!j.is_array() || (j.size() != 2 && j.size() != 3)) fail("point must be [x,y] or [x,y,z]");
    Point p;
    p.dim = static_cast<int>(j.size());
    for (size_t k = 0; k < j.size(); ++k) {
        if (!j[k].is_number()) fail("point coordinate must be a number");
        p[static_cast<int>(k)] = j[k].get<double>();
    }
    if (!finite(p)) fail("point coordinate not finite");
    return p;
}

json encode(const PolyCurve& curve) {
    json verts = json::array();
    for (const Point& p : curve.vertices()) verts.push_back(encode(p));
    return json{{"vertices", verts}};
}

PolyCurve decode_curve(const json& j) {
    if (!j.is_object() || !j.contains("vertices")) fail("curve needs a \"vertices\" array");
    std::vector<Point> verts;
    for (const auto& v : j.at("vertices")) verts.push_back(decode_point(v));
    if (verts.size() < 2) fail("curve needs at least 2 vertices");
    return PolyCurve(std::move(verts));
}

json encode(const EmbeddedNetwork& net) {
    json nodes = json::array();
    for (const Point& p : net.nodes) nodes.push_back(encode(p));
    json edges = json::array();
    for (auto [i, j] : net.edges) edges.push_back(json::array({i, j}));
    return json{{"nodes", nodes}, {"edges", edges}};
}

EmbeddedNetwork decode_network(const json& j) {
    if (!j.is_object() || !j.contains("nodes")) fail("network needs a \"nodes\" array");
    EmbeddedNetwork net;
    for (const auto& v : j.at("nodes")) net.nodes.push_back(decode_point(v));
    if (j.contains("edges"))
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) fail("edge must be [i, j]");
            net.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
    net.validate();
    return net;
}

json encode(const Topology& topology) {
    json edges = json::array();
    for (auto [i, j] : topology.edges)
        edges.push_back(json::array(
            {node_label(i, topology.n_terminals), node_label(j, topology.n_terminals)}));
    return json{{"n", topology.n_terminals}, {"edges", edges}};
}

Topology decode_topology(const json& j) {
    if (!j.is_object() || !j.contains("n")) fail("topology needs \"n\"");
    Topology topology;
    topology.n_terminals = j.at("n").get<int>();
    if (j.contains("edges"))
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) fail("topology edge must be [label, label]");
            topology.edges.emplace_back(node_id(e[0].get<std::string>(), topology.n_terminals),
                                        node_id(e[1].get<std::string>(), topology.n_terminals));
        }
    return topology;
}

json encode(const Realization& realization) {
    json j = encode(realization.topology);
    json coords = json::object();
    for (size_t i = 0; i < realization.coords.size(); ++i)
        coords[node_label(static_cast<int>(i), realization.topology.n_terminals)] =
            encode(realization.coords[i]);
    j["coords"] = coords;
    j["length"] = realization.total_length;
    j["converged"] = realization.converged;
    return j;
}

Realization decode_realization(const json& j) {
    Realization realization;
    realization.topology = decode_topology(j);
    int m = realization.topology.node_count();
    realization.coords.resize(static_cast<size_t>(m));
    if (!j.contains("coords")) fail("realization needs \"coords\"");
    for (const auto& [label, value] : j.at("coords").items())
        realization.coords[static_cast<size_t>(node_id(label, realization.topology.n_terminals))] =
            decode_point(value);
    if (j.contains("length")) realization.total_length = j.at("length").get<double>();
    if (j.contains("converged")) realization.converged = j.at("converged").get<bool>();
    return realization;
}

json encode(const Instance& instance) {
    json j{{"dim", instance.dim}, {"r", instance.r}};
    if (!instance.points.empty()) {
        json pts = json::array();
        for (const Point& p : instance.points) pts.push_back(encode(p));
        j["points"] = pts;
    }
    if (!instance.polygon.empty()) {
        json poly = json::array();
        for (const Point& p : instance.polygon) poly.push_back(encode(p));
        j["polygon"] = poly;
    }
    return j;
}

Instance decode_instance(const json& j) {
    if (!j.is_object() || !j.contains("r")) fail("instance needs \"r\"");
    Instance instance;
    instance.r = j.at("r").get<double>();
    if (j.contains("dim")) instance.dim = j.at("dim").get<int>();
    if (j.contains("points"))
        for (const auto& v : j.at("points")) instance.points.push_back(decode_point(v));
    if (j.contains("polygon"))
        for (const auto& v : j.at("polygon")) instance.polygon.push_back(decode_point(v));
    if (!instance.points.empty() && instance.dim != instance.points.front().dim)
        instance.dim = instance.points.front().dim;
    instance.validate();
    return instance;
}

json encode(const DoubleNearestWitness& witness) {
    return json{{"p", encode(witness.p)},
                {"t1", witness.t1},
                {"t2", witness.t2},
                {"common_distance", witness.common_distance}};
}

json encode(const TubeReport& report) {
    json j{{"curve_length", report.curve_length},
           {"radius", report.radius},
           {"volume_estimate", report.volume_estimate},
           {"volume_ci_halfwidth", report.volume_ci_halfwidth},
           {"upper_bound", report.upper_bound},
           {"equality", report.equality},
           {"curvature_radius_estimate",
            std::isfinite(report.curvature_estimate) ? json(report.curvature_estimate)
                                                     : json("inf")},
           {"verdicts",
            json{{"volume_equality", report.verdicts.volume_equality},
                 {"unique_nearest", report.verdicts.unique_nearest},
                 {"curvature_ok", report.verdicts.curvature_ok},
                 {"agree", report.verdicts.agree},
                 {"volume_source", report.verdicts.volume_source}}}};
    j["witness"] = report.witness ? encode(*report.witness) : json(nullptr);
    return j;
}

json encode(const StructureReport& report) {
    json energetic = json::array();
    for (bool f : report.energetic) energetic.push_back(f);
    json pairs = json::array();
    for (const auto& cp : report.corresponding)
        pairs.push_back(json{{"node", cp.node}, {"y", encode(cp.y)}, {"distance", cp.distance}});
    json violations = json::array();
    for (const auto& v : report.violations)
        violations.push_back(json{
            {"kind", v.kind}, {"node", v.node}, {"value", v.value}, {"message", v.message}});
    return json{{"coverage_radius", report.coverage_radius},
                {"energetic", energetic},
                {"corresponding_points", pairs},
                {"violations", violations}};
}

json encode(const CornerInstance& instance) {
    json a = json::array();
    for (const Point& p : instance.a_points) a.push_back(encode(p));
    json v = json::array();
    for (const Point& p : instance.v_points) v.push_back(encode(p));
    return json{{"R", instance.R},       {"r", instance.r},
                {"N", instance.N},       {"k", instance.k},
                {"a_points", a},         {"v_points", v},
                {"phi_inf", instance.phi_inf}, {"a_inf", encode(instance.a_inf)},
                {"v_inf_plus1", encode(instance.v_inf_plus1)}};
}

}  // namespace mdmkit::jsonio
