#pragma once

#include <json.hpp>

#include "mdmkit/geometry.hpp"
#include "mdmkit/mdm.hpp"
#include "mdmkit/steiner.hpp"
#include "mdmkit/tube.hpp"

namespace mdmkit::jsonio {

using nlohmann::json;

// Point: [x, y] or [x, y, z]
json encode(const Point& p);
Point decode_point(const json& j);

// PolyCurve: {"vertices": [...]}
json encode(const PolyCurve& curve);
PolyCurve decode_curve(const json& j);

// EmbeddedNetwork: {"nodes": [...], "edges": [[i, j], ...]}
json encode(const EmbeddedNetwork& net);
EmbeddedNetwork decode_network(const json& j);

// Topology: {"n": 4, "edges": [["t1", "s1"], ...]}, labels 1-based
json encode(const Topology& topology);
Topology decode_topology(const json& j);

// Realization: topology plus {"coords": {"t1": [...], ...}, "length": x}
json encode(const Realization& realization);
Realization decode_realization(const json& j);

// Instance: {"dim": 2, "r": 0.05, "points": [...]} or {..., "polygon": [...]}
json encode(const Instance& instance);
Instance decode_instance(const json& j);

json encode(const DoubleNearestWitness& witness);
json encode(const TubeReport& report);
json encode(const StructureReport& report);
json encode(const CornerInstance& instance);

}  // namespace mdmkit::jsonio
