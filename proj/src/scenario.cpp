#include "wsnq/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "wsnq/error.hpp"
#include "wsnq/query_validator.hpp"

namespace wsnq {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& path, const std::string& reason) {
    fail(ErrorCode::SchemaError, "scenario error at " + path + ": " + reason);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) schema_error(path, "missing field '" + key + "'");
    return *it;
}

std::string require_string(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_string()) schema_error(path + "." + key, "expected a string");
    return v.get<std::string>();
}

GeoCoordinate parse_coordinate(const json& obj, const std::string& path, bool latitude) {
    GeoCoordinate c;
    c.degrees = require(obj, "degrees", path).get<int>();
    c.minutes = require(obj, "minutes", path).get<int>();
    std::string hemisphere = require_string(obj, "hemisphere", path);
    if (hemisphere.size() != 1) schema_error(path, "hemisphere must be one letter");
    c.hemisphere = hemisphere[0];
    if (latitude && c.hemisphere != 'N' && c.hemisphere != 'S')
        schema_error(path, "latitude hemisphere must be N or S");
    if (!latitude && c.hemisphere != 'E' && c.hemisphere != 'W')
        schema_error(path, "longitude hemisphere must be E or W");
    return c;
}

Distribution parse_distribution(const json& obj, const std::string& path) {
    Distribution dist;
    if (obj.contains("uniform")) {
        const json& arr = obj["uniform"];
        if (!arr.is_array() || arr.size() != 2) schema_error(path, "uniform needs [lo, hi]");
        dist.kind = Distribution::Kind::Uniform;
        dist.lo = arr[0].get<double>();
        dist.hi = arr[1].get<double>();
        if (dist.hi < dist.lo) schema_error(path, "uniform bounds reversed");
    } else if (obj.contains("trace")) {
        const json& arr = obj["trace"];
        if (!arr.is_array() || arr.empty()) schema_error(path, "trace needs a non-empty array");
        dist.kind = Distribution::Kind::Trace;
        for (const auto& v : arr) dist.trace.push_back(v.get<double>());
    } else {
        schema_error(path, "distribution needs 'uniform' or 'trace'");
    }
    return dist;
}

Role parse_role(const std::string& text, const std::string& path) {
    if (text == "sink") return Role::Sink;
    if (text == "fusion") return Role::Fusion;
    if (text == "cluster_head") return Role::ClusterHead;
    if (text == "sensor") return Role::Sensor;
    schema_error(path, "unknown role '" + text + "'");
}

}  // namespace

Scenario parse_scenario(const std::string& json_text, const std::string& name) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        fail(ErrorCode::SchemaError, "scenario '" + name + "' is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) fail(ErrorCode::SchemaError, "scenario root must be an object");

    Scenario scenario;
    scenario.name = name;
    scenario.seed = doc.value("seed", 0ull);
    if (doc.contains("strategy")) scenario.strategy_override = doc["strategy"].get<std::string>();
    if (doc.contains("queries"))
        for (const auto& q : doc["queries"]) scenario.queries.push_back(q.get<std::string>());

    if (doc.contains("energy_rates")) {
        const json& rates = doc["energy_rates"];
        scenario.cost.transmit_per_byte = rates.value("transmit_per_byte", 1.0);
        scenario.cost.receive_per_byte = rates.value("receive_per_byte", 0.5);
        scenario.cost.sample_cost = rates.value("sample", 2.0);
    }
    if (doc.contains("wire")) {
        const json& wire = doc["wire"];
        scenario.wire.psr_payload_bytes = wire.value("psr_payload_bytes", 8);
        scenario.wire.group_tag_bytes = wire.value("group_tag_bytes", 4);
        scenario.wire.min_tuple_bytes = wire.value("min_tuple_bytes", 8);
        scenario.wire.control_bytes = wire.value("control_bytes", 0);
        scenario.wire.metadata_bytes = wire.value("metadata_bytes", 0);
    }
    if (doc.contains("timing")) {
        const json& timing = doc["timing"];
        scenario.timing.hop_latency_us = timing.value("hop_latency_us", int64_t{1000});
        scenario.timing.slot_delta_us = timing.value("slot_delta_us", int64_t{2000});
        scenario.timing.default_epoch_seconds = timing.value("default_epoch_seconds", int64_t{1});
    }

    // Networks -> global catalog.
    for (const auto& net : require(doc, "networks", "scenario")) {
        std::string path = "networks";
        GlobalWsnDescriptor descriptor;
        descriptor.network_id = require_string(net, "network_id", path);
        path += "." + descriptor.network_id;
        descriptor.node_count = require(net, "node_count", path).get<int>();
        const json& location = require(net, "location", path);
        descriptor.location.latitude =
            parse_coordinate(require(location, "latitude", path), path + ".latitude", true);
        descriptor.location.longitude =
            parse_coordinate(require(location, "longitude", path), path + ".longitude", false);
        for (const auto& p : require(net, "phenomena", path))
            descriptor.phenomena.insert(p.get<std::string>());
        for (const auto& [phenomenon, unit] : require(net, "data_units", path).items())
            descriptor.data_units[phenomenon] = unit.get<std::string>();
        scenario.global_catalog.register_wsn(std::move(descriptor));
    }

    // Generator schemas -> generator config + attribute map. The key
    // "phenomena" is accepted as an alias of "generators".
    const char* generators_key = doc.contains("generators") ? "generators" : "phenomena";
    for (const auto& spec_json : require(doc, generators_key, "scenario")) {
        PhenomenonSpec spec;
        spec.phenomenon = require_string(spec_json, "name", generators_key);
        std::string path = std::string(generators_key) + "." + spec.phenomenon;
        for (const auto& attr_json : require(spec_json, "attributes", path)) {
            AttributeSpec attr;
            attr.name = require_string(attr_json, "name", path);
            attr.size_bytes = attr_json.value("size_bytes", 8);
            if (attr.size_bytes <= 0) schema_error(path + "." + attr.name, "size must be positive");
            if (is_builtin_attribute(attr.name))
                schema_error(path + "." + attr.name, "attribute shadows a built-in");
            if (scenario.global_catalog.phenomenon_of(attr.name))
                schema_error(path + "." + attr.name, "attribute registered twice");
            scenario.global_catalog.map_attribute(attr.name, spec.phenomenon);
            spec.attributes.push_back(std::move(attr));
        }
        if (spec_json.contains("distribution"))
            spec.default_distribution =
                parse_distribution(spec_json["distribution"], path + ".distribution");
        std::vector<std::string> schema;
        for (const auto& attr : spec.attributes) schema.push_back(attr.name);
        scenario.global_catalog.set_schema(spec.phenomenon, schema);
        scenario.generator.phenomena.emplace(spec.phenomenon, std::move(spec));
    }

    // Nodes and edges -> topology.
    for (const auto& node_json : require(doc, "nodes", "scenario")) {
        NodeInfo info;
        info.id = require_string(node_json, "id", "nodes");
        std::string path = "nodes." + info.id;
        info.role = parse_role(require_string(node_json, "role", path), path);
        info.network_id = node_json.value("network", "");
        info.cluster_id = node_json.value("cluster", "");
        if (info.role == Role::ClusterHead) info.cluster_id = info.id;
        info.region = node_json.value("region", "");
        info.phenomenon = node_json.value("phenomenon", "");
        if (info.senses() && info.role != Role::Sensor && info.role != Role::ClusterHead)
            schema_error(path, "only sensors and cluster heads sample a phenomenon");
        if (info.senses() && !scenario.generator.phenomena.count(info.phenomenon))
            schema_error(path, "phenomenon '" + info.phenomenon + "' has no generator config");
        if (node_json.contains("trace")) {
            for (const auto& [attr, arr] : node_json["trace"].items()) {
                Distribution dist;
                dist.kind = Distribution::Kind::Trace;
                for (const auto& v : arr) dist.trace.push_back(v.get<double>());
                if (dist.trace.empty()) schema_error(path + ".trace." + attr, "empty trace");
                scenario.generator.node_overrides[info.id][attr] = std::move(dist);
            }
        }
        scenario.topology.add_node(std::move(info));
    }
    for (const auto& edge_json : require(doc, "edges", "scenario")) {
        std::string a = require_string(edge_json, "a", "edges");
        std::string b = require_string(edge_json, "b", "edges");
        double weight = edge_json.value("weight", 1.0);
        if (weight <= 0) schema_error("edges", "edge weight must be positive");
        scenario.topology.add_edge(a, b, weight);
    }
    scenario.topology.finalize_ordinals();
    scenario.topology.validate();

    // Sensors must name a network through their cluster head.
    for (const auto& [id, info] : scenario.topology.nodes()) {
        if (info.role == Role::ClusterHead &&
            !scenario.global_catalog.has_network(info.network_id))
            schema_error("nodes." + id, "cluster head names unregistered network '" +
                                            info.network_id + "'");
    }

    // Cluster catalogs: the head registers itself, then its members.
    std::map<std::string, std::pair<std::string, std::string>> hardware;  // id -> (mote, sensor)
    for (const auto& node_json : require(doc, "nodes", "scenario")) {
        std::string id = require_string(node_json, "id", "nodes");
        hardware[id] = {node_json.value("mote_type", "Mica Mote"),
                        node_json.value("sensor_type", "")};
    }
    for (const auto& head_id : scenario.topology.cluster_heads()) {
        LocalCatalog catalog(head_id);
        auto register_into = [&](const NodeInfo& info) {
            LocalNodeDescriptor descriptor;
            descriptor.node_id = info.id;
            descriptor.phenomenon = info.phenomenon;
            descriptor.mote_type = hardware.at(info.id).first;
            descriptor.sensor_type = hardware.at(info.id).second.empty() && info.senses()
                                         ? "generic"
                                         : hardware.at(info.id).second;
            descriptor.neighbor_count =
                static_cast<int>(scenario.topology.neighbors(info.id).size());
            catalog.register_node(std::move(descriptor));
        };
        register_into(scenario.topology.node(head_id));
        for (const auto& member : scenario.topology.cluster_members(head_id))
            register_into(scenario.topology.node(member));
        // Seed virtual stats with the schema sizes of every class present.
        for (const auto& phenomenon : catalog.phenomena_present()) {
            for (const auto& attr : scenario.generator.spec_for(phenomenon).attributes)
                catalog.seed_attribute_size(attr.name, attr.size_bytes);
        }
        scenario.local_catalogs.emplace(head_id, std::move(catalog));
    }

    if (doc.contains("link_failures")) {
        for (const auto& failure_json : doc["link_failures"]) {
            LinkFailurePlan plan;
            plan.a = require_string(failure_json, "a", "link_failures");
            plan.b = require_string(failure_json, "b", "link_failures");
            plan.time_us = require(failure_json, "time_us", "link_failures").get<int64_t>();
            if (!scenario.topology.has_edge(plan.a, plan.b))
                schema_error("link_failures", "no edge " + plan.a + " -- " + plan.b);
            scenario.link_failures.push_back(std::move(plan));
        }
    }
    return scenario;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open scenario file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str(), path);
}

}  // namespace wsnq
