#include "wsnq/readings.hpp"

#include <cmath>

#include "wsnq/error.hpp"

namespace wsnq {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace

const PhenomenonSpec& GeneratorConfig::spec_for(const std::string& phenomenon) const {
    auto it = phenomena.find(phenomenon);
    if (it == phenomena.end())
        fail(ErrorCode::SchemaError, "no generator config for phenomenon '" + phenomenon + "'");
    return it->second;
}

const Distribution& GeneratorConfig::distribution_for(const std::string& node_id,
                                                      const std::string& phenomenon,
                                                      const std::string& attribute) const {
    auto node_it = node_overrides.find(node_id);
    if (node_it != node_overrides.end()) {
        auto attr_it = node_it->second.find(attribute);
        if (attr_it != node_it->second.end()) return attr_it->second;
    }
    return spec_for(phenomenon).default_distribution;
}

double generate_reading(uint64_t seed, const std::string& node_id, int64_t epoch_index,
                        const std::string& attribute, const Distribution& distribution) {
    if (distribution.kind == Distribution::Kind::Trace) {
        if (distribution.trace.empty())
            fail(ErrorCode::SchemaError, "empty trace for attribute '" + attribute + "'");
        return distribution.trace[static_cast<size_t>(epoch_index) % distribution.trace.size()];
    }
    uint64_t h = seed;
    h = splitmix64(h ^ fnv1a(node_id));
    h = splitmix64(h ^ static_cast<uint64_t>(epoch_index));
    h = splitmix64(h ^ fnv1a(attribute));
    double unit = static_cast<double>(h >> 11) * 0x1.0p-53;  // [0, 1)
    double raw = distribution.lo + unit * (distribution.hi - distribution.lo);
    return std::round(raw * 8.0) / 8.0;
}

SensorTuple generate_tuple(const NodeInfo& node, int64_t epoch_index, int64_t epoch_duration_us,
                           const GeneratorConfig& config, uint64_t seed) {
    if (!node.senses())
        fail(ErrorCode::ContractViolation, "node '" + node.id + "' has no phenomenon to sample");
    SensorTuple tuple;
    tuple.node_id = node.id;
    tuple.region = node.region;
    tuple.node_ordinal = node.ordinal;
    tuple.timestamp_us = epoch_index * epoch_duration_us;
    tuple.phenomenon = node.phenomenon;
    const PhenomenonSpec& spec = config.spec_for(node.phenomenon);
    for (const auto& attr : spec.attributes) {
        const Distribution& dist = config.distribution_for(node.id, node.phenomenon, attr.name);
        tuple.values[attr.name] = generate_reading(seed, node.id, epoch_index, attr.name, dist);
    }
    return tuple;
}

}  // namespace wsnq
