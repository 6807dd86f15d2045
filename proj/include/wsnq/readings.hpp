#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wsnq/aggregation.hpp"
#include "wsnq/topology.hpp"

namespace wsnq {

// Per-attribute generation rule: either uniform over [lo, hi] or a fixed
// trace replayed by epoch index (cycling when the trace is shorter than
// the run).
struct Distribution {
    enum class Kind { Uniform, Trace };
    Kind kind = Kind::Uniform;
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> trace;
};

struct AttributeSpec {
    std::string name;
    int size_bytes = 8;
};

struct PhenomenonSpec {
    std::string phenomenon;
    std::vector<AttributeSpec> attributes;
    Distribution default_distribution;
};

struct GeneratorConfig {
    std::map<std::string, PhenomenonSpec> phenomena;
    // node id -> attribute -> override
    std::map<std::string, std::map<std::string, Distribution>> node_overrides;

    const PhenomenonSpec& spec_for(const std::string& phenomenon) const;
    const Distribution& distribution_for(const std::string& node_id, const std::string& phenomenon,
                                         const std::string& attribute) const;
};

// Deterministic for a fixed (seed, node, epoch, attribute); uniform draws
// are quantized to 1/8 steps so that partial sums are exact in double
// arithmetic no matter the merge order.
double generate_reading(uint64_t seed, const std::string& node_id, int64_t epoch_index,
                        const std::string& attribute, const Distribution& distribution);

// One tuple per sensing node per epoch, stamped at the epoch start.
SensorTuple generate_tuple(const NodeInfo& node, int64_t epoch_index, int64_t epoch_duration_us,
                           const GeneratorConfig& config, uint64_t seed);

}  // namespace wsnq
