#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wsnq/metadata.hpp"
#include "wsnq/planner.hpp"
#include "wsnq/readings.hpp"
#include "wsnq/topology.hpp"

namespace wsnq {

struct Timing {
    int64_t hop_latency_us = 1000;
    int64_t slot_delta_us = 2000;
    int64_t default_epoch_seconds = 1;  // queries without an EPOCH clause
};

struct LinkFailurePlan {
    std::string a;
    std::string b;
    int64_t time_us = 0;
};

struct Scenario {
    std::string name;
    uint64_t seed = 0;
    Topology topology;
    GlobalCatalog global_catalog;
    std::map<std::string, LocalCatalog> local_catalogs;  // cluster head -> catalog
    GeneratorConfig generator;
    CostParams cost;
    WireParams wire;
    Timing timing;
    std::optional<std::string> strategy_override;
    std::vector<std::string> queries;
    std::vector<LinkFailurePlan> link_failures;
};

// Parses and fully validates a scenario document: catalogs populated via
// the registration operations, topology invariants checked, generator
// schemas turned into the attribute map and seeded virtual stats. Raises
// SchemaError (with the offending path) or DisconnectedTopology.
Scenario parse_scenario(const std::string& json_text, const std::string& name = "inline");
Scenario load_scenario(const std::string& path);

}  // namespace wsnq
