#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wsnq/aggregation.hpp"
#include "wsnq/metadata.hpp"
#include "wsnq/planner.hpp"
#include "wsnq/routing.hpp"
#include "wsnq/scenario.hpp"

namespace wsnq {

enum class ChargeCategory { Data, Dissemination, ErrorFlood, MetadataSync };

const char* charge_category_name(ChargeCategory category);

struct CategoryCounters {
    uint64_t messages = 0;  // transmissions
    uint64_t bytes = 0;     // transmitted payload bytes
    uint64_t receives = 0;
};

struct NodeEnergy {
    double sensing = 0.0;
    double communication = 0.0;
};

// Per-node accumulated sensing and communication cost plus global message
// and byte counters. Transmit and receive energy scale with payload bytes
// and the link weight; sampling is a flat per-sample cost. Zero-byte
// control messages are counted but charge nothing.
class EnergyLedger {
public:
    EnergyLedger() = default;
    explicit EnergyLedger(CostParams rates) : rates_(rates) {}

    void record_transmit(const std::string& node, int bytes, double link_weight,
                         ChargeCategory category);
    void record_receive(const std::string& node, int bytes, double link_weight,
                        ChargeCategory category);
    void charge_sample(const std::string& node);

    const std::map<std::string, NodeEnergy>& per_node() const { return per_node_; }
    double total_sensing() const;
    double total_communication() const;
    uint64_t message_count() const;
    uint64_t byte_count() const;
    const std::map<ChargeCategory, CategoryCounters>& counters() const { return counters_; }
    const CostParams& rates() const { return rates_; }

private:
    CostParams rates_;
    std::map<std::string, NodeEnergy> per_node_;
    std::map<ChargeCategory, CategoryCounters> counters_;
};

struct ResultRow {
    int64_t epoch = 0;
    GroupKey group;
    std::string function;
    double value = 0.0;
    bool integral = false;
};

// Plain (non-aggregate) selects deliver projected tuples instead of rows.
struct TupleRow {
    int64_t epoch = 0;
    std::string node_id;
    std::map<std::string, GroupKey> values;
};

// Late records are the epoch-mismatch family: the slot mechanism is built
// to prevent them, so a nonzero count points at a scheduling bug or an
// injected failure.
struct DropStats {
    uint64_t late = 0;      // crossed an epoch boundary in flight
    uint64_t stranded = 0;  // never reached the sink
};

struct SlotTrace {
    int64_t epoch = 0;
    std::map<std::string, int64_t> deadlines;
};

struct RunOptions {
    std::string query_text;
    std::string strategy = "auto";  // auto | warehouse | semi | innetwork
    MetadataMode metadata_mode = MetadataMode::Distributed;
    int epochs = 5;                 // ignored for queries without an EPOCH clause
    std::optional<uint64_t> seed_override;
};

Strategy parse_strategy(const std::string& text);  // raises Usage

struct RunReport {
    std::string scenario_name;
    std::string query_text;
    std::string canonical_query;
    uint64_t seed = 0;
    int epochs = 0;
    int64_t epoch_duration_us = 0;
    MetadataMode metadata_mode = MetadataMode::Distributed;

    ExecutionPlan plan;  // strategy actually executed + its estimate
    std::map<std::string, EnergyCost> strategy_estimates;

    std::vector<ResultRow> results;
    std::vector<TupleRow> tuples;
    EnergyLedger ledger;

    std::vector<FloodTrace> floods;
    std::map<std::string, RouteTable> routes;
    std::vector<SlotTrace> slots;
    std::vector<MetadataMessage> metadata_messages;
    DropStats drops;
    std::vector<std::string> notes;  // route promotions etc.
};

// Deterministic end-to-end execution: metadata sync, planning, Phe_Msg
// dissemination with route computation, then per-epoch sampling, filtering,
// aggregation and slot-scheduled collection along the sink-rooted tree
// (cluster heads follow their first stored route). Identical inputs give
// bit-identical reports.
RunReport run_query(const Scenario& scenario, const RunOptions& options);

// Schedules a link failure; it takes effect when the simulated clock
// reaches it. Raises UnknownEdge if the edge does not exist (or is already
// scheduled to have failed by then).
void inject_link_failure(Scenario& scenario, const std::string& a, const std::string& b,
                         int64_t time_us);

}  // namespace wsnq
