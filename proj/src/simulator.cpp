#include "wsnq/simulator.hpp"

#include <algorithm>
#include <queue>

#include "wsnq/error.hpp"
#include "wsnq/query_parser.hpp"
#include "wsnq/readings.hpp"

namespace wsnq {

const char* charge_category_name(ChargeCategory category) {
    switch (category) {
        case ChargeCategory::Data: return "data";
        case ChargeCategory::Dissemination: return "dissemination";
        case ChargeCategory::ErrorFlood: return "error_flood";
        case ChargeCategory::MetadataSync: return "metadata_sync";
    }
    return "?";
}

void EnergyLedger::record_transmit(const std::string& node, int bytes, double link_weight,
                                   ChargeCategory category) {
    if (bytes < 0) fail(ErrorCode::ContractViolation, "negative transmit byte count");
    if (bytes == 0 && category == ChargeCategory::Data)
        fail(ErrorCode::ContractViolation, "data transmissions must carry payload");
    auto& counters = counters_[category];
    ++counters.messages;
    counters.bytes += static_cast<uint64_t>(bytes);
    if (bytes > 0)
        per_node_[node].communication += bytes * rates_.transmit_per_byte * link_weight;
    else
        per_node_[node];  // node appears in the ledger even for free control traffic
}

void EnergyLedger::record_receive(const std::string& node, int bytes, double link_weight,
                                  ChargeCategory category) {
    if (bytes < 0) fail(ErrorCode::ContractViolation, "negative receive byte count");
    ++counters_[category].receives;
    if (bytes > 0)
        per_node_[node].communication += bytes * rates_.receive_per_byte * link_weight;
    else
        per_node_[node];
}

void EnergyLedger::charge_sample(const std::string& node) {
    per_node_[node].sensing += rates_.sample_cost;
}

double EnergyLedger::total_sensing() const {
    double total = 0.0;
    for (const auto& [id, energy] : per_node_) total += energy.sensing;
    return total;
}

double EnergyLedger::total_communication() const {
    double total = 0.0;
    for (const auto& [id, energy] : per_node_) total += energy.communication;
    return total;
}

uint64_t EnergyLedger::message_count() const {
    uint64_t total = 0;
    for (const auto& [category, counters] : counters_) total += counters.messages;
    return total;
}

uint64_t EnergyLedger::byte_count() const {
    uint64_t total = 0;
    for (const auto& [category, counters] : counters_) total += counters.bytes;
    return total;
}

Strategy parse_strategy(const std::string& text) {
    if (text == "warehouse") return Strategy::Warehouse;
    if (text == "semi" || text == "semi_distributed") return Strategy::SemiDistributed;
    if (text == "innetwork" || text == "in_network") return Strategy::InNetwork;
    fail(ErrorCode::Usage, "unknown strategy '" + text + "' (warehouse|semi|innetwork|auto)");
}

namespace {

struct Record {
    bool is_psr = false;
    PartialStateRecord psr;
    SensorTuple tuple;
    int bytes = 0;
    int64_t epoch = 0;
    int hop_budget = 0;  // guards forwarding loops on route/tree disagreement
};

struct AggSpec {
    AggFn fn = AggFn::Count;
    std::string argument;  // empty for count(*)
    std::string display;
};

class Simulation {
public:
    Simulation(const Scenario& scenario, const RunOptions& options)
        : scenario_(scenario), options_(options), ledger_(scenario.cost) {}

    RunReport run();

private:
    enum class EventKind { EpochOpen, Sample, SlotSend, Deliver, LinkFail, EpochClose };

    struct Event {
        int64_t time = 0;
        uint64_t seq = 0;
        EventKind kind = EventKind::EpochOpen;
        std::string node;
        std::string from;
        double link_weight = 1.0;
        int64_t epoch = 0;
        Record record;
    };

    struct EventOrder {
        bool operator()(const Event& x, const Event& y) const {
            return std::tie(x.time, x.seq) > std::tie(y.time, y.seq);
        }
    };

    struct Duty {
        bool tasked = false;
        std::string phenomenon;
        std::vector<Predicate> predicates;
        const LocalCatalog* catalog = nullptr;
    };

    Scenario scenario_;
    RunOptions options_;
    EnergyLedger ledger_;
    RouteStore route_store_;
    RunReport report_;

    Strategy strategy_ = Strategy::InNetwork;
    ValidatedQuery vquery_;
    std::vector<AggSpec> aggs_;
    int64_t duration_us_ = 0;
    int epochs_ = 0;
    bool aggregated_ = false;

    std::map<std::string, Duty> duties_;  // every sensing node in scope
    std::vector<std::string> samplers_;

    std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;
    uint64_t next_seq_ = 0;
    int64_t now_ = 0;

    int64_t open_epoch_ = -1;
    std::map<std::string, std::vector<PartialStateRecord>> psr_buffers_;
    std::map<std::string, std::vector<Record>> tuple_buffers_;
    std::set<std::string> slot_done_;
    std::vector<PartialStateRecord> sink_psrs_;
    std::vector<Record> sink_tuples_;

    void schedule(int64_t time, Event event) {
        event.time = time;
        event.seq = next_seq_++;
        queue_.push(std::move(event));
    }

    PlanningContext planning_context() const {
        PlanningContext ctx;
        ctx.topology = &scenario_.topology;
        ctx.global_catalog = &scenario_.global_catalog;
        ctx.local_catalogs = &scenario_.local_catalogs;
        ctx.cost = scenario_.cost;
        ctx.wire = scenario_.wire;
        return ctx;
    }

    void setup_query();
    void select_plan();
    void sync_metadata_phase();
    void disseminate();
    void assign_duties();
    bool qualifies(const std::string& node, const SensorTuple& tuple) const;
    static bool feeds(const AggSpec& agg, const SensorTuple& tuple);
    std::string next_hop(const std::string& node) const;
    void forward(const std::string& node, Record record);
    void buffer_record(const std::string& node, Record record);

    void on_epoch_open(int64_t epoch);
    void on_sample(const std::string& node, int64_t epoch);
    void on_slot_send(const std::string& node, int64_t epoch);
    void on_deliver(Event& event);
    void on_epoch_close(int64_t epoch);
    void on_link_fail(const Event& event);
    void finalize_report();
};

void Simulation::setup_query() {
    QueryAst ast = parse_query(options_.query_text);
    vquery_ = validate_query(ast, scenario_.global_catalog);
    report_.canonical_query = unparse(ast);
    aggregated_ = ast.has_aggregates();
    for (const auto& item : ast.select_items) {
        if (!item.is_aggregate) continue;
        AggSpec spec;
        spec.fn = item.fn;
        spec.argument = item.wildcard ? "" : item.attribute;
        spec.display = item.display();
        aggs_.push_back(std::move(spec));
    }
    // A query without an epoch clause runs exactly one epoch of the
    // configured default duration.
    if (ast.epoch_seconds) {
        duration_us_ = static_cast<int64_t>(*ast.epoch_seconds) * 1'000'000;
        epochs_ = options_.epochs;
    } else {
        duration_us_ = scenario_.timing.default_epoch_seconds * 1'000'000;
        epochs_ = 1;
    }
    if (epochs_ < 1) fail(ErrorCode::Usage, "epochs must be >= 1");
    report_.epochs = epochs_;
    report_.epoch_duration_us = duration_us_;
}

void Simulation::select_plan() {
    PlanningContext ctx = planning_context();
    ExecutionPlan plan;
    plan.sub_queries = partition_inter(vquery_, scenario_.global_catalog, "q0");

    const Strategy order[] = {Strategy::InNetwork, Strategy::SemiDistributed,
                              Strategy::Warehouse};
    std::map<Strategy, EnergyCost> estimates;
    for (Strategy strategy : order) {
        EnergyCost cost = estimate_cost(strategy, plan.sub_queries, ctx, epochs_);
        estimates[strategy] = cost;
        report_.strategy_estimates[strategy_name(strategy)] = cost;
    }

    std::string requested = options_.strategy;
    if (requested == "auto" && scenario_.strategy_override)
        requested = *scenario_.strategy_override;
    if (requested == "auto") {
        bool first = true;
        for (Strategy strategy : order) {
            if (first || estimates[strategy].total() < plan.estimated_cost.total()) {
                plan.strategy = strategy;
                plan.estimated_cost = estimates[strategy];
                first = false;
            }
        }
    } else {
        plan.strategy = parse_strategy(requested);
        plan.estimated_cost = estimates[plan.strategy];
    }
    strategy_ = plan.strategy;
    report_.plan = std::move(plan);
}

void Simulation::sync_metadata_phase() {
    report_.metadata_messages = sync_metadata(options_.metadata_mode, scenario_.topology,
                                              scenario_.global_catalog, scenario_.local_catalogs);
    for (const auto& msg : report_.metadata_messages) {
        for (size_t i = 0; i + 1 < msg.path.size(); ++i) {
            double w = scenario_.topology.edge_weight(msg.path[i], msg.path[i + 1]);
            ledger_.record_transmit(msg.path[i], scenario_.wire.metadata_bytes, w,
                                    ChargeCategory::MetadataSync);
            ledger_.record_receive(msg.path[i + 1], scenario_.wire.metadata_bytes, w,
                                   ChargeCategory::MetadataSync);
        }
    }
    report_.metadata_mode = options_.metadata_mode;
}

void Simulation::disseminate() {
    const std::string& sink = scenario_.topology.sink_id();
    for (const auto& sub : report_.plan.sub_queries) {
        PheMsg msg;
        msg.msg_id = sub.parent_query_id + ":" + sub.target_network;
        msg.parent_query_id = sub.parent_query_id;
        msg.target_network = sub.target_network;
        msg.phenomenon_filter = sub.phenomenon_filter;
        msg.residual_ast = sub.residual_ast;
        msg.fusion_path = {sink};
        msg.response_slot = duration_us_;
        msg.grouping_condition = sub.residual_ast.group_by;

        FloodTrace trace = flood_phe_msg(scenario_.topology, sink, msg, 0,
                                         scenario_.timing.hop_latency_us);
        for (const auto& [time, sender] : trace.broadcasts)
            ledger_.record_transmit(sender, scenario_.wire.control_bytes, 1.0,
                                    ChargeCategory::Dissemination);
        for (const auto& event : trace.events)
            ledger_.record_receive(event.node, scenario_.wire.control_bytes, 1.0,
                                   ChargeCategory::Dissemination);
        for (const auto& head : trace.terminal)
            route_store_.put(head, routes_from_flood(scenario_.topology, trace, head, sink));
        report_.floods.push_back(std::move(trace));
    }
}

void Simulation::assign_duties() {
    for (const auto& sub : report_.plan.sub_queries) {
        for (const auto& head : scenario_.topology.cluster_heads_of(sub.target_network)) {
            auto it = scenario_.local_catalogs.find(head);
            if (it == scenario_.local_catalogs.end()) continue;
            const LocalCatalog& catalog = it->second;
            for (const auto& phenomenon : catalog.phenomena_present()) {
                for (const auto& node : catalog.lookup_sensor_class(phenomenon)) {
                    Duty& duty = duties_[node];
                    duty.phenomenon = phenomenon;
                    duty.catalog = &catalog;
                }
            }
            IntraPartition partition = partition_intra(sub, catalog, scenario_.global_catalog);
            for (const auto& [phenomenon, task] : partition.tasks) {
                for (const auto& node : task.nodes) {
                    Duty& duty = duties_[node];
                    duty.tasked = true;
                    duty.predicates = task.predicates;
                }
            }
            for (const auto& phenomenon : partition.missing)
                report_.notes.push_back("cluster " + head + " has no sensors for '" + phenomenon +
                                        "' and contributes no rows");
        }
    }
    for (const auto& [node, duty] : duties_) {
        if (strategy_ == Strategy::Warehouse || duty.tasked) samplers_.push_back(node);
    }
}

bool Simulation::qualifies(const std::string& node, const SensorTuple& tuple) const {
    auto it = duties_.find(node);
    if (it == duties_.end() || !it->second.tasked) return false;
    for (const auto& pred : it->second.predicates) {
        auto value = tuple.numeric_value(pred.attribute);
        if (!value || !pred.matches(*value)) return false;
    }
    return true;
}

bool Simulation::feeds(const AggSpec& agg, const SensorTuple& tuple) {
    return agg.argument.empty() || tuple.has_attribute(agg.argument);
}

std::string Simulation::next_hop(const std::string& node) const {
    // Cluster heads follow their first stored route; everything else (and a
    // head whose routes are all invalidated) climbs the collection tree.
    if (route_store_.has(node)) {
        const RouteTable& table = route_store_.get(node);
        if (!table.routes.empty() && table.routes[0].size() >= 2) return table.routes[0][1];
    }
    const auto& tree = scenario_.topology.collection_tree();
    auto it = tree.find(node);
    if (it == tree.end() || !it->second.reachable || it->second.parent.empty()) return {};
    return it->second.parent;
}

void Simulation::forward(const std::string& node, Record record) {
    if (record.hop_budget-- <= 0) {
        ++report_.drops.stranded;
        return;
    }
    std::string to = next_hop(node);
    if (to.empty()) {
        ++report_.drops.stranded;
        return;
    }
    double w = scenario_.topology.edge_weight(node, to);
    ledger_.record_transmit(node, record.bytes, w, ChargeCategory::Data);
    Event event;
    event.kind = EventKind::Deliver;
    event.node = to;
    event.from = node;
    event.link_weight = w;
    event.epoch = record.epoch;
    event.record = std::move(record);
    schedule(now_ + scenario_.timing.hop_latency_us, std::move(event));
}

void Simulation::buffer_record(const std::string& node, Record record) {
    if (record.is_psr)
        combine_child_record(psr_buffers_[node], record.psr, open_epoch_);
    else
        tuple_buffers_[node].push_back(std::move(record));
}

void Simulation::on_epoch_open(int64_t epoch) {
    open_epoch_ = epoch;
    psr_buffers_.clear();
    tuple_buffers_.clear();
    slot_done_.clear();
    sink_psrs_.clear();
    sink_tuples_.clear();

    const auto& tree = scenario_.topology.collection_tree();
    RootedTree rooted;
    rooted.root = scenario_.topology.sink_id();
    for (const auto& [id, entry] : tree) {
        if (id == rooted.root || !entry.reachable) continue;
        rooted.parent[id] = entry.parent;
    }
    int64_t base = (epoch + 1) * duration_us_;
    auto deadlines = schedule_time_slots(rooted, base, scenario_.timing.slot_delta_us,
                                         epoch * duration_us_);
    report_.slots.push_back({epoch, deadlines});

    for (const auto& node : samplers_) {
        Event event;
        event.kind = EventKind::Sample;
        event.node = node;
        event.epoch = epoch;
        schedule(epoch * duration_us_, std::move(event));
    }
    for (const auto& [node, deadline] : deadlines) {
        Event event;
        event.kind = EventKind::SlotSend;
        event.node = node;
        event.epoch = epoch;
        schedule(deadline, std::move(event));
    }
}

void Simulation::on_sample(const std::string& node, int64_t epoch) {
    const Duty& duty = duties_.at(node);
    ledger_.charge_sample(node);
    SensorTuple tuple = generate_tuple(scenario_.topology.node(node), epoch, duration_us_,
                                       scenario_.generator, report_.seed);

    int budget = 4 * static_cast<int>(scenario_.topology.nodes().size());
    if (strategy_ == Strategy::Warehouse) {
        // No pushdown: the raw tuple streams to the sink, which filters.
        Record record;
        record.tuple = tuple;
        record.bytes = full_tuple_bytes(duty.phenomenon, vquery_.ast, *duty.catalog,
                                        scenario_.global_catalog, scenario_.wire);
        record.epoch = epoch;
        record.hop_budget = budget;
        buffer_record(node, std::move(record));
        return;
    }
    if (!qualifies(node, tuple)) return;  // selection pushed to the source
    if (aggregated_ && strategy_ == Strategy::InNetwork) {
        for (const auto& agg : aggs_) {
            if (!feeds(agg, tuple)) continue;
            PartialStateRecord psr = init_partial(agg.fn, agg.argument, tuple,
                                                  vquery_.ast.group_by, epoch);
            combine_child_record(psr_buffers_[node], std::move(psr), epoch);
        }
        return;
    }
    Record record;
    record.tuple = tuple;
    record.bytes = projected_tuple_bytes(duty.phenomenon, vquery_.ast, *duty.catalog,
                                         scenario_.global_catalog, scenario_.wire);
    record.epoch = epoch;
    record.hop_budget = budget;
    buffer_record(node, std::move(record));
}

void Simulation::on_slot_send(const std::string& node, int64_t epoch) {
    if (epoch != open_epoch_) return;
    slot_done_.insert(node);
    auto psr_it = psr_buffers_.find(node);
    if (psr_it != psr_buffers_.end()) {
        int bytes = psr_bytes(vquery_.ast, scenario_.wire);
        for (auto& psr : psr_it->second) {
            Record record;
            record.is_psr = true;
            record.psr = std::move(psr);
            record.bytes = bytes;
            record.epoch = epoch;
            record.hop_budget = 4 * static_cast<int>(scenario_.topology.nodes().size());
            forward(node, std::move(record));
        }
        psr_buffers_.erase(psr_it);
    }
    auto tuple_it = tuple_buffers_.find(node);
    if (tuple_it != tuple_buffers_.end()) {
        for (auto& record : tuple_it->second) forward(node, std::move(record));
        tuple_buffers_.erase(tuple_it);
    }
}

void Simulation::on_deliver(Event& event) {
    ledger_.record_receive(event.node, event.record.bytes, event.link_weight,
                           ChargeCategory::Data);
    if (event.epoch != open_epoch_) {
        ++report_.drops.late;
        return;
    }
    const std::string& sink = scenario_.topology.sink_id();
    if (event.node == sink) {
        if (event.record.is_psr)
            combine_child_record(sink_psrs_, std::move(event.record.psr), open_epoch_);
        else
            sink_tuples_.push_back(std::move(event.record));
        return;
    }
    if (scenario_.topology.node(event.node).role == Role::ClusterHead &&
        !event.record.is_psr) {
        auto it = scenario_.local_catalogs.find(event.node);
        if (it != scenario_.local_catalogs.end())
            it->second.update_virtual_stats(event.record.tuple.phenomenon, event.record.bytes,
                                            now_);
    }
    if (!slot_done_.count(event.node)) {
        buffer_record(event.node, std::move(event.record));
    } else {
        // Missed this node's slot: relay onward immediately.
        forward(event.node, std::move(event.record));
    }
}

void Simulation::on_epoch_close(int64_t epoch) {
    std::vector<PartialStateRecord> folded;
    if (aggregated_) {
        if (strategy_ == Strategy::InNetwork) {
            folded = std::move(sink_psrs_);
        } else {
            for (const auto& record : sink_tuples_) {
                const SensorTuple& tuple = record.tuple;
                if (strategy_ == Strategy::Warehouse && !qualifies(tuple.node_id, tuple)) continue;
                for (const auto& agg : aggs_) {
                    if (!feeds(agg, tuple)) continue;
                    combine_child_record(
                        folded, init_partial(agg.fn, agg.argument, tuple, vquery_.ast.group_by, epoch),
                        epoch);
                }
            }
        }
        std::vector<ResultRow> rows;
        for (const auto& psr : folded) {
            FinalizedRow finalized = finalize(psr);
            ResultRow row;
            row.epoch = epoch;
            row.group = finalized.group_id;
            row.function = finalized.function_display;
            row.value = finalized.value;
            row.integral = finalized.integral;
            rows.push_back(std::move(row));
        }
        std::sort(rows.begin(), rows.end(), [](const ResultRow& x, const ResultRow& y) {
            return std::tie(x.group, x.function) < std::tie(y.group, y.function);
        });
        for (auto& row : rows) report_.results.push_back(std::move(row));
    } else {
        std::sort(sink_tuples_.begin(), sink_tuples_.end(), [](const Record& x, const Record& y) {
            return x.tuple.node_ordinal < y.tuple.node_ordinal;
        });
        for (const auto& record : sink_tuples_) {
            const SensorTuple& tuple = record.tuple;
            if (strategy_ == Strategy::Warehouse && !qualifies(tuple.node_id, tuple)) continue;
            TupleRow row;
            row.epoch = epoch;
            row.node_id = tuple.node_id;
            for (const auto& item : vquery_.ast.select_items) {
                auto value = tuple.group_value(item.attribute);
                if (value) row.values[item.attribute] = *value;
            }
            report_.tuples.push_back(std::move(row));
        }
    }
    sink_psrs_.clear();
    sink_tuples_.clear();
    for (auto& [head, catalog] : scenario_.local_catalogs) catalog.reset_epoch_stats();
}

void Simulation::on_link_fail(const Event& event) {
    LinkFailureOutcome outcome =
        handle_link_failure(scenario_.topology, event.node, event.from, route_store_, now_,
                            scenario_.timing.hop_latency_us);
    for (const auto& trace : outcome.err_traces) {
        for (const auto& [time, sender] : trace.broadcasts)
            ledger_.record_transmit(sender, scenario_.wire.control_bytes, 1.0,
                                    ChargeCategory::ErrorFlood);
        for (const auto& flood_event : trace.events)
            ledger_.record_receive(flood_event.node, scenario_.wire.control_bytes, 1.0,
                                   ChargeCategory::ErrorFlood);
        report_.floods.push_back(trace);
    }
    for (const auto& [owner, dropped] : outcome.invalidated)
        report_.notes.push_back("link " + event.node + "--" + event.from + " failed; " + owner +
                                " dropped " + std::to_string(dropped) +
                                " route(s), next stored route promoted");
}

void Simulation::finalize_report() {
    for (const auto& [node, records] : psr_buffers_) report_.drops.stranded += records.size();
    for (const auto& [node, records] : tuple_buffers_) report_.drops.stranded += records.size();
    report_.routes = route_store_.tables();
    report_.ledger = ledger_;
}

RunReport Simulation::run() {
    report_.scenario_name = scenario_.name;
    report_.query_text = options_.query_text;
    report_.seed = options_.seed_override ? *options_.seed_override : scenario_.seed;

    setup_query();
    select_plan();
    sync_metadata_phase();
    disseminate();
    assign_duties();

    for (int64_t epoch = 0; epoch < epochs_; ++epoch) {
        Event open;
        open.kind = EventKind::EpochOpen;
        open.epoch = epoch;
        schedule(epoch * duration_us_, std::move(open));
        Event close;
        close.kind = EventKind::EpochClose;
        close.epoch = epoch;
        schedule((epoch + 1) * duration_us_, std::move(close));
    }
    for (const auto& failure : scenario_.link_failures) {
        Event event;
        event.kind = EventKind::LinkFail;
        event.node = failure.a;
        event.from = failure.b;
        schedule(failure.time_us, std::move(event));
    }

    while (!queue_.empty()) {
        Event event = queue_.top();
        queue_.pop();
        now_ = event.time;
        switch (event.kind) {
            case EventKind::EpochOpen: on_epoch_open(event.epoch); break;
            case EventKind::Sample: on_sample(event.node, event.epoch); break;
            case EventKind::SlotSend: on_slot_send(event.node, event.epoch); break;
            case EventKind::Deliver: on_deliver(event); break;
            case EventKind::EpochClose: on_epoch_close(event.epoch); break;
            case EventKind::LinkFail: on_link_fail(event); break;
        }
    }
    finalize_report();
    return std::move(report_);
}

}  // namespace

RunReport run_query(const Scenario& scenario, const RunOptions& options) {
    Simulation simulation(scenario, options);
    return simulation.run();
}

void inject_link_failure(Scenario& scenario, const std::string& a, const std::string& b,
                         int64_t time_us) {
    if (!scenario.topology.has_edge(a, b))
        fail(ErrorCode::UnknownEdge, "no edge " + a + " -- " + b);
    for (const auto& planned : scenario.link_failures) {
        if ((planned.a == a && planned.b == b) || (planned.a == b && planned.b == a))
            fail(ErrorCode::UnknownEdge,
                 "edge " + a + " -- " + b + " is already scheduled to fail");
    }
    scenario.link_failures.push_back({a, b, time_us});
}

}  // namespace wsnq
