#include "wsnq/report.hpp"

#include <cstring>
#include <sstream>

#include "json.hpp"

namespace wsnq {

namespace {

using nlohmann::json;

json group_to_json(const GroupKey& key) {
    struct Visitor {
        json operator()(std::monostate) const { return "*"; }
        json operator()(int64_t v) const { return v; }
        json operator()(double v) const { return v; }
        json operator()(const std::string& v) const { return v; }
    };
    return std::visit(Visitor{}, key);
}

json value_to_json(double value, bool integral) {
    if (integral) return static_cast<int64_t>(value);
    return value;
}

json cost_to_json(const EnergyCost& cost) {
    return json{{"sensing", cost.sensing},
                {"communication", cost.communication},
                {"total", cost.total()}};
}

json ledger_to_json(const EnergyLedger& ledger) {
    json per_node = json::object();
    for (const auto& [node, energy] : ledger.per_node())
        per_node[node] = {{"sensing", energy.sensing}, {"communication", energy.communication}};
    json breakdown = json::object();
    for (const auto& [category, counters] : ledger.counters())
        breakdown[charge_category_name(category)] = {{"messages", counters.messages},
                                                     {"bytes", counters.bytes},
                                                     {"receives", counters.receives}};
    return json{{"per_node", per_node},
                {"totals",
                 {{"sensing", ledger.total_sensing()},
                  {"communication", ledger.total_communication()}}},
                {"message_count", ledger.message_count()},
                {"byte_count", ledger.byte_count()},
                {"breakdown", breakdown}};
}

json floods_to_json(const std::vector<FloodTrace>& floods) {
    json out = json::array();
    for (const auto& trace : floods) {
        json events = json::array();
        for (const auto& event : trace.events)
            events.push_back({{"time_us", event.time_us},
                              {"node", event.node},
                              {"from", event.from},
                              {"action", flood_action_name(event.action)}});
        out.push_back({{"msg_id", trace.msg_id},
                       {"transmissions", trace.transmissions},
                       {"retained", json(trace.retained)},
                       {"terminal", json(trace.terminal)},
                       {"events", events}});
    }
    return out;
}

}  // namespace

std::string report_to_json(const RunReport& report, int indent) {
    json plan;
    plan["strategy"] = strategy_name(report.plan.strategy);
    plan["estimated_cost"] = cost_to_json(report.plan.estimated_cost);
    json estimates = json::object();
    for (const auto& [name, cost] : report.strategy_estimates) estimates[name] = cost_to_json(cost);
    plan["estimates"] = estimates;
    json subs = json::array();
    for (const auto& sub : report.plan.sub_queries)
        subs.push_back({{"network", sub.target_network},
                        {"phenomena", json(sub.phenomenon_filter)},
                        {"residual", unparse(sub.residual_ast)}});
    plan["sub_queries"] = subs;

    json results = json::array();
    for (const auto& row : report.results)
        results.push_back({{"epoch", row.epoch},
                           {"group", group_to_json(row.group)},
                           {"function", row.function},
                           {"value", value_to_json(row.value, row.integral)}});
    json tuples = json::array();
    for (const auto& row : report.tuples) {
        json values = json::object();
        for (const auto& [attr, value] : row.values) values[attr] = group_to_json(value);
        tuples.push_back({{"epoch", row.epoch}, {"node", row.node_id}, {"values", values}});
    }

    json routes = json::object();
    for (const auto& [owner, table] : report.routes)
        routes[owner] = {{"routes", json(table.routes)}, {"distances", json(table.distances)}};
    json slots = json::array();
    for (const auto& slot : report.slots)
        slots.push_back({{"epoch", slot.epoch}, {"deadlines", json(slot.deadlines)}});

    size_t sync_transmissions = 0;
    json sync_detail = json::array();
    for (const auto& msg : report.metadata_messages) {
        sync_transmissions += msg.transmissions();
        sync_detail.push_back(
            {{"kind", msg.kind == MetadataMessage::Kind::NodeDescriptor ? "node_descriptor"
                                                                        : "network_summary"},
             {"origin", msg.origin},
             {"subject", msg.subject},
             {"hops", msg.transmissions()}});
    }

    json doc{{"scenario", report.scenario_name},
             {"query", report.query_text},
             {"canonical_query", report.canonical_query},
             {"seed", report.seed},
             {"epochs", report.epochs},
             {"epoch_duration_us", report.epoch_duration_us},
             {"plan", plan},
             {"results", results},
             {"tuples", tuples},
             {"energy", ledger_to_json(report.ledger)},
             {"metadata_sync",
              {{"mode", metadata_mode_name(report.metadata_mode)},
               {"messages", report.metadata_messages.size()},
               {"transmissions", sync_transmissions},
               {"detail", sync_detail}}},
             {"traces",
              {{"flood", floods_to_json(report.floods)},
               {"routes", routes},
               {"slots", slots},
               {"drops", {{"late", report.drops.late}, {"stranded", report.drops.stranded}}}}},
             {"notes", json(report.notes)},
             {"result_hash", result_hash(report)}};
    return doc.dump(indent);
}

std::string results_to_csv(const RunReport& report) {
    std::ostringstream os;
    os.precision(17);
    if (!report.tuples.empty()) {
        os << "epoch,node,attribute,value\n";
        for (const auto& row : report.tuples)
            for (const auto& [attr, value] : row.values)
                os << row.epoch << ',' << row.node_id << ',' << attr << ','
                   << group_key_display(value) << '\n';
        return os.str();
    }
    os << "epoch,group,function,value\n";
    for (const auto& row : report.results) {
        os << row.epoch << ',' << group_key_display(row.group) << ',' << row.function << ',';
        if (row.integral)
            os << static_cast<int64_t>(row.value);
        else
            os << row.value;
        os << '\n';
    }
    return os.str();
}

uint64_t result_hash(const RunReport& report) {
    uint64_t h = 0xcbf29ce484222325ull;
    auto mix_bytes = [&h](const void* data, size_t n) {
        const unsigned char* p = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ull;
        }
    };
    auto mix_string = [&](const std::string& s) { mix_bytes(s.data(), s.size()); };
    auto mix_double = [&](double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        mix_bytes(&bits, sizeof(bits));
    };
    for (const auto& row : report.results) {
        mix_bytes(&row.epoch, sizeof(row.epoch));
        mix_string(group_key_display(row.group));
        mix_string(row.function);
        mix_double(row.value);
    }
    for (const auto& row : report.tuples) {
        mix_bytes(&row.epoch, sizeof(row.epoch));
        mix_string(row.node_id);
        for (const auto& [attr, value] : row.values) {
            mix_string(attr);
            mix_string(group_key_display(value));
        }
    }
    return h;
}

std::string dump_catalog_json(const Scenario& scenario, int indent) {
    json global = json::array();
    for (const auto& [id, descriptor] : scenario.global_catalog.networks()) {
        json location{{"latitude",
                       {{"degrees", descriptor.location.latitude.degrees},
                        {"minutes", descriptor.location.latitude.minutes},
                        {"hemisphere", std::string(1, descriptor.location.latitude.hemisphere)}}},
                      {"longitude",
                       {{"degrees", descriptor.location.longitude.degrees},
                        {"minutes", descriptor.location.longitude.minutes},
                        {"hemisphere", std::string(1, descriptor.location.longitude.hemisphere)}}}};
        global.push_back({{"network_id", descriptor.network_id},
                          {"node_count", descriptor.node_count},
                          {"location", location},
                          {"phenomena", json(descriptor.phenomena)},
                          {"data_units", json(descriptor.data_units)}});
    }
    json clusters = json::object();
    for (const auto& [head, catalog] : scenario.local_catalogs) {
        json nodes = json::array();
        for (const auto& [node_id, descriptor] : catalog.node_descriptors())
            nodes.push_back({{"node_id", descriptor.node_id},
                             {"mote_type", descriptor.mote_type},
                             {"sensor_type", descriptor.sensor_type},
                             {"phenomenon", descriptor.phenomenon},
                             {"neighbor_count", descriptor.neighbor_count}});
        const VirtualStats& stats = catalog.virtual_stats();
        clusters[head] = {{"nodes", nodes},
                          {"virtual_stats",
                           {{"attribute_sizes", json(stats.attribute_sizes)},
                            {"tuple_count", stats.tuple_count},
                            {"last_update", stats.last_update}}}};
    }
    json doc{{"global", global}, {"clusters", clusters}};
    return doc.dump(indent);
}

}  // namespace wsnq
