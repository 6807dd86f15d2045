#include "wsnq/planner.hpp"

#include <algorithm>

#include "wsnq/error.hpp"

namespace wsnq {

const char* strategy_name(Strategy strategy) {
    switch (strategy) {
        case Strategy::Warehouse: return "warehouse";
        case Strategy::SemiDistributed: return "semi_distributed";
        case Strategy::InNetwork: return "in_network";
    }
    return "?";
}

namespace {

bool attribute_sensed_by(const std::string& attribute, const GlobalWsnDescriptor& network,
                         const GlobalCatalog& catalog) {
    if (is_builtin_attribute(attribute)) return true;
    auto phenomenon = catalog.phenomenon_of(attribute);
    return phenomenon && network.phenomena.count(*phenomenon) > 0;
}

QueryAst restrict_ast(const QueryAst& ast, const GlobalWsnDescriptor& network,
                      const GlobalCatalog& catalog) {
    QueryAst out;
    out.source_table = ast.source_table;
    out.group_by = ast.group_by;
    out.epoch_seconds = ast.epoch_seconds;
    for (const auto& item : ast.select_items) {
        if (item.is_aggregate && item.wildcard) {
            out.select_items.push_back(item);
            continue;
        }
        if (attribute_sensed_by(item.attribute, network, catalog)) out.select_items.push_back(item);
    }
    for (const auto& pred : ast.predicates)
        if (attribute_sensed_by(pred.attribute, network, catalog)) out.predicates.push_back(pred);
    return out;
}

}  // namespace

std::vector<SubQuery> partition_inter(const ValidatedQuery& query, const GlobalCatalog& catalog,
                                      const std::string& parent_query_id) {
    if (query.scope.network_ids.empty())
        fail(ErrorCode::NoQualifyingNetwork, "validated query has an empty scope");
    std::vector<SubQuery> out;
    for (const auto& network_id : query.scope.network_ids) {
        const auto& descriptor = catalog.network(network_id);
        SubQuery sub;
        sub.parent_query_id = parent_query_id;
        sub.target_network = network_id;
        for (const auto& phenomenon : query.referenced_phenomena)
            if (descriptor.phenomena.count(phenomenon)) sub.phenomenon_filter.insert(phenomenon);
        sub.residual_ast = restrict_ast(query.ast, descriptor, catalog);
        out.push_back(std::move(sub));
    }
    return out;
}

IntraPartition partition_intra(const SubQuery& sub, const LocalCatalog& cluster_catalog,
                               const GlobalCatalog& global_catalog) {
    IntraPartition out;
    std::set<std::string> wanted = sub.phenomenon_filter;
    if (wanted.empty()) wanted = cluster_catalog.phenomena_present();
    for (const auto& phenomenon : wanted) {
        auto nodes = cluster_catalog.lookup_sensor_class(phenomenon);
        if (nodes.empty()) {
            out.missing.insert(phenomenon);
            continue;
        }
        SensingTask task;
        task.phenomenon = phenomenon;
        task.nodes = std::move(nodes);
        const auto& schema = global_catalog.schema(phenomenon);
        for (const auto& pred : sub.residual_ast.predicates) {
            bool applies = is_builtin_attribute(pred.attribute) ||
                           std::find(schema.begin(), schema.end(), pred.attribute) != schema.end();
            if (applies) task.predicates.push_back(pred);
        }
        out.tasks.emplace(phenomenon, std::move(task));
    }
    return out;
}

int group_overhead_bytes(const QueryAst& ast, const WireParams& wire) {
    return ast.group_by ? wire.group_tag_bytes : 0;
}

int full_tuple_bytes(const std::string& phenomenon, const QueryAst& ast,
                     const LocalCatalog& cluster_catalog, const GlobalCatalog& global_catalog,
                     const WireParams& wire) {
    const auto& schema = global_catalog.schema(phenomenon);
    const auto& sizes = cluster_catalog.virtual_stats().attribute_sizes;
    int total = 0;
    for (const auto& attr : schema) {
        auto it = sizes.find(attr);
        if (it == sizes.end())
            fail(ErrorCode::MissingStats, "virtual stats lack a size for attribute '" + attr + "'");
        total += it->second;
    }
    return total + group_overhead_bytes(ast, wire);
}

int projected_tuple_bytes(const std::string& phenomenon, const QueryAst& ast,
                          const LocalCatalog& cluster_catalog, const GlobalCatalog& global_catalog,
                          const WireParams& wire) {
    const auto& schema = global_catalog.schema(phenomenon);
    const auto& sizes = cluster_catalog.virtual_stats().attribute_sizes;
    int total = 0;
    for (const auto& attr : ast.referenced_attributes()) {
        if (std::find(schema.begin(), schema.end(), attr) == schema.end()) continue;
        auto it = sizes.find(attr);
        if (it == sizes.end())
            fail(ErrorCode::MissingStats, "virtual stats lack a size for attribute '" + attr + "'");
        total += it->second;
    }
    return std::max(total, wire.min_tuple_bytes) + group_overhead_bytes(ast, wire);
}

int psr_bytes(const QueryAst& ast, const WireParams& wire) {
    return wire.psr_payload_bytes + group_overhead_bytes(ast, wire);
}

namespace {

struct ClusterView {
    const LocalCatalog* catalog = nullptr;
    IntraPartition partition;
};

// Per-network tasked nodes with their class, plus every sensing node for
// the no-pushdown case.
struct NetworkView {
    std::map<std::string, std::string> tasked;   // node -> phenomenon
    std::map<std::string, std::string> sensing;  // node -> phenomenon
    std::map<std::string, const LocalCatalog*> node_cluster;
};

NetworkView build_network_view(const SubQuery& sub, const PlanningContext& ctx) {
    NetworkView view;
    for (const auto& head : ctx.topology->cluster_heads_of(sub.target_network)) {
        auto it = ctx.local_catalogs->find(head);
        if (it == ctx.local_catalogs->end()) continue;
        const LocalCatalog& catalog = it->second;
        for (const auto& phenomenon : catalog.phenomena_present()) {
            for (const auto& node : catalog.lookup_sensor_class(phenomenon)) {
                view.sensing[node] = phenomenon;
                view.node_cluster[node] = &catalog;
            }
        }
        auto partition = partition_intra(sub, catalog, *ctx.global_catalog);
        for (const auto& [phenomenon, task] : partition.tasks)
            for (const auto& node : task.nodes) view.tasked[node] = phenomenon;
    }
    return view;
}

double node_distance(const PlanningContext& ctx, const std::string& node) {
    const auto& tree = ctx.topology->collection_tree();
    auto it = tree.find(node);
    if (it == tree.end() || !it->second.reachable)
        fail(ErrorCode::UnreachableNode, "node '" + node + "' has no path to the sink");
    return it->second.distance;
}

// Aggregate traffic prediction: per collection-tree edge, one partial state
// record per group per aggregate whose class has tasked nodes below the
// edge. Group counts are only statically known for the built-in keys
// (region, nodeid); data-valued keys predict one group.
double predict_in_network_bytes(const SubQuery& sub, const NetworkView& view,
                                const PlanningContext& ctx) {
    const QueryAst& ast = sub.residual_ast;
    int record_bytes = psr_bytes(ast, ctx.wire);

    // subtree(child edge) membership via parent walks
    const auto& tree = ctx.topology->collection_tree();
    const std::string& root = ctx.topology->sink_id();

    struct AggSpec {
        std::string phenomenon;  // empty: fed by every tasked class
    };
    std::vector<AggSpec> aggs;
    for (const auto& item : ast.select_items) {
        if (!item.is_aggregate) continue;
        AggSpec spec;
        if (!item.wildcard && !is_builtin_attribute(item.attribute)) {
            auto phenomenon = ctx.global_catalog->phenomenon_of(item.attribute);
            if (phenomenon) spec.phenomenon = *phenomenon;
        }
        aggs.push_back(spec);
    }

    double bytes_hops = 0.0;
    for (const auto& [node, entry] : tree) {
        if (node == root || !entry.reachable) continue;
        // Tasked nodes whose tree path passes through `node`.
        std::map<std::string, std::set<std::string>> class_nodes;   // phenomenon -> nodes below
        std::map<std::string, std::set<std::string>> class_regions; // phenomenon -> regions below
        for (const auto& [tasked_node, phenomenon] : view.tasked) {
            std::string cur = tasked_node;
            bool below = false;
            while (true) {
                if (cur == node) {
                    below = true;
                    break;
                }
                if (cur == root || cur.empty()) break;
                cur = tree.at(cur).parent;
            }
            if (below) {
                class_nodes[phenomenon].insert(tasked_node);
                class_regions[phenomenon].insert(ctx.topology->node(tasked_node).region);
            }
        }
        if (class_nodes.empty()) continue;

        int records = 0;
        for (const auto& agg : aggs) {
            std::set<std::string> contributing_nodes;
            std::set<std::string> contributing_regions;
            for (const auto& [phenomenon, nodes] : class_nodes) {
                if (!agg.phenomenon.empty() && agg.phenomenon != phenomenon) continue;
                contributing_nodes.insert(nodes.begin(), nodes.end());
                const auto& regions = class_regions.at(phenomenon);
                contributing_regions.insert(regions.begin(), regions.end());
            }
            if (contributing_nodes.empty()) continue;
            int groups = 1;
            if (ast.group_by) {
                if (*ast.group_by == "region")
                    groups = static_cast<int>(contributing_regions.size());
                else if (*ast.group_by == "nodeid")
                    groups = static_cast<int>(contributing_nodes.size());
            }
            records += groups;
        }
        double edge_weight = ctx.topology->edge_weight(node, entry.parent);
        bytes_hops += static_cast<double>(records) * record_bytes * edge_weight;
    }
    return bytes_hops;
}

}  // namespace

EnergyCost estimate_cost(Strategy strategy, const std::vector<SubQuery>& sub_queries,
                         const PlanningContext& ctx, int epochs) {
    EnergyCost cost;
    if (epochs <= 0) return cost;

    double samples_per_epoch = 0.0;
    double bytes_hops_per_epoch = 0.0;

    for (const auto& sub : sub_queries) {
        NetworkView view = build_network_view(sub, ctx);
        const auto& senders = strategy == Strategy::Warehouse ? view.sensing : view.tasked;
        samples_per_epoch += static_cast<double>(senders.size());

        if (strategy == Strategy::InNetwork && sub.residual_ast.has_aggregates()) {
            bytes_hops_per_epoch += predict_in_network_bytes(sub, view, ctx);
            continue;
        }
        for (const auto& [node, phenomenon] : senders) {
            const LocalCatalog& catalog = *view.node_cluster.at(node);
            int payload = strategy == Strategy::Warehouse
                              ? full_tuple_bytes(phenomenon, sub.residual_ast, catalog,
                                                 *ctx.global_catalog, ctx.wire)
                              : projected_tuple_bytes(phenomenon, sub.residual_ast, catalog,
                                                      *ctx.global_catalog, ctx.wire);
            bytes_hops_per_epoch += static_cast<double>(payload) * node_distance(ctx, node);
        }
    }

    cost.sensing = samples_per_epoch * ctx.cost.sample_cost * epochs;
    cost.communication = bytes_hops_per_epoch * ctx.cost.transmit_per_byte * epochs;
    return cost;
}

ExecutionPlan select_strategy(const ValidatedQuery& query, const std::string& parent_query_id,
                              const PlanningContext& ctx, int epochs) {
    ExecutionPlan plan;
    plan.sub_queries = partition_inter(query, *ctx.global_catalog, parent_query_id);

    // Evaluation order doubles as the tie-break: most pushdown first.
    const Strategy order[] = {Strategy::InNetwork, Strategy::SemiDistributed, Strategy::Warehouse};
    bool first = true;
    for (Strategy strategy : order) {
        EnergyCost cost = estimate_cost(strategy, plan.sub_queries, ctx, epochs);
        if (first || cost.total() < plan.estimated_cost.total()) {
            plan.strategy = strategy;
            plan.estimated_cost = cost;
            first = false;
        }
    }
    return plan;
}

}  // namespace wsnq
