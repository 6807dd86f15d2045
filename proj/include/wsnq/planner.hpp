#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "wsnq/metadata.hpp"
#include "wsnq/query_validator.hpp"
#include "wsnq/topology.hpp"

namespace wsnq {

enum class Strategy { Warehouse, SemiDistributed, InNetwork };

const char* strategy_name(Strategy strategy);

struct EnergyCost {
    double sensing = 0.0;
    double communication = 0.0;
    double total() const { return sensing + communication; }
};

// One per-WSN query fragment.
struct SubQuery {
    std::string parent_query_id;
    std::string target_network;
    std::set<std::string> phenomenon_filter;  // subset of the target's phenomena
    QueryAst residual_ast;                    // restricted to what the target senses
};

struct ExecutionPlan {
    Strategy strategy = Strategy::InNetwork;
    std::vector<SubQuery> sub_queries;
    EnergyCost estimated_cost;
};

// Abstract energy units; the paper names the two components but fixes no
// constants, so all rates are configuration.
struct CostParams {
    double transmit_per_byte = 1.0;
    double receive_per_byte = 0.5;
    double sample_cost = 2.0;
};

// Wire sizes. Partial state records are 8 bytes of payload plus a 4-byte
// group tag when the query is grouped; raw tuples weigh the sum of their
// attribute sizes from the virtual stats; pushed-down tuples are projected
// to the referenced attributes but never below min_tuple_bytes. Control
// traffic (floods, metadata) carries no modeled payload by default.
struct WireParams {
    int psr_payload_bytes = 8;
    int group_tag_bytes = 4;
    int min_tuple_bytes = 8;
    int control_bytes = 0;
    int metadata_bytes = 0;
};

struct PlanningContext {
    const Topology* topology = nullptr;
    const GlobalCatalog* global_catalog = nullptr;
    const std::map<std::string, LocalCatalog>* local_catalogs = nullptr;
    CostParams cost;
    WireParams wire;
};

// One SubQuery per network in scope; the residual AST keeps only items
// whose attributes the target senses (built-ins always survive).
std::vector<SubQuery> partition_inter(const ValidatedQuery& query, const GlobalCatalog& catalog,
                                      const std::string& parent_query_id);

// Per-sensor-class sensing order within one cluster.
struct SensingTask {
    std::string phenomenon;
    std::set<std::string> nodes;
    std::vector<Predicate> predicates;  // restricted to this class + built-ins
};

struct IntraPartition {
    std::map<std::string, SensingTask> tasks;   // phenomenon -> task
    std::set<std::string> missing;              // flagged empty sensor classes
};

// An empty phenomenon filter tasks every class present in the cluster.
// Phenomena with no nodes here are flagged in `missing` and contribute no
// rows rather than failing the query.
IntraPartition partition_intra(const SubQuery& sub, const LocalCatalog& cluster_catalog,
                               const GlobalCatalog& global_catalog);

// Group identity costs the tag on every record of a grouped query, no
// matter the strategy; otherwise the pushdown comparison would be skewed.
int group_overhead_bytes(const QueryAst& ast, const WireParams& wire);

// Raw tuple payload: every schema attribute of the class, sized from the
// cluster's virtual stats, plus the group tag when grouped. Raises
// MissingStats.
int full_tuple_bytes(const std::string& phenomenon, const QueryAst& ast,
                     const LocalCatalog& cluster_catalog, const GlobalCatalog& global_catalog,
                     const WireParams& wire);

// Pushed-down tuple payload: referenced value attributes of the class,
// floored at min_tuple_bytes, plus the group tag when grouped.
int projected_tuple_bytes(const std::string& phenomenon, const QueryAst& ast,
                          const LocalCatalog& cluster_catalog, const GlobalCatalog& global_catalog,
                          const WireParams& wire);

int psr_bytes(const QueryAst& ast, const WireParams& wire);

// Predicted per-run energy for one strategy over the plan's sub-queries.
// Communication counts the transmit side of every predicted record-hop
// (receive energy scales uniformly with it and cannot change the argmin);
// tuples are assumed to pass their predicates since the catalog keeps no
// selectivity statistics. Deterministic for fixed inputs.
EnergyCost estimate_cost(Strategy strategy, const std::vector<SubQuery>& sub_queries,
                         const PlanningContext& ctx, int epochs);

// Minimal estimated total cost wins; ties prefer the strategy that pushes
// the most work down: InNetwork, then SemiDistributed, then Warehouse.
ExecutionPlan select_strategy(const ValidatedQuery& query, const std::string& parent_query_id,
                              const PlanningContext& ctx, int epochs);

}  // namespace wsnq
