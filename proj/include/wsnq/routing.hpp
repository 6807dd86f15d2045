#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wsnq/query_ast.hpp"
#include "wsnq/topology.hpp"

namespace wsnq {

// Query-fragment message disseminated toward the target network's cluster
// heads. The fusion-node id trail is carried along, so every retained copy
// knows the path it traveled.
struct PheMsg {
    std::string msg_id;
    std::string parent_query_id;
    std::string target_network;
    std::set<std::string> phenomenon_filter;
    QueryAst residual_ast;
    std::vector<std::string> fusion_path;   // origin ... holder, acyclic
    int64_t response_slot = 0;              // strictly in the future at send
    std::optional<std::string> grouping_condition;
};

enum class FloodAction { Retained, DiscardedDuplicate, DiscardedWrongBranch, Terminal };

const char* flood_action_name(FloodAction action);

struct FloodEvent {
    int64_t time_us = 0;
    std::string node;
    std::string from;  // empty for the origin's own broadcast
    FloodAction action = FloodAction::Retained;
};

struct FloodTrace {
    std::string msg_id;
    std::vector<FloodEvent> events;           // delivery order
    size_t transmissions = 0;                 // broadcasts sent
    std::vector<std::pair<int64_t, std::string>> broadcasts;  // (time, sender)
    std::set<std::string> retained;           // incl. terminal holders
    std::set<std::string> terminal;           // target cluster heads reached
    std::map<std::string, std::string> delivered_by;   // retained node -> sender
    std::map<std::string, std::vector<std::string>> fusion_paths;  // node -> origin..node
};

// Greedy multipoint-relay election: repeatedly pick the neighbor covering
// the most uncovered 2-hop nodes, ties by smallest node id. A node with no
// 2-hop neighborhood elects nobody.
std::set<std::string> compute_mpr_set(const std::string& node, const Topology& topology);

// MPR flooding of a Phe_Msg over the dissemination overlay (sink, fusion
// nodes, cluster heads; sensors are tasked by their head later and take no
// part here). A broadcast reaches every overlay neighbor except the node
// the copy came from. First receipt classifies the node:
//   - cluster head of the target network: terminal, consumed, not forwarded
//   - other cluster head, or a fusion node through which no target head is
//     reachable (residual overlay, sender and origin excluded): wrong branch
//   - fusion node on a live branch: retained; rebroadcasts only if the
//     sender elected it as relay (MPR election restricted to relay-capable
//     neighbors)
// Repeat receipts are discarded as duplicates. Raises UnreachableTarget
// when no target cluster head retains the message.
FloodTrace flood_phe_msg(const Topology& topology, const std::string& origin, const PheMsg& msg,
                         int64_t start_time_us = 0, int64_t hop_latency_us = 0);

// Err flood after a link failure: same relay discipline, no target filter,
// every overlay node retains its first copy.
FloodTrace flood_err(const Topology& topology, const std::string& origin, const std::string& msg_id,
                     int64_t start_time_us = 0, int64_t hop_latency_us = 0);

// Working vertex of the modified Bellman-Ford pass. flag = 1 marks vertices
// that received & retained the Phe_Msg; only edges between flagged vertices
// relax.
struct RouteVertex {
    std::string id;
    bool flag = false;
};

struct DirectedEdge {
    std::string from;
    std::string to;
    double weight = 1.0;
};

// Up to three routes, each source ... sink, pairwise edge-disjoint because
// extraction deletes traversed edges (and their reverses) before the next
// pass. routes[0] is the shortest path over flagged vertices.
struct RouteTable {
    std::vector<std::vector<std::string>> routes;
    std::vector<double> distances;

    bool uses_edge(const std::string& a, const std::string& b) const;
    // Drops every route containing edge {a,b}; survivors keep their order,
    // so the next stored route is promoted automatically.
    size_t drop_routes_using(const std::string& a, const std::string& b);
};

// Modified Bellman-Ford, three shortest paths by reverse forwarding:
// distances grow from the sink, |V|-1 relaxation rounds per pass over
// flagged edges, negative-cycle check each pass, route extraction walks
// predecessors source -> sink and deletes the edges it used. Distances and
// predecessors are re-initialized every pass so extraction always reflects
// the residual graph. Returns fewer than three routes once the residual
// graph disconnects. Raises NegativeCycle / NoPath.
RouteTable bellman_ford_k3(const std::vector<RouteVertex>& vertices,
                           const std::vector<DirectedEdge>& edges, const std::string& source,
                           const std::string& sink);

// Convenience: build flagged vertices and directed edges from a flood
// trace (retained nodes, topology edges between them, both directions).
RouteTable routes_from_flood(const Topology& topology, const FloodTrace& trace,
                             const std::string& source, const std::string& sink);

struct RootedTree {
    std::string root;
    std::map<std::string, std::string> parent;  // child -> parent, root absent

    int depth_of(const std::string& node) const;
    int max_depth() const;
};

// Deadline for every non-root node to answer its parent:
//   deadline(n) = base_slot - delta * depth(n)
// so children always answer strictly before their parents expect to hear
// them. Raises InsufficientWindow when base_slot - delta * max_depth <= now.
std::map<std::string, int64_t> schedule_time_slots(const RootedTree& tree, int64_t base_slot_us,
                                                   int64_t delta_us, int64_t now_us);

// Stored route tables, keyed by the querying node (cluster head).
class RouteStore {
public:
    void put(const std::string& owner, RouteTable table) { tables_[owner] = std::move(table); }
    bool has(const std::string& owner) const { return tables_.count(owner) > 0; }
    const RouteTable& get(const std::string& owner) const;
    RouteTable& get_mutable(const std::string& owner);
    const std::map<std::string, RouteTable>& tables() const { return tables_; }
    std::map<std::string, RouteTable>& tables_mutable() { return tables_; }

private:
    std::map<std::string, RouteTable> tables_;
};

struct LinkFailureOutcome {
    std::vector<FloodTrace> err_traces;                        // one per overlay endpoint
    std::vector<std::pair<std::string, size_t>> invalidated;   // (owner, dropped count)
};

// Removes the edge, floods Err from both overlay endpoints, and drops every
// stored route that used the failed link. Raises UnknownEdge.
LinkFailureOutcome handle_link_failure(Topology& topology, const std::string& a,
                                       const std::string& b, RouteStore& store,
                                       int64_t time_us = 0, int64_t hop_latency_us = 0);

}  // namespace wsnq
