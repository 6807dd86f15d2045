#include "wsnq/routing.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <queue>

#include "wsnq/error.hpp"

namespace wsnq {

const char* flood_action_name(FloodAction action) {
    switch (action) {
        case FloodAction::Retained: return "retained";
        case FloodAction::DiscardedDuplicate: return "discarded-duplicate";
        case FloodAction::DiscardedWrongBranch: return "discarded-wrong-branch";
        case FloodAction::Terminal: return "terminal";
    }
    return "?";
}

namespace {

bool relay_capable(const NodeInfo& info) {
    return info.role == Role::Fusion || info.role == Role::Sink;
}

bool on_overlay(const NodeInfo& info) { return info.role != Role::Sensor; }

// Greedy cover: candidates that add the most uncovered nodes win, ties by
// smallest id. Stops when nothing more can be covered.
std::set<std::string> greedy_cover(const std::vector<std::string>& candidates,
                                   const std::map<std::string, std::set<std::string>>& coverage,
                                   std::set<std::string> to_cover) {
    std::set<std::string> chosen;
    while (!to_cover.empty()) {
        std::string best;
        size_t best_gain = 0;
        for (const auto& candidate : candidates) {
            if (chosen.count(candidate)) continue;
            size_t gain = 0;
            auto it = coverage.find(candidate);
            if (it != coverage.end())
                for (const auto& covered : it->second)
                    if (to_cover.count(covered)) ++gain;
            if (gain > best_gain) {
                best_gain = gain;
                best = candidate;
            }
        }
        if (best_gain == 0) break;  // rest is uncoverable
        chosen.insert(best);
        for (const auto& covered : coverage.at(best))
            to_cover.erase(covered);
    }
    return chosen;
}

std::set<std::string> mpr_set_impl(const std::string& node, const Topology& topology,
                                   bool overlay_only, bool relay_candidates_only) {
    auto keep = [&](const std::string& id) {
        return !overlay_only || on_overlay(topology.node(id));
    };
    if (!keep(node)) return {};
    std::vector<std::string> neighbors;
    for (const auto& nbr : topology.neighbors(node))
        if (keep(nbr)) neighbors.push_back(nbr);

    std::set<std::string> one_hop(neighbors.begin(), neighbors.end());
    std::set<std::string> two_hop;
    std::map<std::string, std::set<std::string>> coverage;
    for (const auto& nbr : neighbors) {
        for (const auto& nn : topology.neighbors(nbr)) {
            if (nn == node || one_hop.count(nn) || !keep(nn)) continue;
            two_hop.insert(nn);
            coverage[nbr].insert(nn);
        }
    }
    std::vector<std::string> candidates;
    for (const auto& nbr : neighbors) {
        if (relay_candidates_only && !relay_capable(topology.node(nbr))) continue;
        candidates.push_back(nbr);
    }
    return greedy_cover(candidates, coverage, std::move(two_hop));
}

// True when some cluster head of `network` is reachable from `from` with
// fusion-only intermediate hops, never stepping through `exclude_a` or
// `exclude_b`.
bool leads_to_network(const Topology& topology, const std::string& from,
                      const std::string& network, const std::string& exclude_a,
                      const std::string& exclude_b) {
    std::set<std::string> seen{from};
    std::deque<std::string> frontier{from};
    while (!frontier.empty()) {
        std::string cur = frontier.front();
        frontier.pop_front();
        for (const auto& nbr : topology.neighbors(cur)) {
            if (nbr == exclude_a || nbr == exclude_b || seen.count(nbr)) continue;
            const NodeInfo& info = topology.node(nbr);
            if (info.role == Role::ClusterHead && info.network_id == network) return true;
            seen.insert(nbr);
            // Only fusion nodes forward, so only they extend the search.
            if (info.role == Role::Fusion) frontier.push_back(nbr);
        }
    }
    return false;
}

struct FloodParams {
    std::string origin;
    std::string msg_id;
    bool has_target = false;
    std::string target_network;
    int64_t start_time = 0;
    int64_t hop_latency = 0;
};

FloodTrace run_flood(const Topology& topology, const FloodParams& params) {
    FloodTrace trace;
    trace.msg_id = params.msg_id;
    const NodeInfo& origin_info = topology.node(params.origin);
    if (origin_info.role == Role::Sensor)
        fail(ErrorCode::ContractViolation, "flood origin '" + params.origin + "' is a sensor");

    std::set<std::string> seen{params.origin};
    trace.retained.insert(params.origin);
    trace.fusion_paths[params.origin] = {params.origin};

    struct Broadcast {
        std::string sender;
        std::string received_from;
        int64_t time;
    };
    std::deque<Broadcast> queue{{params.origin, "", params.start_time}};

    while (!queue.empty()) {
        Broadcast bc = queue.front();
        queue.pop_front();
        ++trace.transmissions;
        trace.broadcasts.push_back({bc.time, bc.sender});
        std::set<std::string> sender_mprs =
            mpr_set_impl(bc.sender, topology, /*overlay_only=*/true, /*relay_candidates_only=*/true);
        int64_t arrival = bc.time + params.hop_latency;
        for (const auto& nbr : topology.neighbors(bc.sender)) {
            if (nbr == bc.received_from) continue;
            const NodeInfo& info = topology.node(nbr);
            if (!on_overlay(info)) continue;
            if (seen.count(nbr)) {
                trace.events.push_back({arrival, nbr, bc.sender, FloodAction::DiscardedDuplicate});
                continue;
            }
            seen.insert(nbr);
            FloodAction action;
            bool forward = false;
            if (info.role == Role::ClusterHead) {
                if (params.has_target && info.network_id == params.target_network) {
                    action = FloodAction::Terminal;
                } else if (params.has_target) {
                    action = FloodAction::DiscardedWrongBranch;
                } else {
                    action = FloodAction::Retained;  // Err floods stop here too
                }
            } else if (!params.has_target) {
                action = FloodAction::Retained;
                forward = true;
            } else if (leads_to_network(topology, nbr, params.target_network, bc.sender,
                                        params.origin)) {
                action = FloodAction::Retained;
                forward = true;
            } else {
                action = FloodAction::DiscardedWrongBranch;
            }
            trace.events.push_back({arrival, nbr, bc.sender, action});
            if (action == FloodAction::Retained || action == FloodAction::Terminal) {
                trace.retained.insert(nbr);
                trace.delivered_by[nbr] = bc.sender;
                auto path = trace.fusion_paths.at(bc.sender);
                path.push_back(nbr);
                trace.fusion_paths[nbr] = std::move(path);
                if (action == FloodAction::Terminal) trace.terminal.insert(nbr);
            }
            if (forward && sender_mprs.count(nbr)) queue.push_back({nbr, bc.sender, arrival});
        }
    }
    return trace;
}

}  // namespace

std::set<std::string> compute_mpr_set(const std::string& node, const Topology& topology) {
    if (topology.neighbors(node).empty())
        fail(ErrorCode::ContractViolation, "MPR election needs at least one neighbor");
    return mpr_set_impl(node, topology, /*overlay_only=*/false, /*relay_candidates_only=*/false);
}

FloodTrace flood_phe_msg(const Topology& topology, const std::string& origin, const PheMsg& msg,
                         int64_t start_time_us, int64_t hop_latency_us) {
    FloodParams params;
    params.origin = origin;
    params.msg_id = msg.msg_id;
    params.has_target = true;
    params.target_network = msg.target_network;
    params.start_time = start_time_us;
    params.hop_latency = hop_latency_us;
    FloodTrace trace = run_flood(topology, params);
    if (trace.terminal.empty())
        fail(ErrorCode::UnreachableTarget,
             "no cluster head of network '" + msg.target_network + "' retained message '" +
                 msg.msg_id + "'");
    return trace;
}

FloodTrace flood_err(const Topology& topology, const std::string& origin, const std::string& msg_id,
                     int64_t start_time_us, int64_t hop_latency_us) {
    FloodParams params;
    params.origin = origin;
    params.msg_id = msg_id;
    params.has_target = false;
    params.start_time = start_time_us;
    params.hop_latency = hop_latency_us;
    return run_flood(topology, params);
}

bool RouteTable::uses_edge(const std::string& a, const std::string& b) const {
    for (const auto& route : routes) {
        for (size_t i = 0; i + 1 < route.size(); ++i) {
            if ((route[i] == a && route[i + 1] == b) || (route[i] == b && route[i + 1] == a))
                return true;
        }
    }
    return false;
}

size_t RouteTable::drop_routes_using(const std::string& a, const std::string& b) {
    size_t dropped = 0;
    for (size_t r = 0; r < routes.size();) {
        bool uses = false;
        for (size_t i = 0; i + 1 < routes[r].size(); ++i) {
            if ((routes[r][i] == a && routes[r][i + 1] == b) ||
                (routes[r][i] == b && routes[r][i + 1] == a)) {
                uses = true;
                break;
            }
        }
        if (uses) {
            routes.erase(routes.begin() + static_cast<long>(r));
            distances.erase(distances.begin() + static_cast<long>(r));
            ++dropped;
        } else {
            ++r;
        }
    }
    return dropped;
}

RouteTable bellman_ford_k3(const std::vector<RouteVertex>& vertices,
                           const std::vector<DirectedEdge>& edges, const std::string& source,
                           const std::string& sink) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::map<std::string, bool> flag;
    for (const auto& v : vertices) flag[v.id] = v.flag;
    if (!flag.count(source) || !flag.count(sink))
        fail(ErrorCode::ContractViolation, "source and sink must be listed vertices");

    // Mutable edge list, sorted for deterministic relaxation order.
    std::vector<DirectedEdge> residual = edges;
    std::sort(residual.begin(), residual.end(), [](const DirectedEdge& x, const DirectedEdge& y) {
        return std::tie(x.from, x.to) < std::tie(y.from, y.to);
    });

    RouteTable table;
    for (int p = 1; p <= 3; ++p) {
        // Re-initialized every pass, otherwise stale predecessors would
        // point through edges deleted by earlier extractions.
        std::map<std::string, double> dist;
        std::map<std::string, std::string> pred;
        for (const auto& v : vertices) dist[v.id] = v.id == sink ? 0.0 : kInf;

        for (size_t round = 1; round + 1 <= vertices.size(); ++round) {
            for (const auto& edge : residual) {
                if (!flag.at(edge.from) || !flag.at(edge.to)) continue;
                if (dist.at(edge.from) == kInf) continue;
                double candidate = dist.at(edge.from) + edge.weight;
                if (candidate < dist.at(edge.to)) {
                    dist[edge.to] = candidate;
                    pred[edge.to] = edge.from;
                }
            }
        }
        for (const auto& edge : residual) {
            if (!flag.at(edge.from) || !flag.at(edge.to)) continue;
            if (dist.at(edge.from) == kInf) continue;
            if (dist.at(edge.from) + edge.weight < dist.at(edge.to))
                fail(ErrorCode::NegativeCycle, "graph contains a negative-weight cycle");
        }

        if (dist.at(source) == kInf) {
            if (p == 1) fail(ErrorCode::NoPath, "no route from '" + source + "' to '" + sink + "'");
            break;
        }

        std::vector<std::string> route;
        std::set<std::string> visited;
        std::string v = source;
        while (v != sink) {
            if (!visited.insert(v).second)
                fail(ErrorCode::NegativeCycle, "predecessor chain cycles through '" + v + "'");
            route.push_back(v);
            auto it = pred.find(v);
            if (it == pred.end())
                fail(ErrorCode::ContractViolation, "broken predecessor chain at '" + v + "'");
            const std::string& next = it->second;
            residual.erase(std::remove_if(residual.begin(), residual.end(),
                                          [&](const DirectedEdge& e) {
                                              return (e.from == v && e.to == next) ||
                                                     (e.from == next && e.to == v);
                                          }),
                           residual.end());
            v = next;
        }
        route.push_back(sink);
        table.routes.push_back(std::move(route));
        table.distances.push_back(dist.at(source));
    }
    return table;
}

RouteTable routes_from_flood(const Topology& topology, const FloodTrace& trace,
                             const std::string& source, const std::string& sink) {
    std::vector<RouteVertex> vertices;
    for (const auto& [id, info] : topology.nodes())
        vertices.push_back({id, trace.retained.count(id) > 0});
    std::vector<DirectedEdge> edges;
    for (const auto& edge : topology.edges()) {
        edges.push_back({edge.a, edge.b, edge.weight});
        edges.push_back({edge.b, edge.a, edge.weight});
    }
    return bellman_ford_k3(vertices, edges, source, sink);
}

int RootedTree::depth_of(const std::string& node) const {
    int depth = 0;
    std::string cur = node;
    while (cur != root) {
        auto it = parent.find(cur);
        if (it == parent.end())
            fail(ErrorCode::ContractViolation, "node '" + cur + "' is not attached to the tree");
        cur = it->second;
        if (++depth > static_cast<int>(parent.size()) + 1)
            fail(ErrorCode::ContractViolation, "parent map contains a cycle");
    }
    return depth;
}

int RootedTree::max_depth() const {
    int out = 0;
    for (const auto& [child, p] : parent) out = std::max(out, depth_of(child));
    return out;
}

std::map<std::string, int64_t> schedule_time_slots(const RootedTree& tree, int64_t base_slot_us,
                                                   int64_t delta_us, int64_t now_us) {
    if (delta_us <= 0) fail(ErrorCode::ContractViolation, "slot delta must be positive");
    int max_depth = tree.max_depth();
    if (base_slot_us - static_cast<int64_t>(max_depth) * delta_us <= now_us)
        fail(ErrorCode::InsufficientWindow,
             "collection window cannot fit " + std::to_string(max_depth) + " slot levels");
    std::map<std::string, int64_t> deadlines;
    for (const auto& [child, p] : tree.parent)
        deadlines[child] = base_slot_us - static_cast<int64_t>(tree.depth_of(child)) * delta_us;
    return deadlines;
}

const RouteTable& RouteStore::get(const std::string& owner) const {
    auto it = tables_.find(owner);
    if (it == tables_.end()) fail(ErrorCode::NoPath, "no stored routes for '" + owner + "'");
    return it->second;
}

RouteTable& RouteStore::get_mutable(const std::string& owner) {
    auto it = tables_.find(owner);
    if (it == tables_.end()) fail(ErrorCode::NoPath, "no stored routes for '" + owner + "'");
    return it->second;
}

LinkFailureOutcome handle_link_failure(Topology& topology, const std::string& a,
                                       const std::string& b, RouteStore& store, int64_t time_us,
                                       int64_t hop_latency_us) {
    if (!topology.has_edge(a, b)) fail(ErrorCode::UnknownEdge, "no edge " + a + " -- " + b);
    topology.remove_edge(a, b);

    LinkFailureOutcome outcome;
    int err_seq = 0;
    for (const std::string& endpoint : {a, b}) {
        if (topology.node(endpoint).role == Role::Sensor) continue;
        std::string msg_id = "err:" + a + "--" + b + ":" + std::to_string(err_seq++);
        outcome.err_traces.push_back(
            flood_err(topology, endpoint, msg_id, time_us, hop_latency_us));
    }
    for (auto& [owner, table] : store.tables_mutable()) {
        size_t dropped = table.drop_routes_using(a, b);
        if (dropped > 0) outcome.invalidated.push_back({owner, dropped});
    }
    return outcome;
}

}  // namespace wsnq
