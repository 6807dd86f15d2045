#include "wsnq/topology.hpp"

#include <algorithm>
#include <queue>

#include "wsnq/error.hpp"

namespace wsnq {

const char* role_name(Role role) {
    switch (role) {
        case Role::Sink: return "sink";
        case Role::Fusion: return "fusion";
        case Role::ClusterHead: return "cluster_head";
        case Role::Sensor: return "sensor";
    }
    return "?";
}

void Topology::bump() { ++version_; }

void Topology::add_node(NodeInfo info) {
    if (nodes_.count(info.id))
        fail(ErrorCode::SchemaError, "duplicate node id '" + info.id + "' in topology");
    adjacency_[info.id];
    nodes_.emplace(info.id, std::move(info));
    bump();
}

void Topology::add_edge(const std::string& a, const std::string& b, double weight) {
    if (!nodes_.count(a) || !nodes_.count(b))
        fail(ErrorCode::SchemaError, "edge endpoint missing: " + a + " -- " + b);
    if (a == b) fail(ErrorCode::SchemaError, "self-loop on node '" + a + "'");
    if (has_edge(a, b)) fail(ErrorCode::SchemaError, "duplicate edge " + a + " -- " + b);
    edges_.push_back({a, b, weight});
    auto insert_sorted = [](std::vector<std::string>& vec, const std::string& id) {
        vec.insert(std::lower_bound(vec.begin(), vec.end(), id), id);
    };
    insert_sorted(adjacency_[a], b);
    insert_sorted(adjacency_[b], a);
    weights_[{a, b}] = weight;
    weights_[{b, a}] = weight;
    bump();
}

void Topology::remove_edge(const std::string& a, const std::string& b) {
    if (!has_edge(a, b))
        fail(ErrorCode::UnknownEdge, "no edge " + a + " -- " + b);
    edges_.erase(std::remove_if(edges_.begin(), edges_.end(),
                                [&](const Edge& e) {
                                    return (e.a == a && e.b == b) || (e.a == b && e.b == a);
                                }),
                 edges_.end());
    auto erase_from = [](std::vector<std::string>& vec, const std::string& id) {
        vec.erase(std::remove(vec.begin(), vec.end(), id), vec.end());
    };
    erase_from(adjacency_[a], b);
    erase_from(adjacency_[b], a);
    weights_.erase({a, b});
    weights_.erase({b, a});
    bump();
}

bool Topology::has_edge(const std::string& a, const std::string& b) const {
    return weights_.count({a, b}) > 0;
}

bool Topology::has_node(const std::string& id) const { return nodes_.count(id) > 0; }

const NodeInfo& Topology::node(const std::string& id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) fail(ErrorCode::SchemaError, "unknown node '" + id + "'");
    return it->second;
}

const std::vector<std::string>& Topology::neighbors(const std::string& id) const {
    auto it = adjacency_.find(id);
    if (it == adjacency_.end()) fail(ErrorCode::SchemaError, "unknown node '" + id + "'");
    return it->second;
}

double Topology::edge_weight(const std::string& a, const std::string& b) const {
    auto it = weights_.find({a, b});
    if (it == weights_.end()) fail(ErrorCode::UnknownEdge, "no edge " + a + " -- " + b);
    return it->second;
}

const std::string& Topology::sink_id() const {
    for (const auto& [id, info] : nodes_)
        if (info.role == Role::Sink) return id;
    fail(ErrorCode::SchemaError, "topology has no sink");
}

std::vector<std::string> Topology::cluster_heads() const {
    std::vector<std::string> out;
    for (const auto& [id, info] : nodes_)
        if (info.role == Role::ClusterHead) out.push_back(id);
    return out;
}

std::vector<std::string> Topology::cluster_heads_of(const std::string& network_id) const {
    std::vector<std::string> out;
    for (const auto& [id, info] : nodes_)
        if (info.role == Role::ClusterHead && info.network_id == network_id) out.push_back(id);
    return out;
}

std::vector<std::string> Topology::cluster_members(const std::string& head_id) const {
    std::vector<std::string> out;
    for (const auto& [id, info] : nodes_) {
        if (id == head_id) continue;
        if (info.cluster_id == head_id) out.push_back(id);
    }
    return out;
}

void Topology::validate() const {
    int sinks = 0;
    for (const auto& [id, info] : nodes_) {
        if (info.role == Role::Sink) ++sinks;
        if (info.role == Role::Sensor) {
            if (info.cluster_id.empty())
                fail(ErrorCode::SchemaError, "sensor '" + id + "' has no cluster head");
            auto it = nodes_.find(info.cluster_id);
            if (it == nodes_.end() || it->second.role != Role::ClusterHead)
                fail(ErrorCode::SchemaError,
                     "sensor '" + id + "' names dangling cluster head '" + info.cluster_id + "'");
        }
        if (info.role == Role::ClusterHead && info.network_id.empty())
            fail(ErrorCode::SchemaError, "cluster head '" + id + "' has no network id");
    }
    if (sinks != 1)
        fail(ErrorCode::SchemaError,
             "topology must contain exactly one sink, found " + std::to_string(sinks));
    if (!is_connected()) fail(ErrorCode::DisconnectedTopology, "topology is not connected");
}

bool Topology::is_connected() const {
    if (nodes_.empty()) return true;
    std::set<std::string> seen;
    std::queue<std::string> frontier;
    frontier.push(nodes_.begin()->first);
    seen.insert(nodes_.begin()->first);
    while (!frontier.empty()) {
        std::string cur = frontier.front();
        frontier.pop();
        for (const auto& nbr : adjacency_.at(cur)) {
            if (seen.insert(nbr).second) frontier.push(nbr);
        }
    }
    return seen.size() == nodes_.size();
}

const std::map<std::string, Topology::TreeEntry>& Topology::collection_tree() const {
    if (tree_version_ == version_) return tree_;
    tree_.clear();
    for (const auto& [id, info] : nodes_) tree_[id];

    const std::string& root = sink_id();
    // Dijkstra; on equal distance the smaller parent id wins, which keeps
    // the tree deterministic for any edge insertion order.
    std::map<std::string, double> dist;
    for (const auto& [id, info] : nodes_) dist[id] = -1.0;
    using Item = std::pair<double, std::string>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    heap.push({0.0, root});
    dist[root] = 0.0;
    tree_[root].reachable = true;
    std::set<std::string> done;
    while (!heap.empty()) {
        auto [d, id] = heap.top();
        heap.pop();
        if (done.count(id)) continue;
        done.insert(id);
        for (const auto& nbr : adjacency_.at(id)) {
            double nd = d + weights_.at({id, nbr});
            if (dist[nbr] < 0 || nd < dist[nbr] ||
                (nd == dist[nbr] && !done.count(nbr) && id < tree_[nbr].parent)) {
                dist[nbr] = nd;
                tree_[nbr].parent = id;
                tree_[nbr].distance = nd;
                tree_[nbr].reachable = true;
                heap.push({nd, nbr});
            }
        }
    }
    // Depths follow parent pointers.
    for (auto& [id, entry] : tree_) {
        if (!entry.reachable || id == root) continue;
        int depth = 0;
        std::string cur = id;
        while (cur != root) {
            cur = tree_.at(cur).parent;
            ++depth;
        }
        entry.depth = depth;
    }
    tree_version_ = version_;
    return tree_;
}

std::vector<std::string> Topology::path_to_sink(const std::string& id) const {
    const auto& tree = collection_tree();
    auto it = tree.find(id);
    if (it == tree.end() || !it->second.reachable)
        fail(ErrorCode::UnreachableNode, "node '" + id + "' has no path to the sink");
    std::vector<std::string> path{id};
    const std::string& root = sink_id();
    std::string cur = id;
    while (cur != root) {
        cur = tree.at(cur).parent;
        path.push_back(cur);
    }
    return path;
}

void Topology::finalize_ordinals() {
    int64_t ordinal = 0;
    for (auto& [id, info] : nodes_) info.ordinal = ordinal++;
}

}  // namespace wsnq
