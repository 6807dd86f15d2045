#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace wsnq {

enum class Role { Sink, Fusion, ClusterHead, Sensor };

const char* role_name(Role role);

struct NodeInfo {
    std::string id;
    Role role = Role::Sensor;
    std::string network_id;   // cluster heads and sensors
    std::string cluster_id;   // sensors: owning cluster head; heads: own id
    std::string region;       // built-in `region` attribute value
    std::string phenomenon;   // empty for non-sensing nodes
    int64_t ordinal = 0;      // built-in `nodeid` value, assigned by id order

    bool senses() const { return !phenomenon.empty(); }
};

struct Edge {
    std::string a;
    std::string b;
    double weight = 1.0;
};

// Undirected weighted node graph with role labels. Mutable only through
// add_* and remove_edge; shortest-path state is recomputed lazily.
class Topology {
public:
    void add_node(NodeInfo info);
    void add_edge(const std::string& a, const std::string& b, double weight);
    // Removes the edge or raises ErrorCode::UnknownEdge.
    void remove_edge(const std::string& a, const std::string& b);
    bool has_edge(const std::string& a, const std::string& b) const;

    bool has_node(const std::string& id) const;
    const NodeInfo& node(const std::string& id) const;
    const std::map<std::string, NodeInfo>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }

    // Neighbor ids in ascending order (the tie-break order used everywhere).
    const std::vector<std::string>& neighbors(const std::string& id) const;
    double edge_weight(const std::string& a, const std::string& b) const;

    const std::string& sink_id() const;
    std::vector<std::string> cluster_heads() const;
    std::vector<std::string> cluster_heads_of(const std::string& network_id) const;
    std::vector<std::string> cluster_members(const std::string& head_id) const;

    // Structural checks: exactly one sink, sensors attached to a registered
    // cluster head, heads carry a network id, graph connected. Raises
    // ErrorCode::SchemaError / DisconnectedTopology.
    void validate() const;
    bool is_connected() const;

    // Sink-rooted shortest-path tree over link weights, parent ties broken
    // by smallest node id. Distance is the weighted path length, depth the
    // hop count along the tree.
    struct TreeEntry {
        std::string parent;  // empty for the sink and unreachable nodes
        double distance = 0.0;
        int depth = 0;
        bool reachable = false;
    };
    const std::map<std::string, TreeEntry>& collection_tree() const;
    // Tree path node → sink, both endpoints included; raises
    // ErrorCode::UnreachableNode when the node has no path.
    std::vector<std::string> path_to_sink(const std::string& id) const;

    // Assigns ordinals by ascending node id; called once after loading.
    void finalize_ordinals();

    uint64_t version() const { return version_; }

private:
    std::map<std::string, NodeInfo> nodes_;
    std::vector<Edge> edges_;
    std::map<std::string, std::vector<std::string>> adjacency_;
    std::map<std::pair<std::string, std::string>, double> weights_;
    uint64_t version_ = 0;

    mutable uint64_t tree_version_ = ~0ull;
    mutable std::map<std::string, TreeEntry> tree_;

    void bump();
};

}  // namespace wsnq
