#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wsnq/topology.hpp"

namespace wsnq {

struct GeoCoordinate {
    int degrees = 0;
    int minutes = 0;
    char hemisphere = 'N';  // N/S for latitude, E/W for longitude

    bool operator==(const GeoCoordinate&) const = default;
};

struct WsnLocation {
    GeoCoordinate latitude;   // [0, 90] degrees, hemisphere N or S
    GeoCoordinate longitude;  // [0, 180] degrees, hemisphere E or W

    bool operator==(const WsnLocation&) const = default;
};

// Sink-level static metadata, one entry per registered WSN.
struct GlobalWsnDescriptor {
    std::string network_id;
    int node_count = 0;
    WsnLocation location;
    std::set<std::string> phenomena;
    std::map<std::string, std::string> data_units;  // phenomenon -> unit

    // Raises ErrorCode::InvalidDescriptor on any invariant violation.
    void check() const;
};

// Cluster-level static metadata, one entry per node, held at its head.
struct LocalNodeDescriptor {
    std::string node_id;
    std::string mote_type;
    std::string sensor_type;
    std::string phenomenon;
    int neighbor_count = 0;

    void check() const;
};

// Runtime statistics describing the virtual relation at one cluster head.
struct VirtualStats {
    std::map<std::string, int> attribute_sizes;  // attribute -> bytes, > 0
    int64_t tuple_count = 0;  // resets at epoch boundaries
    int64_t last_update = 0;  // simulated microseconds
};

class GlobalCatalog {
public:
    // Raises DuplicateNetwork / InvalidDescriptor.
    std::string register_wsn(GlobalWsnDescriptor descriptor);

    bool has_network(const std::string& id) const;
    const GlobalWsnDescriptor& network(const std::string& id) const;
    const std::map<std::string, GlobalWsnDescriptor>& networks() const { return networks_; }

    // Exactly the networks whose phenomenon set covers `phenomena`.
    // An empty argument is a contract violation.
    std::set<std::string> lookup_networks(const std::set<std::string>& phenomena) const;

    // Attribute -> phenomenon map (fixed lowercase table; built-ins bypass).
    void map_attribute(const std::string& attribute, const std::string& phenomenon);
    std::optional<std::string> phenomenon_of(const std::string& attribute) const;
    const std::map<std::string, std::string>& attribute_map() const { return attribute_map_; }

    // Tuple schema per phenomenon (value attributes, declaration order).
    void set_schema(const std::string& phenomenon, std::vector<std::string> attributes);
    const std::vector<std::string>& schema(const std::string& phenomenon) const;

private:
    std::map<std::string, GlobalWsnDescriptor> networks_;
    std::map<std::string, std::string> attribute_map_;
    std::map<std::string, std::vector<std::string>> schemas_;
};

class LocalCatalog {
public:
    LocalCatalog() = default;
    explicit LocalCatalog(std::string cluster_id) : cluster_id_(std::move(cluster_id)) {}

    const std::string& cluster_id() const { return cluster_id_; }

    // Raises DuplicateNode / InvalidDescriptor.
    std::string register_node(LocalNodeDescriptor descriptor);

    bool has_node(const std::string& id) const;
    const LocalNodeDescriptor& node(const std::string& id) const;
    const std::map<std::string, LocalNodeDescriptor>& node_descriptors() const { return nodes_; }
    size_t node_count() const { return nodes_.size(); }

    // Nodes of this cluster whose descriptor phenomenon matches.
    std::set<std::string> lookup_sensor_class(const std::string& phenomenon) const;
    std::set<std::string> phenomena_present() const;

    const VirtualStats& virtual_stats() const { return stats_; }
    void seed_attribute_size(const std::string& attribute, int bytes);
    // tuple_count++, size recorded, last_update set. tuple_size must be > 0.
    void update_virtual_stats(const std::string& attribute, int tuple_size, int64_t now_us);
    // Epoch boundary: count resets, sizes retained.
    void reset_epoch_stats();

private:
    std::string cluster_id_;
    std::map<std::string, LocalNodeDescriptor> nodes_;
    std::map<std::string, std::set<std::string>> class_index_;  // phenomenon -> nodes
    VirtualStats stats_;
};

enum class MetadataMode { Centralized, Distributed };

const char* metadata_mode_name(MetadataMode mode);

// One metadata transfer, already routed: path runs cluster head -> sink
// along the collection tree. transmissions() is the hop count.
struct MetadataMessage {
    enum class Kind { NodeDescriptor, NetworkSummary };
    Kind kind = Kind::NodeDescriptor;
    std::string origin;               // cluster head
    std::string subject;              // node id or network id
    std::vector<std::string> path;    // origin ... sink
    size_t transmissions() const { return path.empty() ? 0 : path.size() - 1; }
};

// Centralized: full copy, one message per node descriptor to the sink.
// Distributed: one summary per cluster head carrying the global descriptor
// fields; local descriptors stay in place. Raises UnreachableNode when a
// cluster head has no path to the sink.
std::vector<MetadataMessage> sync_metadata(MetadataMode mode, const Topology& topology,
                                           const GlobalCatalog& global_catalog,
                                           const std::map<std::string, LocalCatalog>& local_catalogs);

}  // namespace wsnq
