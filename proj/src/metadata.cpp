#include "wsnq/metadata.hpp"

#include "wsnq/error.hpp"

namespace wsnq {

void GlobalWsnDescriptor::check() const {
    if (network_id.empty()) fail(ErrorCode::InvalidDescriptor, "network descriptor missing id");
    if (node_count < 1)
        fail(ErrorCode::InvalidDescriptor, "network '" + network_id + "': node_count must be >= 1");
    auto check_coord = [&](const GeoCoordinate& c, int max_deg, char pos, char neg, const char* what) {
        if (c.degrees < 0 || c.degrees > max_deg || c.minutes < 0 || c.minutes > 59 ||
            (c.hemisphere != pos && c.hemisphere != neg))
            fail(ErrorCode::InvalidDescriptor,
                 "network '" + network_id + "': invalid " + what + " coordinate");
    };
    check_coord(location.latitude, 90, 'N', 'S', "latitude");
    check_coord(location.longitude, 180, 'E', 'W', "longitude");
    if (phenomena.empty())
        fail(ErrorCode::InvalidDescriptor, "network '" + network_id + "': empty phenomenon set");
    for (const auto& p : phenomena)
        if (!data_units.count(p))
            fail(ErrorCode::InvalidDescriptor,
                 "network '" + network_id + "': no data unit for phenomenon '" + p + "'");
}

void LocalNodeDescriptor::check() const {
    if (node_id.empty()) fail(ErrorCode::InvalidDescriptor, "node descriptor missing id");
    if (neighbor_count < 0)
        fail(ErrorCode::InvalidDescriptor, "node '" + node_id + "': negative neighbor count");
}

std::string GlobalCatalog::register_wsn(GlobalWsnDescriptor descriptor) {
    descriptor.check();
    if (networks_.count(descriptor.network_id))
        fail(ErrorCode::DuplicateNetwork, "network '" + descriptor.network_id + "' already registered");
    std::string id = descriptor.network_id;
    networks_.emplace(id, std::move(descriptor));
    return id;
}

bool GlobalCatalog::has_network(const std::string& id) const { return networks_.count(id) > 0; }

const GlobalWsnDescriptor& GlobalCatalog::network(const std::string& id) const {
    auto it = networks_.find(id);
    if (it == networks_.end()) fail(ErrorCode::SchemaError, "unknown network '" + id + "'");
    return it->second;
}

std::set<std::string> GlobalCatalog::lookup_networks(const std::set<std::string>& phenomena) const {
    if (phenomena.empty())
        fail(ErrorCode::ContractViolation, "lookup_networks requires a non-empty phenomenon set");
    std::set<std::string> out;
    for (const auto& [id, descriptor] : networks_) {
        bool covers = true;
        for (const auto& p : phenomena) {
            if (!descriptor.phenomena.count(p)) {
                covers = false;
                break;
            }
        }
        if (covers) out.insert(id);
    }
    return out;
}

void GlobalCatalog::map_attribute(const std::string& attribute, const std::string& phenomenon) {
    attribute_map_[attribute] = phenomenon;
}

std::optional<std::string> GlobalCatalog::phenomenon_of(const std::string& attribute) const {
    auto it = attribute_map_.find(attribute);
    if (it == attribute_map_.end()) return std::nullopt;
    return it->second;
}

void GlobalCatalog::set_schema(const std::string& phenomenon, std::vector<std::string> attributes) {
    schemas_[phenomenon] = std::move(attributes);
}

const std::vector<std::string>& GlobalCatalog::schema(const std::string& phenomenon) const {
    static const std::vector<std::string> kEmpty;
    auto it = schemas_.find(phenomenon);
    return it == schemas_.end() ? kEmpty : it->second;
}

std::string LocalCatalog::register_node(LocalNodeDescriptor descriptor) {
    descriptor.check();
    if (nodes_.count(descriptor.node_id))
        fail(ErrorCode::DuplicateNode, "node '" + descriptor.node_id + "' already registered in cluster '" +
                                           cluster_id_ + "'");
    std::string id = descriptor.node_id;
    class_index_[descriptor.phenomenon].insert(id);
    nodes_.emplace(id, std::move(descriptor));
    return id;
}

bool LocalCatalog::has_node(const std::string& id) const { return nodes_.count(id) > 0; }

const LocalNodeDescriptor& LocalCatalog::node(const std::string& id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) fail(ErrorCode::SchemaError, "unknown node '" + id + "'");
    return it->second;
}

std::set<std::string> LocalCatalog::lookup_sensor_class(const std::string& phenomenon) const {
    auto it = class_index_.find(phenomenon);
    if (it == class_index_.end()) return {};
    return it->second;
}

std::set<std::string> LocalCatalog::phenomena_present() const {
    std::set<std::string> out;
    for (const auto& [phenomenon, ids] : class_index_)
        if (!phenomenon.empty() && !ids.empty()) out.insert(phenomenon);
    return out;
}

void LocalCatalog::seed_attribute_size(const std::string& attribute, int bytes) {
    if (bytes <= 0) fail(ErrorCode::InvalidDescriptor, "attribute size must be positive");
    stats_.attribute_sizes[attribute] = bytes;
}

void LocalCatalog::update_virtual_stats(const std::string& attribute, int tuple_size, int64_t now_us) {
    if (tuple_size <= 0) fail(ErrorCode::ContractViolation, "tuple_size must be > 0");
    stats_.attribute_sizes[attribute] = tuple_size;
    ++stats_.tuple_count;
    stats_.last_update = now_us;
}

void LocalCatalog::reset_epoch_stats() { stats_.tuple_count = 0; }

const char* metadata_mode_name(MetadataMode mode) {
    return mode == MetadataMode::Centralized ? "centralized" : "distributed";
}

std::vector<MetadataMessage> sync_metadata(MetadataMode mode, const Topology& topology,
                                           const GlobalCatalog& global_catalog,
                                           const std::map<std::string, LocalCatalog>& local_catalogs) {
    (void)global_catalog;
    std::vector<MetadataMessage> out;
    for (const auto& [head_id, catalog] : local_catalogs) {
        auto path = topology.path_to_sink(head_id);  // raises UnreachableNode
        if (mode == MetadataMode::Centralized) {
            for (const auto& [node_id, descriptor] : catalog.node_descriptors()) {
                MetadataMessage msg;
                msg.kind = MetadataMessage::Kind::NodeDescriptor;
                msg.origin = head_id;
                msg.subject = node_id;
                msg.path = path;
                out.push_back(std::move(msg));
            }
        } else {
            MetadataMessage msg;
            msg.kind = MetadataMessage::Kind::NetworkSummary;
            msg.origin = head_id;
            msg.subject = topology.node(head_id).network_id;
            msg.path = path;
            out.push_back(std::move(msg));
        }
    }
    return out;
}

}  // namespace wsnq
