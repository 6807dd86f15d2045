#include <functional>
#include <random>

#include "doctest.h"
#include "test_support.hpp"
#include "wsnq/error.hpp"
#include "wsnq/metadata.hpp"

using namespace wsnq;

namespace {

GlobalWsnDescriptor table2_descriptor() {
    GlobalWsnDescriptor d;
    d.network_id = "NI3";
    d.node_count = 21;
    d.location.latitude = {40, 26, 'N'};
    d.location.longitude = {3, 42, 'W'};
    d.phenomena = {"temperature"};
    d.data_units = {{"temperature", "Celsius degree"}};
    return d;
}

LocalNodeDescriptor table3_descriptor() {
    LocalNodeDescriptor d;
    d.node_id = "N3";
    d.mote_type = "Mica Mote";
    d.sensor_type = "Sensirion SHT11";
    d.phenomenon = "temperature";
    d.neighbor_count = 7;
    return d;
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Ok;
}

// sink -- f -- ch, cluster of descriptors at ch
Topology depth2_topology() {
    Topology topology;
    NodeInfo sink{.id = "s", .role = Role::Sink};
    NodeInfo fusion{.id = "f", .role = Role::Fusion};
    NodeInfo head{.id = "ch", .role = Role::ClusterHead, .network_id = "NI_M", .cluster_id = "ch"};
    topology.add_node(sink);
    topology.add_node(fusion);
    topology.add_node(head);
    topology.add_edge("s", "f", 1.0);
    topology.add_edge("f", "ch", 1.0);
    topology.finalize_ordinals();
    return topology;
}

size_t total_transmissions(const std::vector<MetadataMessage>& messages) {
    size_t total = 0;
    for (const auto& msg : messages) total += msg.transmissions();
    return total;
}

}  // namespace

TEST_CASE("register_wsn stores the base-station metadata row") {
    GlobalCatalog catalog;
    CHECK(catalog.register_wsn(table2_descriptor()) == "NI3");
    const auto& d = catalog.network("NI3");
    CHECK(d.node_count == 21);
    CHECK(d.location.latitude.degrees == 40);
    CHECK(d.location.latitude.minutes == 26);
    CHECK(d.location.latitude.hemisphere == 'N');
    CHECK(d.location.longitude.degrees == 3);
    CHECK(d.location.longitude.hemisphere == 'W');
    CHECK(d.data_units.at("temperature") == "Celsius degree");
}

TEST_CASE("register_wsn rejects duplicates and bad descriptors") {
    GlobalCatalog catalog;
    catalog.register_wsn(table2_descriptor());
    CHECK(code_of([&] { catalog.register_wsn(table2_descriptor()); }) ==
          ErrorCode::DuplicateNetwork);

    auto zero_nodes = table2_descriptor();
    zero_nodes.network_id = "NI8";
    zero_nodes.node_count = 0;
    CHECK(code_of([&] { catalog.register_wsn(zero_nodes); }) == ErrorCode::InvalidDescriptor);

    auto bad_lat = table2_descriptor();
    bad_lat.network_id = "NI9";
    bad_lat.location.latitude.degrees = 91;
    CHECK(code_of([&] { catalog.register_wsn(bad_lat); }) == ErrorCode::InvalidDescriptor);

    auto missing_unit = table2_descriptor();
    missing_unit.network_id = "NI10";
    missing_unit.phenomena.insert("sound");
    CHECK(code_of([&] { catalog.register_wsn(missing_unit); }) == ErrorCode::InvalidDescriptor);
}

TEST_CASE("register_node: cluster-head metadata row and the class index") {
    LocalCatalog catalog("ch1");
    CHECK(catalog.register_node(table3_descriptor()) == "N3");
    CHECK(catalog.node("N3").mote_type == "Mica Mote");
    CHECK(catalog.node("N3").sensor_type == "Sensirion SHT11");
    CHECK(catalog.node("N3").neighbor_count == 7);

    LocalNodeDescriptor acoustic;
    acoustic.node_id = "N4";
    acoustic.mote_type = "Mica Mote";
    acoustic.sensor_type = "mic";
    acoustic.phenomenon = "sound";
    catalog.register_node(acoustic);
    CHECK(catalog.phenomena_present() == std::set<std::string>{"sound", "temperature"});

    CHECK(code_of([&] { catalog.register_node(table3_descriptor()); }) == ErrorCode::DuplicateNode);
}

TEST_CASE("lookup_networks is the phenomenon superset filter") {
    GlobalCatalog catalog;
    auto ni3 = table2_descriptor();
    ni3.phenomena = {"temperature", "sound"};
    ni3.data_units = {{"temperature", "C"}, {"sound", "db"}};
    catalog.register_wsn(ni3);
    auto ni7 = table2_descriptor();
    ni7.network_id = "NI7";
    catalog.register_wsn(ni7);

    CHECK(catalog.lookup_networks({"temperature"}) == std::set<std::string>{"NI3", "NI7"});
    CHECK(catalog.lookup_networks({"temperature", "sound"}) == std::set<std::string>{"NI3"});
    CHECK(catalog.lookup_networks({"humidity"}).empty());
    CHECK(code_of([&] { catalog.lookup_networks({}); }) == ErrorCode::ContractViolation);
}

TEST_CASE("lookup_networks: more phenomena never widen the answer") {
    std::mt19937_64 rng(5);
    const std::vector<std::string> pool = {"a", "b", "c", "d"};
    for (int round = 0; round < 50; ++round) {
        GlobalCatalog catalog;
        int networks = 1 + static_cast<int>(rng() % 5);
        for (int i = 0; i < networks; ++i) {
            GlobalWsnDescriptor d;
            d.network_id = "N" + std::to_string(i);
            d.node_count = 1;
            d.location.latitude = {1, 0, 'N'};
            d.location.longitude = {1, 0, 'E'};
            for (const auto& p : pool)
                if (rng() % 2) {
                    d.phenomena.insert(p);
                    d.data_units[p] = "u";
                }
            if (d.phenomena.empty()) {
                d.phenomena.insert("a");
                d.data_units["a"] = "u";
            }
            catalog.register_wsn(d);
        }
        std::set<std::string> a{pool[rng() % 4]};
        std::set<std::string> b{pool[rng() % 4]};
        std::set<std::string> both = a;
        both.insert(b.begin(), b.end());
        auto result_union = catalog.lookup_networks(both);
        auto result_a = catalog.lookup_networks(a);
        auto result_b = catalog.lookup_networks(b);
        for (const auto& id : result_union) {
            CHECK(result_a.count(id) == 1);
            CHECK(result_b.count(id) == 1);
        }
    }
}

TEST_CASE("lookup_sensor_class filters one cluster by phenomenon") {
    LocalCatalog catalog("ch1");
    catalog.register_node({"N3", "Mica Mote", "SHT11", "temperature", 2});
    catalog.register_node({"N4", "Mica Mote", "mic", "sound", 2});
    CHECK(catalog.lookup_sensor_class("temperature") == std::set<std::string>{"N3"});
    CHECK(catalog.lookup_sensor_class("sound") == std::set<std::string>{"N4"});
    CHECK(catalog.lookup_sensor_class("humidity").empty());
}

TEST_CASE("virtual stats update and epoch reset") {
    LocalCatalog catalog("ch1");
    catalog.update_virtual_stats("temperature", 12, 100);
    CHECK(catalog.virtual_stats().attribute_sizes.at("temperature") == 12);
    CHECK(catalog.virtual_stats().tuple_count == 1);
    CHECK(catalog.virtual_stats().last_update == 100);

    catalog.update_virtual_stats("temperature", 12, 200);
    CHECK(catalog.virtual_stats().tuple_count == 2);

    catalog.reset_epoch_stats();
    CHECK(catalog.virtual_stats().tuple_count == 0);
    CHECK(catalog.virtual_stats().attribute_sizes.at("temperature") == 12);

    CHECK(code_of([&] { catalog.update_virtual_stats("temperature", 0, 1); }) ==
          ErrorCode::ContractViolation);
}

TEST_CASE("sync_metadata: full copy vs summary on the depth-2 cluster") {
    Topology topology = depth2_topology();
    GlobalCatalog global;
    std::map<std::string, LocalCatalog> locals;
    LocalCatalog cluster("ch");
    for (int i = 0; i < 5; ++i)
        cluster.register_node({"n" + std::to_string(i), "Mica Mote", "SHT11", "temperature", 1});
    locals.emplace("ch", std::move(cluster));

    auto centralized = sync_metadata(MetadataMode::Centralized, topology, global, locals);
    CHECK(centralized.size() == 5);
    CHECK(total_transmissions(centralized) == 10);  // 5 descriptors x 2 hops

    auto distributed = sync_metadata(MetadataMode::Distributed, topology, global, locals);
    CHECK(distributed.size() == 1);
    CHECK(distributed[0].kind == MetadataMessage::Kind::NetworkSummary);
    CHECK(distributed[0].subject == "NI_M");
    CHECK(total_transmissions(distributed) == 2);  // 1 summary x 2 hops
}

TEST_CASE("sync_metadata: disconnected cluster head") {
    Topology topology = depth2_topology();
    NodeInfo lonely{.id = "ch2", .role = Role::ClusterHead, .network_id = "NX", .cluster_id = "ch2"};
    topology.add_node(lonely);
    GlobalCatalog global;
    std::map<std::string, LocalCatalog> locals;
    LocalCatalog cluster("ch2");
    cluster.register_node({"n0", "Mica Mote", "SHT11", "temperature", 0});
    locals.emplace("ch2", std::move(cluster));
    CHECK(code_of([&] {
              sync_metadata(MetadataMode::Centralized, topology, global, locals);
          }) == ErrorCode::UnreachableNode);
}

TEST_CASE("sync_metadata: distributed never beats centralized, strict for clusters >= 2") {
    std::mt19937_64 rng(17);
    for (int round = 0; round < 40; ++round) {
        Topology topology = wsnq::test::random_overlay_topology(rng);
        GlobalCatalog global;
        std::map<std::string, LocalCatalog> locals;
        bool some_cluster_big = false;
        for (const auto& head : topology.cluster_heads()) {
            LocalCatalog cluster(head);
            int members = 1 + static_cast<int>(rng() % 4);
            if (members >= 2) some_cluster_big = true;
            for (int i = 0; i < members; ++i)
                cluster.register_node(
                    {head + "_n" + std::to_string(i), "Mica Mote", "SHT11", "temperature", 1});
            locals.emplace(head, std::move(cluster));
        }
        size_t centralized = total_transmissions(
            sync_metadata(MetadataMode::Centralized, topology, global, locals));
        size_t distributed = total_transmissions(
            sync_metadata(MetadataMode::Distributed, topology, global, locals));
        CHECK(distributed <= centralized);
        if (some_cluster_big) CHECK(distributed < centralized);
    }
}
