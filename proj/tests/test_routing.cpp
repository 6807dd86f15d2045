#include <functional>
#include <random>

#include "doctest.h"
#include "test_support.hpp"
#include "wsnq/error.hpp"
#include "wsnq/routing.hpp"

using namespace wsnq;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Ok;
}

Topology line_topology() {
    Topology t;
    t.add_node({.id = "sink", .role = Role::Sink});
    t.add_node({.id = "f1", .role = Role::Fusion});
    t.add_node({.id = "ch1", .role = Role::ClusterHead, .network_id = "NI3", .cluster_id = "ch1"});
    t.add_edge("sink", "f1", 1.0);
    t.add_edge("f1", "ch1", 1.0);
    t.finalize_ordinals();
    return t;
}

// 4-cycle s - a - b - c - s with the target head at c.
Topology cycle_topology() {
    Topology t;
    t.add_node({.id = "s", .role = Role::Sink});
    t.add_node({.id = "a", .role = Role::Fusion});
    t.add_node({.id = "b", .role = Role::Fusion});
    t.add_node({.id = "c", .role = Role::ClusterHead, .network_id = "NI3", .cluster_id = "c"});
    t.add_edge("s", "a", 1.0);
    t.add_edge("a", "b", 1.0);
    t.add_edge("b", "c", 1.0);
    t.add_edge("c", "s", 1.0);
    t.finalize_ordinals();
    return t;
}

// sink with two branches; the target network hangs off branch A only.
Topology two_branch_topology() {
    Topology t;
    t.add_node({.id = "s", .role = Role::Sink});
    t.add_node({.id = "fa", .role = Role::Fusion});
    t.add_node({.id = "fb", .role = Role::Fusion});
    t.add_node({.id = "cha", .role = Role::ClusterHead, .network_id = "NA", .cluster_id = "cha"});
    t.add_node({.id = "chb", .role = Role::ClusterHead, .network_id = "NB", .cluster_id = "chb"});
    t.add_edge("s", "fa", 1.0);
    t.add_edge("s", "fb", 1.0);
    t.add_edge("fa", "cha", 1.0);
    t.add_edge("fb", "chb", 1.0);
    t.finalize_ordinals();
    return t;
}

Topology diamond_topology() {
    Topology t;
    t.add_node({.id = "s", .role = Role::Sink});
    t.add_node({.id = "a", .role = Role::Fusion});
    t.add_node({.id = "b", .role = Role::Fusion});
    t.add_node({.id = "t", .role = Role::ClusterHead, .network_id = "NI_D", .cluster_id = "t"});
    t.add_edge("s", "a", 1.0);
    t.add_edge("a", "t", 1.0);
    t.add_edge("s", "b", 2.0);
    t.add_edge("b", "t", 2.0);
    t.finalize_ordinals();
    return t;
}

PheMsg msg_for(const std::string& network) {
    PheMsg msg;
    msg.msg_id = "m1";
    msg.parent_query_id = "q0";
    msg.target_network = network;
    msg.response_slot = 1'000'000;
    return msg;
}

size_t count_actions(const FloodTrace& trace, const std::string& node, FloodAction action) {
    size_t n = 0;
    for (const auto& event : trace.events)
        if (event.node == node && event.action == action) ++n;
    return n;
}

}  // namespace

TEST_CASE("MPR: star center has no 2-hop nodes, leaves elect the center") {
    Topology t;
    t.add_node({.id = "c", .role = Role::Fusion});
    for (int i = 0; i < 4; ++i) t.add_node({.id = "l" + std::to_string(i), .role = Role::Fusion});
    for (int i = 0; i < 4; ++i) t.add_edge("c", "l" + std::to_string(i), 1.0);
    CHECK(compute_mpr_set("c", t).empty());
    CHECK(compute_mpr_set("l0", t) == std::set<std::string>{"c"});
}

TEST_CASE("MPR: path a-b-c elects b for a") {
    Topology t;
    t.add_node({.id = "a", .role = Role::Fusion});
    t.add_node({.id = "b", .role = Role::Fusion});
    t.add_node({.id = "c", .role = Role::Fusion});
    t.add_edge("a", "b", 1.0);
    t.add_edge("b", "c", 1.0);
    CHECK(compute_mpr_set("a", t) == std::set<std::string>{"b"});
}

TEST_CASE("MPR: greedy matches the exhaustive minimal cover on the grid fixture") {
    // x's neighbors n1..n3 cover 2-hop nodes t1..t3 with overlapping sets
    Topology t;
    for (const auto& id : {"x", "n1", "n2", "n3", "t1", "t2", "t3"})
        t.add_node({.id = id, .role = Role::Fusion});
    t.add_edge("x", "n1", 1.0);
    t.add_edge("x", "n2", 1.0);
    t.add_edge("x", "n3", 1.0);
    t.add_edge("n1", "t1", 1.0);
    t.add_edge("n1", "t2", 1.0);
    t.add_edge("n2", "t2", 1.0);
    t.add_edge("n2", "t3", 1.0);
    t.add_edge("n3", "t3", 1.0);

    auto greedy = compute_mpr_set("x", t);
    std::vector<std::set<int>> coverage = {{1, 2}, {2, 3}, {3}};  // n1, n2, n3
    size_t minimal = wsnq::test::minimal_cover_size(coverage, {1, 2, 3});
    CHECK(greedy.size() == minimal);
    CHECK(greedy == std::set<std::string>{"n1", "n2"});  // tie falls to the smaller id
}

TEST_CASE("flood on the line: forward once, terminal at the head") {
    Topology t = line_topology();
    FloodTrace trace = flood_phe_msg(t, "sink", msg_for("NI3"));
    CHECK(trace.transmissions == 2);  // sink and f1 broadcast, ch1 consumes
    CHECK(trace.terminal == std::set<std::string>{"ch1"});
    CHECK(count_actions(trace, "f1", FloodAction::Retained) == 1);
    CHECK(count_actions(trace, "ch1", FloodAction::Terminal) == 1);
    CHECK(trace.fusion_paths.at("ch1") == std::vector<std::string>{"sink", "f1", "ch1"});
}

TEST_CASE("flood on the 4-cycle: exactly one duplicate discard") {
    Topology t = cycle_topology();
    FloodTrace trace = flood_phe_msg(t, "s", msg_for("NI3"));
    size_t duplicates = 0;
    std::string dup_node;
    for (const auto& event : trace.events) {
        if (event.action == FloodAction::DiscardedDuplicate) {
            ++duplicates;
            dup_node = event.node;
        }
    }
    CHECK(duplicates == 1);
    CHECK(dup_node == "c");  // the head hears both arms of the cycle
    CHECK(trace.terminal == std::set<std::string>{"c"});
}

TEST_CASE("flood: the off-target branch discards as wrong branch") {
    Topology t = two_branch_topology();
    FloodTrace trace = flood_phe_msg(t, "s", msg_for("NA"));
    CHECK(count_actions(trace, "fb", FloodAction::DiscardedWrongBranch) == 1);
    CHECK(count_actions(trace, "fa", FloodAction::Retained) == 1);
    CHECK(trace.terminal == std::set<std::string>{"cha"});
    CHECK(trace.retained.count("fb") == 0);
}

TEST_CASE("flood: unreachable target network") {
    Topology t = two_branch_topology();
    CHECK(code_of([&] { flood_phe_msg(t, "s", msg_for("NC")); }) == ErrorCode::UnreachableTarget);
}

TEST_CASE("flood properties over 100 seeded random overlays") {
    std::mt19937_64 rng(41);
    for (int round = 0; round < 100; ++round) {
        Topology t = wsnq::test::random_overlay_topology(rng);
        FloodTrace trace = flood_phe_msg(t, "s", msg_for("NA"));

        // at most one retention per node, flood terminates
        std::map<std::string, size_t> retained_events;
        for (const auto& event : trace.events) {
            if (event.action == FloodAction::Retained || event.action == FloodAction::Terminal)
                ++retained_events[event.node];
        }
        for (const auto& [node, n] : retained_events) CHECK(n == 1);
        CHECK(trace.transmissions <= t.nodes().size());

        // exactly the target network's heads terminal-retain
        std::set<std::string> target_heads;
        for (const auto& head : t.cluster_heads_of("NA")) target_heads.insert(head);
        CHECK(trace.terminal == target_heads);

        // wrong-branch discards never happen at the sink
        for (const auto& event : trace.events)
            if (event.action == FloodAction::DiscardedWrongBranch)
                CHECK(t.node(event.node).role != Role::Sink);
    }
}

TEST_CASE("bellman_ford_k3: single edge yields a single route") {
    std::vector<RouteVertex> vertices = {{"src", true}, {"snk", true}};
    std::vector<DirectedEdge> edges = {{"src", "snk", 5.0}, {"snk", "src", 5.0}};
    RouteTable table = bellman_ford_k3(vertices, edges, "src", "snk");
    REQUIRE(table.routes.size() == 1);
    CHECK(table.routes[0] == std::vector<std::string>{"src", "snk"});
    CHECK(table.distances[0] == 5.0);
}

TEST_CASE("bellman_ford_k3: diamond returns (2, 4) and no third route") {
    Topology t = diamond_topology();
    std::vector<RouteVertex> vertices;
    for (const auto& [id, info] : t.nodes()) vertices.push_back({id, true});
    std::vector<DirectedEdge> edges;
    for (const auto& e : t.edges()) {
        edges.push_back({e.a, e.b, e.weight});
        edges.push_back({e.b, e.a, e.weight});
    }
    RouteTable table = bellman_ford_k3(vertices, edges, "t", "s");
    REQUIRE(table.routes.size() == 2);
    CHECK(table.routes[0] == std::vector<std::string>{"t", "a", "s"});
    CHECK(table.distances[0] == 2.0);
    CHECK(table.routes[1] == std::vector<std::string>{"t", "b", "s"});
    CHECK(table.distances[1] == 4.0);
}

TEST_CASE("bellman_ford_k3: negative-weight cycle detected") {
    std::vector<RouteVertex> vertices = {{"snk", true}, {"a", true}, {"b", true}, {"src", true}};
    std::vector<DirectedEdge> edges = {{"snk", "a", 1.0}, {"a", "b", 1.0},  {"b", "a", -3.0},
                                       {"b", "src", 1.0}, {"src", "snk", 10.0}};
    CHECK(code_of([&] { bellman_ford_k3(vertices, edges, "src", "snk"); }) ==
          ErrorCode::NegativeCycle);
}

TEST_CASE("bellman_ford_k3: no path at all") {
    std::vector<RouteVertex> vertices = {{"src", true}, {"snk", true}, {"z", true}};
    std::vector<DirectedEdge> edges = {{"src", "z", 1.0}, {"z", "src", 1.0}};
    CHECK(code_of([&] { bellman_ford_k3(vertices, edges, "src", "snk"); }) == ErrorCode::NoPath);
}

TEST_CASE("bellman_ford_k3: route 1 matches exhaustive enumeration, routes edge-disjoint") {
    std::mt19937_64 rng(59);
    for (int round = 0; round < 200; ++round) {
        int n = 4 + static_cast<int>(rng() % 9);  // 4..12 vertices
        wsnq::test::SimpleGraph g(n);
        // random spanning tree + extras, positive weights
        for (int v = 1; v < n; ++v)
            g.add_edge(v, static_cast<int>(rng() % v), 1.0 + static_cast<double>(rng() % 9));
        for (int extra = 0; extra < n / 2; ++extra) {
            int u = static_cast<int>(rng() % n);
            int v = static_cast<int>(rng() % n);
            if (u != v && !g.has_edge(u, v))
                g.add_edge(u, v, 1.0 + static_cast<double>(rng() % 9));
        }
        std::vector<bool> flag(n, true);
        int source = 0, sink = n - 1;
        // unflag a random bystander vertex half the time
        if (rng() % 2 && n > 4) {
            int off = 1 + static_cast<int>(rng() % (n - 2));
            flag[off] = false;
        }

        std::vector<RouteVertex> vertices;
        for (int v = 0; v < n; ++v) vertices.push_back({"v" + std::to_string(v), flag[v]});
        std::vector<DirectedEdge> edges;
        for (int u = 0; u < n; ++u)
            for (int v : g.adjacency[u]) edges.push_back({"v" + std::to_string(u),
                                                          "v" + std::to_string(v), g.weight[u][v]});

        auto expected = wsnq::test::enumerate_shortest(g, flag, source, sink);
        try {
            RouteTable table = bellman_ford_k3(vertices, edges, "v0", "v" + std::to_string(sink));
            REQUIRE(expected.has_value());
            CHECK(table.distances[0] == *expected);

            std::set<std::pair<std::string, std::string>> used;
            for (const auto& route : table.routes) {
                for (size_t i = 0; i + 1 < route.size(); ++i) {
                    auto key = route[i] < route[i + 1] ? std::make_pair(route[i], route[i + 1])
                                                       : std::make_pair(route[i + 1], route[i]);
                    CHECK(used.insert(key).second);  // no edge reused across routes
                }
            }
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NoPath);
            CHECK_FALSE(expected.has_value());
        }
    }
}

TEST_CASE("time slots on the chain: base 30, delta 10") {
    RootedTree tree;
    tree.root = "sink";
    tree.parent = {{"f1", "sink"}, {"ch1", "f1"}};
    auto deadlines = schedule_time_slots(tree, 30, 10, 0);
    CHECK(deadlines.at("ch1") == 10);
    CHECK(deadlines.at("f1") == 20);
    CHECK(deadlines.count("sink") == 0);  // the sink collects at the base slot
}

TEST_CASE("time slots: child always strictly before parent on random trees") {
    std::mt19937_64 rng(67);
    for (int round = 0; round < 100; ++round) {
        RootedTree tree = wsnq::test::random_rooted_tree(rng);
        int64_t delta = 1 + static_cast<int64_t>(rng() % 50);
        int64_t base = delta * (tree.max_depth() + 1 + static_cast<int64_t>(rng() % 10));
        auto deadlines = schedule_time_slots(tree, base, delta, 0);
        for (const auto& [child, parent] : tree.parent) {
            int64_t parent_deadline = parent == tree.root ? base : deadlines.at(parent);
            CHECK(deadlines.at(child) < parent_deadline);
        }
    }
}

TEST_CASE("time slots: window too small") {
    RootedTree tree;
    tree.root = "sink";
    tree.parent = {{"f1", "sink"}, {"ch1", "f1"}};  // depth 2
    CHECK(code_of([&] { schedule_time_slots(tree, 5, 10, 0); }) == ErrorCode::InsufficientWindow);
    // boundary: base - delta*depth == now is still insufficient
    CHECK(code_of([&] { schedule_time_slots(tree, 20, 10, 0); }) == ErrorCode::InsufficientWindow);
    CHECK(code_of([&] { schedule_time_slots(tree, 21, 10, 0); }) == ErrorCode::Ok);
}

TEST_CASE("link failure: route 1 drops, route 2 is promoted") {
    Topology t = diamond_topology();
    RouteStore store;
    FloodTrace trace = flood_phe_msg(t, "s", msg_for("NI_D"));
    store.put("t", routes_from_flood(t, trace, "t", "s"));
    REQUIRE(store.get("t").routes.size() == 2);

    LinkFailureOutcome outcome = handle_link_failure(t, "a", "t", store);
    CHECK_FALSE(t.has_edge("a", "t"));
    REQUIRE(outcome.invalidated.size() == 1);
    CHECK(outcome.invalidated[0].first == "t");
    CHECK(outcome.invalidated[0].second == 1);
    REQUIRE(store.get("t").routes.size() == 1);
    CHECK(store.get("t").routes[0] == std::vector<std::string>{"t", "b", "s"});
    CHECK(store.get("t").distances[0] == 4.0);
    CHECK(outcome.err_traces.size() == 2);  // both endpoints flood Err
    for (const auto& err : outcome.err_traces) CHECK(err.transmissions >= 1);
}

TEST_CASE("link failure: edge off every stored route still floods Err") {
    Topology t = diamond_topology();
    t.add_node({.id = "x", .role = Role::Fusion});
    t.add_edge("s", "x", 1.0);
    RouteStore store;
    FloodTrace trace = flood_phe_msg(t, "s", msg_for("NI_D"));
    store.put("t", routes_from_flood(t, trace, "t", "s"));

    LinkFailureOutcome outcome = handle_link_failure(t, "s", "x", store);
    CHECK(outcome.invalidated.empty());
    CHECK(outcome.err_traces.size() == 2);
    CHECK(store.get("t").routes.size() == 2);
}

TEST_CASE("link failure: unknown edge") {
    Topology t = diamond_topology();
    RouteStore store;
    CHECK(code_of([&] { handle_link_failure(t, "s", "t", store); }) == ErrorCode::UnknownEdge);
}
