#include <algorithm>
#include <functional>
#include <random>

#include "doctest.h"
#include "wsnq/aggregation.hpp"
#include "wsnq/error.hpp"

using namespace wsnq;

namespace {

SensorTuple tuple_with(const std::string& region, std::map<std::string, double> values,
                       int64_t timestamp = 0, const std::string& node = "n1") {
    SensorTuple t;
    t.node_id = node;
    t.region = region;
    t.timestamp_us = timestamp;
    t.phenomenon = "temperature";
    t.values = std::move(values);
    return t;
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Ok;
}

}  // namespace

TEST_CASE("init_partial: count(*) tagged with the region group") {
    auto record = init_partial(AggFn::Count, "", tuple_with("north", {{"temp", 40}}),
                               std::string("region"), 0);
    CHECK(record.group_id == GroupKey{std::string("north")});
    CHECK(record.function == AggFn::Count);
    CHECK(record.count == 1);
}

TEST_CASE("init_partial: avg carries (sum, count)") {
    auto record = init_partial(AggFn::Avg, "temp", tuple_with("north", {{"temp", 45}}),
                               std::nullopt, 0);
    CHECK(record.group_id == GroupKey{});  // unit group
    CHECK(record.value == 45.0);
    CHECK(record.count == 1);
}

TEST_CASE("init_partial: missing grouping attribute") {
    CHECK(code_of([] {
              init_partial(AggFn::Count, "", tuple_with("north", {{"temp", 40}}),
                           std::string("sound"), 0);
          }) == ErrorCode::MissingGroupAttribute);
}

TEST_CASE("combine: same group merges, different group stored separately") {
    std::vector<PartialStateRecord> local;
    PartialStateRecord a;
    a.group_id = std::string("north");
    a.function = AggFn::Count;
    a.count = 3;
    local.push_back(a);

    PartialStateRecord b = a;
    b.count = 4;
    combine_child_record(local, b, 0);
    REQUIRE(local.size() == 1);
    CHECK(local[0].count == 7);

    PartialStateRecord c = a;
    c.group_id = std::string("south");
    c.count = 1;
    combine_child_record(local, c, 0);
    REQUIRE(local.size() == 2);
    CHECK(local[1].count == 1);
}

TEST_CASE("combine + finalize: avg over readings 40, 50, 45") {
    // direct oracle: (40 + 50 + 45) / 3 == 45
    std::vector<PartialStateRecord> local;
    PartialStateRecord two;
    two.function = AggFn::Avg;
    two.argument = "temp";
    two.value = 90.0;  // 40 + 50
    two.count = 2;
    local.push_back(two);

    PartialStateRecord one;
    one.function = AggFn::Avg;
    one.argument = "temp";
    one.value = 45.0;
    one.count = 1;
    combine_child_record(local, one, 0);
    REQUIRE(local.size() == 1);
    CHECK(local[0].value == 135.0);
    CHECK(local[0].count == 3);

    auto row = finalize(local[0]);
    CHECK(row.value == 45.0);
    CHECK(row.function_display == "avg(temp)");
}

TEST_CASE("finalize identities") {
    PartialStateRecord count;
    count.group_id = std::string("north");
    count.function = AggFn::Count;
    count.count = 7;
    auto row = finalize(count);
    CHECK(row.value == 7.0);
    CHECK(row.integral);

    PartialStateRecord min_record;
    min_record.function = AggFn::Min;
    min_record.argument = "temp";
    min_record.value = 12.0;
    CHECK(finalize(min_record).value == 12.0);
}

TEST_CASE("combine rejects records from another epoch") {
    std::vector<PartialStateRecord> local;
    PartialStateRecord late;
    late.function = AggFn::Count;
    late.count = 1;
    late.epoch_index = 3;
    CHECK(code_of([&] { combine_child_record(local, late, 4); }) == ErrorCode::EpochMismatch);
}

TEST_CASE("epoch_window boundary rule") {
    std::vector<SensorTuple> tuples = {tuple_with("r", {{"temp", 1}}, 0),
                                       tuple_with("r", {{"temp", 2}}, 999),
                                       tuple_with("r", {{"temp", 3}}, 1000)};
    auto batches = epoch_window(tuples, 1000);
    REQUIRE(batches.size() == 2);
    CHECK(batches.at(0).size() == 2);
    CHECK(batches.at(1).size() == 1);

    auto sparse = epoch_window({tuple_with("r", {{"temp", 9}}, 2500)}, 1000);
    REQUIRE(sparse.size() == 1);
    CHECK(sparse.count(2) == 1);
}

TEST_CASE("epoch_window: 3 nodes x 5 epochs, one sample each") {
    std::vector<SensorTuple> tuples;
    for (int node = 0; node < 3; ++node)
        for (int64_t epoch = 0; epoch < 5; ++epoch)
            tuples.push_back(tuple_with("r", {{"temp", 1}}, epoch * 1000 + node,
                                        "n" + std::to_string(node)));
    auto batches = epoch_window(tuples, 1000);
    REQUIRE(batches.size() == 5);
    for (const auto& [epoch, batch] : batches) CHECK(batch.size() == 3);
}

TEST_CASE("merge order never changes the outcome") {
    std::mt19937_64 rng(23);
    const std::vector<AggFn> fns = {AggFn::Count, AggFn::Sum, AggFn::Min, AggFn::Max, AggFn::Avg};
    for (int round = 0; round < 200; ++round) {
        AggFn fn = fns[rng() % fns.size()];
        std::vector<PartialStateRecord> records;
        size_t n = 2 + rng() % 8;
        for (size_t i = 0; i < n; ++i) {
            PartialStateRecord r;
            r.group_id = std::string(rng() % 2 ? "g1" : "g2");
            r.function = fn;
            r.argument = fn == AggFn::Count ? "" : "x";
            // populate exactly the state the function carries: count keeps
            // n, avg keeps (s, n), the rest keep one scalar; eighth-steps
            // keep double sums exact under any order
            if (fn != AggFn::Count)
                r.value = static_cast<double>(static_cast<int>(rng() % 8000) - 4000) / 8.0;
            if (fn == AggFn::Count || fn == AggFn::Avg)
                r.count = 1 + static_cast<int64_t>(rng() % 5);
            records.push_back(r);
        }

        auto fold = [&](const std::vector<PartialStateRecord>& ordered) {
            std::vector<PartialStateRecord> acc;
            for (const auto& r : ordered) combine_child_record(acc, r, 0);
            std::sort(acc.begin(), acc.end(),
                      [](const PartialStateRecord& x, const PartialStateRecord& y) {
                          return x.group_id < y.group_id;
                      });
            return acc;
        };

        auto base = fold(records);
        for (int shuffle = 0; shuffle < 4; ++shuffle) {
            std::shuffle(records.begin(), records.end(), rng);
            auto other = fold(records);
            REQUIRE(other.size() == base.size());
            for (size_t i = 0; i < base.size(); ++i) {
                CHECK(other[i].group_id == base[i].group_id);
                CHECK(other[i].value == base[i].value);
                CHECK(other[i].count == base[i].count);
            }
        }
    }
}

TEST_CASE("fold equals direct computation over raw readings") {
    std::mt19937_64 rng(29);
    const std::vector<AggFn> fns = {AggFn::Count, AggFn::Sum, AggFn::Min, AggFn::Max, AggFn::Avg};
    for (int round = 0; round < 100; ++round) {
        AggFn fn = fns[rng() % fns.size()];
        std::string arg = fn == AggFn::Count ? "" : "temp";
        size_t n = 1 + rng() % 20;
        std::vector<SensorTuple> tuples;
        for (size_t i = 0; i < n; ++i) {
            double v = static_cast<double>(static_cast<int>(rng() % 800)) / 8.0;
            tuples.push_back(tuple_with(rng() % 2 ? "north" : "south", {{"temp", v}}, 0,
                                        "n" + std::to_string(i)));
        }

        std::vector<PartialStateRecord> acc;
        for (const auto& tuple : tuples)
            combine_child_record(acc, init_partial(fn, arg, tuple, std::string("region"), 0), 0);

        // direct per-group computation
        std::map<std::string, std::vector<double>> groups;
        for (const auto& tuple : tuples) groups[tuple.region].push_back(tuple.values.at("temp"));

        CHECK(acc.size() == groups.size());
        for (const auto& record : acc) {
            const auto& values = groups.at(std::get<std::string>(record.group_id));
            auto row = finalize(record);
            switch (fn) {
                case AggFn::Count: CHECK(row.value == static_cast<double>(values.size())); break;
                case AggFn::Sum: {
                    double sum = 0;
                    for (double v : values) sum += v;
                    CHECK(row.value == sum);
                    break;
                }
                case AggFn::Min: CHECK(row.value == *std::min_element(values.begin(), values.end())); break;
                case AggFn::Max: CHECK(row.value == *std::max_element(values.begin(), values.end())); break;
                case AggFn::Avg: {
                    double sum = 0;
                    for (double v : values) sum += v;
                    double expectation = sum / static_cast<double>(values.size());
                    CHECK(row.value == doctest::Approx(expectation).epsilon(1e-9));
                    break;
                }
            }
        }
    }
}

TEST_CASE("group completeness: output groups equal distinct group values") {
    std::mt19937_64 rng(31);
    const std::vector<std::string> regions = {"a", "b", "c", "d"};
    for (int round = 0; round < 50; ++round) {
        size_t n = 1 + rng() % 15;
        std::set<std::string> expected;
        std::vector<PartialStateRecord> acc;
        for (size_t i = 0; i < n; ++i) {
            std::string region = regions[rng() % regions.size()];
            expected.insert(region);
            combine_child_record(acc,
                                 init_partial(AggFn::Count, "", tuple_with(region, {{"temp", 1}}),
                                              std::string("region"), 0),
                                 0);
        }
        std::set<std::string> got;
        for (const auto& record : acc) got.insert(std::get<std::string>(record.group_id));
        CHECK(got == expected);
    }
}

TEST_CASE("epochs are isolated: deleting one epoch leaves others unchanged") {
    std::vector<SensorTuple> tuples;
    for (int64_t epoch = 0; epoch < 4; ++epoch)
        for (int node = 0; node < 3; ++node)
            tuples.push_back(tuple_with("r", {{"temp", static_cast<double>(node + epoch)}},
                                        epoch * 1000 + node, "n" + std::to_string(node)));
    auto all = epoch_window(tuples, 1000);

    std::vector<SensorTuple> without_epoch2;
    for (const auto& tuple : tuples)
        if (epoch_index_of(tuple.timestamp_us, 1000) != 2) without_epoch2.push_back(tuple);
    auto pruned = epoch_window(without_epoch2, 1000);

    for (const auto& [epoch, batch] : all) {
        if (epoch == 2) {
            CHECK(pruned.count(2) == 0);
            continue;
        }
        REQUIRE(pruned.count(epoch) == 1);
        CHECK(pruned.at(epoch).size() == batch.size());
    }
}
