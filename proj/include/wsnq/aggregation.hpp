#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wsnq/query_ast.hpp"

namespace wsnq {

// Group key value: the unit group for ungrouped queries, otherwise the
// group-by attribute's value (region names are strings, readings numeric).
using GroupKey = std::variant<std::monostate, int64_t, double, std::string>;

std::string group_key_display(const GroupKey& key);

struct SensorTuple {
    std::string node_id;
    std::string region;
    int64_t node_ordinal = 0;
    int64_t timestamp_us = 0;
    std::string phenomenon;
    std::map<std::string, double> values;  // attribute -> reading, non-empty

    // Resolves value attributes and the built-ins nodeid/region/timestamp.
    // region is not numeric; numeric lookups on it return nullopt.
    std::optional<double> numeric_value(const std::string& attribute) const;
    bool has_attribute(const std::string& attribute) const;
    std::optional<GroupKey> group_value(const std::string& attribute) const;
};

// Mergeable partial aggregate, tagged with its group. avg carries (sum,
// count), the only lossless decomposition; everything else is a single
// scalar or counter.
struct PartialStateRecord {
    GroupKey group_id;
    AggFn function = AggFn::Count;
    std::string argument;  // empty for count(*)
    int64_t count = 0;     // count n, and the n of avg
    double value = 0.0;    // sum s, min/max extremum, and the s of avg
    int64_t epoch_index = 0;

    bool same_slot(const PartialStateRecord& other) const {
        return group_id == other.group_id && function == other.function &&
               argument == other.argument;
    }
};

// Builds the singleton record for one predicate-passing tuple. group_attr
// absent means the unit group. Raises MissingGroupAttribute when the tuple
// lacks the grouping attribute, and skips nothing: the caller decides
// whether the tuple feeds this aggregate at all.
PartialStateRecord init_partial(AggFn function, const std::string& argument,
                                const SensorTuple& tuple,
                                const std::optional<std::string>& group_attr,
                                int64_t epoch_index);

// Merge-or-store-separately: records sharing (group, function, argument)
// fold together, anything else is kept as its own entry. Raises
// EpochMismatch when the incoming record belongs to a different epoch than
// `collecting_epoch`.
void combine_child_record(std::vector<PartialStateRecord>& local, PartialStateRecord incoming,
                          int64_t collecting_epoch);

struct FinalizedRow {
    GroupKey group_id;
    std::string function_display;  // e.g. "count(*)", "avg(temp)"
    double value = 0.0;
    bool integral = false;         // true for count
};

FinalizedRow finalize(const PartialStateRecord& record);

// Tumbling windows: tuple at time t lands in epoch floor(t / duration);
// boundaries are half-open [k*d, (k+1)*d).
int64_t epoch_index_of(int64_t timestamp_us, int64_t duration_us);
std::map<int64_t, std::vector<SensorTuple>> epoch_window(const std::vector<SensorTuple>& tuples,
                                                         int64_t duration_us);

}  // namespace wsnq
