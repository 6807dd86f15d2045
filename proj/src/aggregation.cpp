#include "wsnq/aggregation.hpp"

#include <algorithm>
#include <sstream>

#include "wsnq/error.hpp"

namespace wsnq {

std::string group_key_display(const GroupKey& key) {
    struct Visitor {
        std::string operator()(std::monostate) const { return "*"; }
        std::string operator()(int64_t v) const { return std::to_string(v); }
        std::string operator()(double v) const {
            std::ostringstream os;
            os.precision(15);
            os << v;
            return os.str();
        }
        std::string operator()(const std::string& v) const { return v; }
    };
    return std::visit(Visitor{}, key);
}

std::optional<double> SensorTuple::numeric_value(const std::string& attribute) const {
    if (attribute == "nodeid") return static_cast<double>(node_ordinal);
    if (attribute == "timestamp") return static_cast<double>(timestamp_us);
    if (attribute == "region") return std::nullopt;
    auto it = values.find(attribute);
    if (it == values.end()) return std::nullopt;
    return it->second;
}

bool SensorTuple::has_attribute(const std::string& attribute) const {
    if (attribute == "nodeid" || attribute == "timestamp" || attribute == "region") return true;
    return values.count(attribute) > 0;
}

std::optional<GroupKey> SensorTuple::group_value(const std::string& attribute) const {
    if (attribute == "region") return GroupKey{region};
    if (attribute == "nodeid") return GroupKey{node_ordinal};
    if (attribute == "timestamp") return GroupKey{timestamp_us};
    auto it = values.find(attribute);
    if (it == values.end()) return std::nullopt;
    return GroupKey{it->second};
}

PartialStateRecord init_partial(AggFn function, const std::string& argument,
                                const SensorTuple& tuple,
                                const std::optional<std::string>& group_attr,
                                int64_t epoch_index) {
    PartialStateRecord record;
    record.function = function;
    record.argument = argument;
    record.epoch_index = epoch_index;
    if (group_attr) {
        auto key = tuple.group_value(*group_attr);
        if (!key)
            fail(ErrorCode::MissingGroupAttribute,
                 "tuple from '" + tuple.node_id + "' lacks grouping attribute '" + *group_attr + "'");
        record.group_id = *key;
    }
    if (function == AggFn::Count && argument.empty()) {
        record.count = 1;
        return record;
    }
    auto reading = tuple.numeric_value(argument);
    if (!reading)
        fail(ErrorCode::ContractViolation,
             "tuple from '" + tuple.node_id + "' lacks aggregate argument '" + argument + "'");
    switch (function) {
        case AggFn::Count:
            record.count = 1;
            break;
        case AggFn::Sum:
            record.value = *reading;
            break;
        case AggFn::Min:
        case AggFn::Max:
            record.value = *reading;
            break;
        case AggFn::Avg:
            record.value = *reading;
            record.count = 1;
            break;
    }
    return record;
}

namespace {

void merge_into(PartialStateRecord& into, const PartialStateRecord& from) {
    switch (into.function) {
        case AggFn::Count:
            into.count += from.count;
            break;
        case AggFn::Sum:
            into.value += from.value;
            break;
        case AggFn::Min:
            into.value = std::min(into.value, from.value);
            break;
        case AggFn::Max:
            into.value = std::max(into.value, from.value);
            break;
        case AggFn::Avg:
            into.value += from.value;
            into.count += from.count;
            break;
    }
}

}  // namespace

void combine_child_record(std::vector<PartialStateRecord>& local, PartialStateRecord incoming,
                          int64_t collecting_epoch) {
    if (incoming.epoch_index != collecting_epoch)
        fail(ErrorCode::EpochMismatch,
             "record for epoch " + std::to_string(incoming.epoch_index) +
                 " arrived while collecting epoch " + std::to_string(collecting_epoch));
    for (auto& record : local) {
        if (record.same_slot(incoming)) {
            merge_into(record, incoming);
            return;
        }
    }
    local.push_back(std::move(incoming));
}

FinalizedRow finalize(const PartialStateRecord& record) {
    FinalizedRow row;
    row.group_id = record.group_id;
    SelectItem item;
    item.is_aggregate = true;
    item.fn = record.function;
    item.wildcard = record.function == AggFn::Count && record.argument.empty();
    item.attribute = record.argument;
    row.function_display = item.display();
    switch (record.function) {
        case AggFn::Count:
            row.value = static_cast<double>(record.count);
            row.integral = true;
            break;
        case AggFn::Sum:
        case AggFn::Min:
        case AggFn::Max:
            row.value = record.value;
            break;
        case AggFn::Avg:
            row.value = record.value / static_cast<double>(record.count);
            break;
    }
    return row;
}

int64_t epoch_index_of(int64_t timestamp_us, int64_t duration_us) {
    return timestamp_us / duration_us;
}

std::map<int64_t, std::vector<SensorTuple>> epoch_window(const std::vector<SensorTuple>& tuples,
                                                         int64_t duration_us) {
    if (duration_us <= 0) fail(ErrorCode::ContractViolation, "epoch duration must be positive");
    std::map<int64_t, std::vector<SensorTuple>> out;
    for (const auto& tuple : tuples) out[epoch_index_of(tuple.timestamp_us, duration_us)].push_back(tuple);
    return out;
}

}  // namespace wsnq
