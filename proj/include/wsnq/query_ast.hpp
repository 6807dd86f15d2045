#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace wsnq {

enum class AggFn { Count, Sum, Min, Max, Avg };

enum class CompareOp { Lt, Le, Gt, Ge, Eq, Ne };

const char* agg_fn_name(AggFn fn);
const char* compare_op_symbol(CompareOp op);

// One entry of the SELECT list: either a plain attribute or an aggregate
// call. count(*) is the only wildcard form.
struct SelectItem {
    bool is_aggregate = false;
    AggFn fn = AggFn::Count;
    bool wildcard = false;     // count(*) only
    std::string attribute;     // empty for count(*)

    bool operator==(const SelectItem&) const = default;

    // "avg(temp)", "count(*)" or the bare attribute; used in reports to
    // identify result columns.
    std::string display() const;
};

struct Predicate {
    std::string attribute;
    CompareOp op = CompareOp::Gt;
    double value = 0.0;

    bool operator==(const Predicate&) const = default;
    bool matches(double lhs) const;
};

struct QueryAst {
    std::vector<SelectItem> select_items;
    std::vector<Predicate> predicates;
    std::optional<std::string> group_by;
    std::optional<uint32_t> epoch_seconds;  // EPOCH DURATION clause, > 0
    std::string source_table = "sensors";

    bool operator==(const QueryAst&) const = default;

    bool has_aggregates() const;
    // Attributes named anywhere in the query: select items, aggregate
    // arguments, predicates, group-by. Wildcards contribute nothing.
    std::set<std::string> referenced_attributes() const;
};

// Canonical text form; unparse(parse_query(t)) reparses to an equal AST.
std::string unparse(const QueryAst& ast);

}  // namespace wsnq
