#include "wsnq/query_ast.hpp"

#include <cmath>
#include <sstream>

namespace wsnq {

const char* agg_fn_name(AggFn fn) {
    switch (fn) {
        case AggFn::Count: return "count";
        case AggFn::Sum: return "sum";
        case AggFn::Min: return "min";
        case AggFn::Max: return "max";
        case AggFn::Avg: return "avg";
    }
    return "?";
}

const char* compare_op_symbol(CompareOp op) {
    switch (op) {
        case CompareOp::Lt: return "<";
        case CompareOp::Le: return "<=";
        case CompareOp::Gt: return ">";
        case CompareOp::Ge: return ">=";
        case CompareOp::Eq: return "=";
        case CompareOp::Ne: return "!=";
    }
    return "?";
}

std::string SelectItem::display() const {
    if (!is_aggregate) return attribute;
    std::string out = agg_fn_name(fn);
    out += '(';
    out += wildcard ? "*" : attribute;
    out += ')';
    return out;
}

bool Predicate::matches(double lhs) const {
    switch (op) {
        case CompareOp::Lt: return lhs < value;
        case CompareOp::Le: return lhs <= value;
        case CompareOp::Gt: return lhs > value;
        case CompareOp::Ge: return lhs >= value;
        case CompareOp::Eq: return lhs == value;
        case CompareOp::Ne: return lhs != value;
    }
    return false;
}

bool QueryAst::has_aggregates() const {
    for (const auto& item : select_items)
        if (item.is_aggregate) return true;
    return false;
}

std::set<std::string> QueryAst::referenced_attributes() const {
    std::set<std::string> out;
    for (const auto& item : select_items) {
        if (item.is_aggregate && item.wildcard) continue;
        out.insert(item.attribute);
    }
    for (const auto& pred : predicates) out.insert(pred.attribute);
    if (group_by) out.insert(*group_by);
    return out;
}

namespace {

std::string format_literal(double value) {
    // Integral literals print without the decimal point so that the
    // canonical form round-trips through the lexer unchanged.
    if (value == std::floor(value) && std::abs(value) < 1e15) {
        std::ostringstream os;
        os << static_cast<long long>(value);
        return os.str();
    }
    std::ostringstream os;
    os.precision(17);
    os << value;
    return os.str();
}

}  // namespace

std::string unparse(const QueryAst& ast) {
    std::ostringstream os;
    os << "SELECT ";
    for (size_t i = 0; i < ast.select_items.size(); ++i) {
        if (i) os << ", ";
        os << ast.select_items[i].display();
    }
    os << " FROM " << ast.source_table;
    if (!ast.predicates.empty()) {
        os << " WHERE ";
        for (size_t i = 0; i < ast.predicates.size(); ++i) {
            if (i) os << " AND ";
            const auto& p = ast.predicates[i];
            os << p.attribute << ' ' << compare_op_symbol(p.op) << ' ' << format_literal(p.value);
        }
    }
    if (ast.group_by) os << " GROUP BY " << *ast.group_by;
    if (ast.epoch_seconds) os << " EPOCH DURATION " << *ast.epoch_seconds;
    return os.str();
}

}  // namespace wsnq
