#include "wsnq/error.hpp"

namespace wsnq {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::Ok: return "ok";
        case ErrorCode::Usage: return "usage";
        case ErrorCode::Syntax: return "syntax_error";
        case ErrorCode::UnitSuffix: return "unit_suffix";
        case ErrorCode::UnknownAttribute: return "unknown_attribute";
        case ErrorCode::NoQualifyingNetwork: return "no_qualifying_network";
        case ErrorCode::DuplicateNetwork: return "duplicate_network";
        case ErrorCode::DuplicateNode: return "duplicate_node";
        case ErrorCode::InvalidDescriptor: return "invalid_descriptor";
        case ErrorCode::SchemaError: return "schema_error";
        case ErrorCode::DisconnectedTopology: return "disconnected_topology";
        case ErrorCode::UnreachableNode: return "unreachable_node";
        case ErrorCode::MissingStats: return "missing_stats";
        case ErrorCode::UnreachableTarget: return "unreachable_target";
        case ErrorCode::NegativeCycle: return "negative_cycle";
        case ErrorCode::NoPath: return "no_path";
        case ErrorCode::InsufficientWindow: return "insufficient_window";
        case ErrorCode::UnknownEdge: return "unknown_edge";
        case ErrorCode::EpochMismatch: return "epoch_mismatch";
        case ErrorCode::MissingGroupAttribute: return "missing_group_attribute";
        case ErrorCode::QueryTimeout: return "query_timeout";
        case ErrorCode::ResultDivergence: return "result_divergence";
        case ErrorCode::ContractViolation: return "contract_violation";
        case ErrorCode::Io: return "io_error";
    }
    return "unknown";
}

}  // namespace wsnq
