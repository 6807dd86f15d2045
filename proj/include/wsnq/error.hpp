#pragma once

#include <stdexcept>
#include <string>

namespace wsnq {

// Every failure mode carries one of these codes. The CLI maps them 1:1 to
// process exit codes (see tools/wsnq.cpp and `wsnq --help`), so the numeric
// values are stable API and must not be reordered.
enum class ErrorCode : int {
    Ok = 0,
    Usage = 2,
    Syntax = 3,
    UnitSuffix = 4,
    UnknownAttribute = 5,
    NoQualifyingNetwork = 6,
    DuplicateNetwork = 7,
    DuplicateNode = 8,
    InvalidDescriptor = 9,
    SchemaError = 10,
    DisconnectedTopology = 11,
    UnreachableNode = 12,
    MissingStats = 13,
    UnreachableTarget = 14,
    NegativeCycle = 15,
    NoPath = 16,
    InsufficientWindow = 17,
    UnknownEdge = 18,
    EpochMismatch = 19,
    MissingGroupAttribute = 20,
    QueryTimeout = 21,
    ResultDivergence = 22,
    ContractViolation = 23,
    Io = 24,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace wsnq
