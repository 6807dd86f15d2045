#pragma once

#include <set>
#include <string>

#include "wsnq/metadata.hpp"
#include "wsnq/query_ast.hpp"

namespace wsnq {

// Attributes that resolve without a catalog entry.
bool is_builtin_attribute(const std::string& name);

enum class ScopeKind { Local, Global };

struct QueryScope {
    ScopeKind kind = ScopeKind::Local;
    std::set<std::string> network_ids;  // singleton for Local
};

struct ValidatedQuery {
    QueryAst ast;
    std::set<std::string> referenced_phenomena;
    QueryScope scope;
    // The paper's assumptions fix the query source outside the WSNs.
    static constexpr const char* query_source = "external";
};

// Resolves every attribute against the catalog's attribute map (built-ins
// nodeid/region/timestamp bypass it) and computes the scope as the set of
// networks whose phenomena cover everything the query references. Raises
// UnknownAttribute / NoQualifyingNetwork; an unregistered catalog is a
// contract violation.
ValidatedQuery validate_query(const QueryAst& ast, const GlobalCatalog& catalog);

}  // namespace wsnq
