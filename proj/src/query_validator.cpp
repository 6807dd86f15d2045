#include "wsnq/query_validator.hpp"

#include "wsnq/error.hpp"

namespace wsnq {

bool is_builtin_attribute(const std::string& name) {
    return name == "nodeid" || name == "region" || name == "timestamp";
}

ValidatedQuery validate_query(const QueryAst& ast, const GlobalCatalog& catalog) {
    if (catalog.networks().empty())
        fail(ErrorCode::ContractViolation, "validate_query requires at least one registered network");

    ValidatedQuery out;
    out.ast = ast;
    for (const auto& attr : ast.referenced_attributes()) {
        if (is_builtin_attribute(attr)) continue;
        auto phenomenon = catalog.phenomenon_of(attr);
        if (!phenomenon)
            fail(ErrorCode::UnknownAttribute, "unknown attribute '" + attr + "'");
        out.referenced_phenomena.insert(*phenomenon);
    }

    // Scope: networks whose phenomenon set covers everything referenced.
    // A query touching no phenomena (e.g. SELECT count(*)) spans them all.
    std::set<std::string> qualifying;
    if (out.referenced_phenomena.empty()) {
        for (const auto& [id, descriptor] : catalog.networks()) qualifying.insert(id);
    } else {
        qualifying = catalog.lookup_networks(out.referenced_phenomena);
    }
    if (qualifying.empty())
        fail(ErrorCode::NoQualifyingNetwork, "no registered network senses all referenced phenomena");

    out.scope.network_ids = std::move(qualifying);
    out.scope.kind = out.scope.network_ids.size() == 1 ? ScopeKind::Local : ScopeKind::Global;
    return out;
}

}  // namespace wsnq
