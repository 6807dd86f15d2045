#pragma once

#include <string>

#include "wsnq/scenario.hpp"
#include "wsnq/simulator.hpp"

namespace wsnq {

// Canonical JSON form of a run report: keys sorted, deterministic double
// formatting, byte-identical for identical runs.
std::string report_to_json(const RunReport& report, int indent = 2);

// Result rows as CSV (epoch,group,function,value); plain selects emit
// epoch,node,attribute,value instead.
std::string results_to_csv(const RunReport& report);

// FNV-1a over the canonical result rows; equal across strategies iff the
// rows agree bit-exactly.
uint64_t result_hash(const RunReport& report);

// Catalog dump with Tables 2-3 field names, snake_cased.
std::string dump_catalog_json(const Scenario& scenario, int indent = 2);

}  // namespace wsnq
