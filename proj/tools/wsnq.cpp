#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wsnq/error.hpp"
#include "wsnq/query_parser.hpp"
#include "wsnq/query_validator.hpp"
#include "wsnq/report.hpp"
#include "wsnq/scenario.hpp"
#include "wsnq/simulator.hpp"

namespace {

using wsnq::Error;
using wsnq::ErrorCode;

constexpr const char* kExitCodeHelp = R"(exit codes:
  0   success
  2   usage / configuration error
  3   query syntax error           4   literal with unit suffix
  5   unknown attribute            6   no qualifying network
  7   duplicate network            8   duplicate node
  9   invalid descriptor          10   scenario schema error
 11   disconnected topology       12   unreachable node
 13   missing virtual stats       14   flood target unreachable
 15   negative-weight cycle       16   no route
 17   insufficient slot window    18   unknown edge
 19   epoch mismatch              20   missing group attribute
 21   query timeout               22   result divergence
 23   contract violation          24   i/o error
)";

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string trim(const std::string& s) {
    size_t start = s.find_first_not_of(" \t\r\n");
    if (start == std::string::npos) return "";
    size_t end = s.find_last_not_of(" \t\r\n");
    return s.substr(start, end - start + 1);
}

struct QuerySource {
    std::string inline_text;
    std::string file_path;

    std::string resolve(const wsnq::Scenario& scenario) const {
        if (!inline_text.empty() && !file_path.empty())
            throw Error(ErrorCode::Usage, "give exactly one of --query / --query-file");
        if (!inline_text.empty()) return inline_text;
        if (!file_path.empty()) return trim(read_file(file_path));
        if (!scenario.queries.empty()) return scenario.queries.front();
        throw Error(ErrorCode::Usage,
                    "no query: use --query, --query-file, or bundle one in the scenario");
    }
};

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + out_path + "'");
    out << text;
}

wsnq::MetadataMode parse_metadata_mode(const std::string& text) {
    if (text == "centralized") return wsnq::MetadataMode::Centralized;
    if (text == "distributed") return wsnq::MetadataMode::Distributed;
    throw Error(ErrorCode::Usage, "unknown metadata mode '" + text + "'");
}

int cmd_run(const std::string& scenario_path, const QuerySource& query, const std::string& strategy,
            const std::string& metadata, int epochs, bool has_seed, uint64_t seed,
            const std::string& format, const std::string& out_path, bool dump_catalog) {
    wsnq::Scenario scenario = wsnq::load_scenario(scenario_path);
    wsnq::RunOptions options;
    options.query_text = query.resolve(scenario);
    options.strategy = strategy;
    options.metadata_mode = parse_metadata_mode(metadata);
    options.epochs = epochs;
    if (epochs < 1) throw Error(ErrorCode::Usage, "--epochs must be >= 1");
    if (has_seed) options.seed_override = seed;

    wsnq::RunReport report = wsnq::run_query(scenario, options);
    if (report.drops.late + report.drops.stranded > 0)
        std::cerr << "warning: " << report.drops.late << " late / " << report.drops.stranded
                  << " stranded record(s) dropped\n";
    if (format == "csv") {
        emit(wsnq::results_to_csv(report), out_path);
    } else {
        std::string text = wsnq::report_to_json(report);
        if (dump_catalog) {
            auto doc = nlohmann::json::parse(text);
            doc["catalog"] = nlohmann::json::parse(wsnq::dump_catalog_json(scenario));
            text = doc.dump(2);
        }
        emit(text, out_path);
    }
    return 0;
}

int cmd_compare(const std::string& scenario_path, const QuerySource& query,
                std::vector<std::string> strategies, std::vector<std::string> modes, int epochs,
                bool has_seed, uint64_t seed, const std::string& out_path) {
    if (strategies.empty()) strategies = {"auto"};
    if (modes.empty()) modes = {"distributed"};
    size_t variants = strategies.size() * modes.size();
    if (variants < 2)
        throw Error(ErrorCode::Usage, "compare needs at least two strategies or metadata modes");

    wsnq::Scenario scenario = wsnq::load_scenario(scenario_path);
    std::string query_text = query.resolve(scenario);

    struct Variant {
        std::string label;
        wsnq::RunReport report;
        uint64_t hash = 0;
    };
    std::vector<Variant> runs;
    for (const auto& mode : modes) {
        for (const auto& strategy : strategies) {
            wsnq::RunOptions options;
            options.query_text = query_text;
            options.strategy = strategy;
            options.metadata_mode = parse_metadata_mode(mode);
            options.epochs = epochs;
            if (has_seed) options.seed_override = seed;
            Variant variant;
            variant.label = strategy + "/" + mode;
            variant.report = wsnq::run_query(scenario, options);
            variant.hash = wsnq::result_hash(variant.report);
            runs.push_back(std::move(variant));
        }
    }
    for (const auto& variant : runs) {
        if (variant.hash != runs.front().hash)
            throw Error(ErrorCode::ResultDivergence,
                        "result rows diverge between " + runs.front().label + " and " +
                            variant.label + " (a correctness bug; no table printed)");
    }

    std::ostringstream table;
    table << "variant,executed,total_energy,sensing,communication,bytes,messages,sync_transmissions,"
             "result_hash\n";
    for (const auto& variant : runs) {
        const auto& ledger = variant.report.ledger;
        size_t sync = 0;
        for (const auto& msg : variant.report.metadata_messages) sync += msg.transmissions();
        table << variant.label << ',' << strategy_name(variant.report.plan.strategy) << ','
              << ledger.total_sensing() + ledger.total_communication() << ','
              << ledger.total_sensing() << ',' << ledger.total_communication() << ','
              << ledger.byte_count() << ',' << ledger.message_count() << ',' << sync << ','
              << variant.hash << '\n';
    }
    emit(table.str(), out_path);
    return 0;
}

int cmd_dump_catalog(const std::string& scenario_path, const std::string& out_path) {
    wsnq::Scenario scenario = wsnq::load_scenario(scenario_path);
    emit(wsnq::dump_catalog_json(scenario), out_path);
    return 0;
}

int cmd_validate(const std::string& scenario_path, const QuerySource& query,
                 const std::string& out_path) {
    wsnq::Scenario scenario = wsnq::load_scenario(scenario_path);
    std::string text = query.resolve(scenario);
    wsnq::QueryAst ast = wsnq::parse_query(text);
    wsnq::ValidatedQuery validated = wsnq::validate_query(ast, scenario.global_catalog);

    nlohmann::json doc;
    doc["query"] = text;
    doc["canonical"] = wsnq::unparse(ast);
    doc["referenced_phenomena"] = validated.referenced_phenomena;
    doc["scope"] = {{"kind", validated.scope.kind == wsnq::ScopeKind::Local ? "local" : "global"},
                    {"networks", validated.scope.network_ids}};
    doc["query_source"] = wsnq::ValidatedQuery::query_source;
    emit(doc.dump(2), out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wsnq - declarative query processing over heterogeneous wireless sensor "
                 "networks (deterministic simulator)"};
    app.footer(kExitCodeHelp);
    app.require_subcommand(1);

    std::string scenario_path, strategy = "auto", metadata = "distributed";
    std::string format = "json", out_path;
    QuerySource query;
    int epochs = 5;
    uint64_t seed = 0;
    bool dump_catalog_flag = false;
    std::vector<std::string> strategies, modes;

    auto add_common = [&](CLI::App* cmd, bool with_query) {
        cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();
        if (with_query) {
            cmd->add_option("--query", query.inline_text, "inline query text");
            cmd->add_option("--query-file", query.file_path, "file holding the query");
        }
        cmd->add_option("--out", out_path, "write output to a file instead of stdout");
    };

    CLI::App* run = app.add_subcommand("run", "execute one query on a scenario");
    add_common(run, true);
    run->add_option("--strategy", strategy, "auto|warehouse|semi|innetwork");
    run->add_option("--metadata", metadata, "centralized|distributed");
    run->add_option("--epochs", epochs, "epochs to simulate (EPOCH DURATION queries)");
    auto* seed_opt = run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--format", format, "json|csv");
    run->add_flag("--dump-catalog", dump_catalog_flag, "attach the catalog dump to the report");

    CLI::App* compare = app.add_subcommand("compare", "run variants and compare cost");
    add_common(compare, true);
    compare->add_option("--strategies", strategies, "strategies to compare")->delimiter(',');
    compare->add_option("--metadata-modes", modes, "metadata modes to compare")->delimiter(',');
    compare->add_option("--epochs", epochs, "epochs to simulate");
    auto* cmp_seed_opt = compare->add_option("--seed", seed, "override the scenario seed");

    CLI::App* dump = app.add_subcommand("dump-catalog", "dump the two-tier metadata catalog");
    add_common(dump, false);

    CLI::App* validate = app.add_subcommand("validate", "parse and validate a query, no simulation");
    add_common(validate, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(ErrorCode::Usage);
    }

    try {
        if (app.got_subcommand(run))
            return cmd_run(scenario_path, query, strategy, metadata, epochs, seed_opt->count() > 0,
                           seed, format, out_path, dump_catalog_flag);
        if (app.got_subcommand(compare))
            return cmd_compare(scenario_path, query, strategies, modes, epochs,
                               cmp_seed_opt->count() > 0, seed, out_path);
        if (app.got_subcommand(dump)) return cmd_dump_catalog(scenario_path, out_path);
        if (app.got_subcommand(validate)) return cmd_validate(scenario_path, query, out_path);
    } catch (const Error& e) {
        std::cerr << "error [" << wsnq::error_code_name(e.code()) << "]: " << e.what() << '\n';
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
