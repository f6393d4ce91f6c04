#pragma once

#include "qsp/catalog.hpp"

#include <json.hpp>

namespace qsp {

/// Resolved run configuration shared by the CLI subcommands.
struct RunConfig {
    std::string datum;          // catalog name or path to a datum JSON
    std::string params_file;    // optional parameter JSON
    int cutoff = -1;            // quasi K-matrix height (default per rank)
    std::vector<std::string> modules; // module descriptors; empty = catalog defaults
    std::vector<std::string> checks;  // empty = all
    std::string out;            // output path; empty = stdout only
    int jobs = 1;
    unsigned seed = 7;
    int rank_guard = 4;         // desk-scale ceiling for module-level runs
};

nlohmann::json cmd_datum(const RunConfig& cfg);
nlohmann::json cmd_quasik(const RunConfig& cfg);
/// returns the report; `ok` reports whether every selected check passed
nlohmann::json cmd_verify(const RunConfig& cfg, bool& ok);

/// JSON datum descriptor: {"type":"A","rank":3,"X":[2],"tau":{"1":3,...}}
/// (1-based in the file, 0-based internally); "cartan" may replace type/rank.
struct DatumSpec {
    std::vector<std::vector<int>> cartan;
    std::vector<int> X, tau;
};
DatumSpec parse_datum_json(const nlohmann::json& j);

void write_report(const nlohmann::json& j, const std::string& path);

/// sparse (row, col, scalar-string) triples of an exact operator matrix
nlohmann::json sparse_triples(const Mat& m);

} // namespace qsp
