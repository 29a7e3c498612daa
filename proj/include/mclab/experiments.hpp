#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mclab/config.hpp"

namespace mclab {

// one verdict of an experiment: |value - reference| <= tolerance unless the
// note says otherwise (bounds, trends); precision failures land here as
// pass = false with the message in `note`
struct CheckRow {
    std::string name;
    double value = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
};

// Everything a run produces: a CSV table of per-replicate (or per-row)
// numbers, the checks, and a JSON summary embedding the resolved config so
// the same file reproduces the record byte for byte.
struct ResultRecord {
    std::string experiment;
    std::string rows_csv;
    std::vector<CheckRow> checks;
    nlohmann::ordered_json summary;
    bool all_pass = true;
    // extra CSV dumps (filename, contents), e.g. density slices
    std::vector<std::pair<std::string, std::string>> extra_files;
};

// paired (S_x, V-hat, bracket) replicates with KS and moment-ratio summaries
ResultRecord run_clt(const KeyValueConfig& cfg);
// y-sweep of inner vs outer measure approximations plus the damped
// second-moment trend
ResultRecord run_chaos_convergence(const KeyValueConfig& cfg);
// interval moments of the nu measure against exact q = 1 and q = 2 references
ResultRecord run_multifractal(const KeyValueConfig& cfg);
// tilted-phase coupling sweep over a list of tilt magnitudes
ResultRecord run_coupling(const KeyValueConfig& cfg);
// deterministic analytic identities batch; every failure is a row, never an abort
ResultRecord run_analytics(const KeyValueConfig& cfg);
// (t, rho_theta(t)) tabulation
ResultRecord run_dickman_table(const KeyValueConfig& cfg);

// dispatch by subcommand name: clt | chaos | multifractal | coupling |
// analytics | dickman-table
ResultRecord run_experiment(const std::string& kind, const KeyValueConfig& cfg);

// writes <out_dir>/<experiment>_rows.csv, <out_dir>/<experiment>_summary.json
// and any extra files
void write_record(const ResultRecord& record, const std::string& out_dir);

}  // namespace mclab
