#pragma once

#include <map>
#include <string>
#include <vector>

#include "hflow/config.hpp"
#include "hflow/estimators.hpp"

namespace hflow {

/// One named pass/fail property with the numbers behind it.
struct Verdict {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Everything one `run` produces. Re-running an identical config reproduces
/// every byte except wall_clock_sec.
struct RunRecord {
    std::string config_hash;
    std::string code_version;
    ExperimentKind kind = ExperimentKind::Smoothing;
    std::vector<DiagnosticsSeries> series;      // one per evolved flow
    std::vector<std::string> series_labels;
    std::vector<Verdict> verdicts;
    std::map<std::string, double> metrics;      // named empirical constants
    double wall_clock_sec = 0.0;
    bool blew_up = false;
    std::string blowup_detail;

    bool all_pass() const;
    std::string to_json() const;                // summary (verdicts + metrics)
};

/// Execute one experiment; never throws for blow-ups (recorded as a failed
/// verdict). Writes CSV series, summary JSON, and optional snapshots under
/// config.out_dir when it is non-empty.
RunRecord run(const ExperimentConfig& config);

/// Re-evaluate verdicts from a persisted record directory.
std::vector<Verdict> check(const std::string& record_dir);

/// Aggregate several records into summary files under out_dir; returns the
/// process exit code (0 pass, 1 verdict failure).
int report(const std::vector<RunRecord>& records, const std::string& out_dir);

/// Output root fallback when a config has no out_dir (env HFLOW_OUT_ROOT).
std::string output_root();

}  // namespace hflow
