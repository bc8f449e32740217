#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "zetaladder/config.hpp"
#include "zetaladder/metamorphosis.hpp"

namespace zl {

class EvalCache;

inline constexpr const char* kCodeVersion = "1.0.0";
inline constexpr int kReportFormatVersion = 1;

struct RunRecord {
    ExperimentConfig config;
    std::optional<MetamorphosisReport> report;
    std::string failed_stage;  // empty on success
    std::string error;
    std::map<std::string, double> timings;  // stage wall times in seconds
    double total_seconds = 0.0;
    std::string code_version = kCodeVersion;
    int format_version = kReportFormatVersion;

    bool succeeded() const noexcept { return report.has_value(); }
    bool passed() const { return report && report->all_passed(); }
};

RunRecord run_one(const ExperimentConfig& config, EvalCache* cache = nullptr);

/// Runs every config, up to parallelism at a time; a failing run is
/// captured in its record and the suite continues. Records come back in
/// input order. The cache, if any, is saved at the end.
std::vector<RunRecord> run_suite(const std::vector<ExperimentConfig>& configs, int parallelism,
                                 EvalCache* cache = nullptr);

std::string summary_csv_header();
/// Successful runs ordered by (T, theta, k, sigma), 12 significant digits.
std::string summary_csv(const std::vector<RunRecord>& records);

nlohmann::json to_json(const RunRecord& record);
RunRecord record_from_json(const nlohmann::json& j);

/// Riemann-Siegel against Euler-Maclaurin at one height.
struct OracleSample {
    double t = 0.0;
    double em_abs = 0.0;  // |zeta(1/2 + i t)|
    double rs_uncorrected = 0.0;
    double rs_corrected = 0.0;
    double bound_uncorrected = 0.0;
    double bound_corrected = 0.0;

    bool passed() const noexcept;
};

/// samples heights drawn log-uniformly in [lo, hi] from seed.
std::vector<OracleSample> rs_oracle_audit(int samples, std::uint64_t seed, double lo = 1e3,
                                          double hi = 1e7);

std::string oracle_csv_header();
std::string to_csv_row(const OracleSample& sample);

/// Writes into dir:
///   summary.csv, runs/run-NNN.json (input order), failures.csv when a
///   run failed, and plot data ratio_vs_T.csv, gaps_vs_T.csv,
///   local_error_vs_x.csv with rows ascending in the first column.
/// Returns the files written; Error if a file cannot be written.
std::vector<std::filesystem::path> emit_outputs(const std::vector<RunRecord>& records,
                                                const std::filesystem::path& dir);

}  // namespace zl
