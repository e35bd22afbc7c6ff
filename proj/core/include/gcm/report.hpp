#pragma once

#include "gcm/config.hpp"
#include "gcm/mc.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gcm::report {

inline constexpr std::string_view kVersion = "0.1.0";

struct Meta {
    std::string version{kVersion};
    std::optional<std::uint64_t> seed;
    std::string timestamp;
};

struct ErrorEntry {
    std::string kind;
    std::string message;
};

/// ISO-8601 UTC time taken from SOURCE_DATE_EPOCH, or the Unix epoch when it
/// is unset, so reruns produce identical bytes.
std::string deterministic_timestamp();

/// Rejects any document whose top-level keys differ from
/// {meta, inputs, results, errors} or whose meta keys differ from
/// {version, seed, timestamp}. Throws Error{Parse}.
void validate_report_schema(std::string_view json_text);

/// Generic report: `inputs_json` and `results_json` must be JSON texts.
std::string make_report(const Meta& meta, std::string_view inputs_json,
                        std::string_view results_json, const std::vector<ErrorEntry>& errors,
                        int indent = 2);

struct McDocument {
    Meta meta;
    ExperimentConfig config;
    mc::McReport report;
    std::vector<ErrorEntry> errors;
};

std::string mc_report_json(const mc::McReport& report, const ExperimentConfig& config,
                           const Meta& meta, int indent = 2);
McDocument parse_mc_report_json(std::string_view json_text);

// Plot-ready tables. Every table has a header row.
std::string consistency_table(const mc::McReport& report);
std::string normality_table(const mc::McReport& report);
std::string covariance_match_table(const mc::McReport& report);
std::string level_table(const mc::McReport& report);
std::string unbiasedness_table(const mc::McReport& report);

/// Per-replicate dump, one row per replicate in (size index, replicate) order.
std::string replicates_table(const mc::ReplicateTable& records);
mc::ReplicateTable parse_replicates_table(std::string_view text);

}  // namespace gcm::report
