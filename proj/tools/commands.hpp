#pragma once

#include "gcm/mc.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>

namespace gcm::cli {

enum ExitCode : int {
    kOk = 0,
    kValidation = 2,
    kIo = 3,
    kSingularFirstStage = 4,
    kSingularStandardizer = 5,
};

struct EstimateInputs {
    std::filesystem::path Y, X, Z, C, D;
    std::optional<std::filesystem::path> sigma0;
    std::optional<std::filesystem::path> truth;
    bool header = false;
};

/// Writes Y.csv, X.csv, Z.csv and truth.json for the config's scenario at the
/// first sample size.
int cmd_simulate(const std::filesystem::path& config, std::optional<std::uint64_t> seed,
                 const std::filesystem::path& out);

/// Writes report.json with gamma-hat, Sigma-hat and plug-in covariance factors.
int cmd_estimate(const EstimateInputs& inputs, const std::filesystem::path& out);

/// Writes report.json with the standardized statistic and its chi-square test.
int cmd_test(const EstimateInputs& inputs, double alpha, const std::filesystem::path& out);

/// Writes report.json plus the plot-ready tables of the requested run.
int cmd_mc(mc::McKind kind, const std::filesystem::path& config, std::optional<std::uint64_t> seed,
           const std::optional<std::filesystem::path>& out, bool dump_replicates, unsigned threads);

/// GCM_THREADS, 0 when unset or unparsable.
unsigned threads_from_env();

}  // namespace gcm::cli
