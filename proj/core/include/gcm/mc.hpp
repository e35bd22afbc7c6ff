#pragma once

#include "gcm/error.hpp"
#include "gcm/inference.hpp"
#include "gcm/matlib.hpp"
#include "gcm/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gcm::mc {

/// Potthoff-Roy layout: `groups` groups measured at `times`, polynomial
/// profile with q coefficients. Sample sizes are given as subjects per group.
struct DesignSpec {
    int groups = 2;
    std::vector<double> times;
    int q = 2;
};

struct ContrastSpec {
    enum class Kind { Equality, Explicit };
    Kind kind = Kind::Equality;
    Matrix C;  ///< only for Kind::Explicit
    Matrix D;

    Contrast resolve(int m, int q) const;
};

struct Scenario {
    DesignSpec design;
    Matrix theta;  ///< m x q
    Matrix sigma;  ///< p x p, must be SPD
    ContrastSpec contrast;
    NoiseSpec noise;
};

struct McConfig {
    Scenario scenario;
    std::vector<int> sample_sizes;  ///< subjects per group r; n = r * groups
    int replications = 100;
    std::uint64_t seed = 0;
    double alpha = 0.05;
    /// Fixed alternative for the power column of the level run.
    std::optional<Matrix> alternative_theta;
};

enum class McKind { Consistency, Unbiasedness, Normality, Level };

std::string_view to_string(McKind kind);
McKind parse_mc_kind(std::string_view name);

struct McOptions {
    unsigned threads = 0;  ///< 0 = hardware concurrency; never affects results
};

/// Everything recorded for one replicate. Summaries are computed from these
/// records only, so a persisted dump reproduces the report.
struct ReplicateRecord {
    bool ok = false;
    std::string failure;  ///< ErrorKind name when !ok
    double sigma_err = 0.0;   ///< ||Sigma-hat - Sigma||_F
    double gamma_err = 0.0;   ///< ||gamma-hat - gamma||_F
    double h_gap = 0.0;       ///< max |H(Y) - H|
    double chi_sq = 0.0;      ///< test of C Theta D' = 0 with Sigma-hat standardizers
    double p_value = 1.0;
    std::optional<double> alt_p_value;
    Vector gamma;      ///< vec_t(gamma-hat)
    Vector z_true;     ///< true-law whitened sqrt(n) vec_t(gamma-hat - gamma); empty if the law is singular
    Vector z_plugin;   ///< plug-in whitened sqrt(n) vec_t(gamma-hat - gamma)
};

struct CoordinateDiagnostics {
    double ks_distance = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

struct McCell {
    int r = 0;
    int n = 0;
    int successes = 0;
    int failures = 0;

    Matrix truth_gamma;
    Matrix mean_gamma;
    Matrix bias;
    Matrix bias_se;
    bool bias_flagged = false;

    double median_sigma_err = 0.0;
    double mean_sigma_err = 0.0;
    double median_gamma_err = 0.0;
    double mean_gamma_err = 0.0;
    double median_h_gap = 0.0;
    double mean_h_gap = 0.0;

    Matrix empirical_cov;  ///< covariance of sqrt(n) vec_t(gamma-hat - gamma)
    Matrix theory_cov;     ///< kron(C R^-1 C', D (Z' Sigma^-1 Z)^-1 D'); empty if unavailable
    double relative_frobenius = 0.0;

    std::vector<CoordinateDiagnostics> true_whitened;
    std::vector<CoordinateDiagnostics> plugin_whitened;

    double rejection_rate = 0.0;
    std::optional<double> power;
};

/// Acceptance bands used when the report flags a cell.
struct Thresholds {
    double bias_se_multiple = 4.0;
    double covariance_band = 0.10;
    double ks_critical = 0.0;  ///< 1.63 / sqrt(replications)
};

struct McReport {
    McKind kind = McKind::Consistency;
    McConfig config;
    Thresholds thresholds;
    std::vector<McCell> cells;
};

using ReplicateTable = std::vector<std::vector<ReplicateRecord>>;  ///< [size index][replicate]

struct McRun {
    McReport report;
    ReplicateTable records;
};

/// Throws InvalidConfig (or a more specific kind) when the scenario is unusable.
void validate_config(const McConfig& cfg, McKind kind);

/// Builds the design for subjects-per-group r.
Design scenario_design(const Scenario& scenario, int r);

/// Replicate i at size index k draws from the substream derived from (seed, k, i).
ReplicateRecord run_replicate(const McConfig& cfg, std::size_t size_index, int replicate);

McRun run(McKind kind, const McConfig& cfg, const McOptions& options = {});

/// Pure reduction over ordered records.
McReport summarize(McKind kind, const McConfig& cfg, const ReplicateTable& records);

McReport run_consistency(const McConfig& cfg, const McOptions& options = {});
McReport run_unbiasedness(const McConfig& cfg, const McOptions& options = {});
McReport run_normality(const McConfig& cfg, const McOptions& options = {});
McReport run_level(const McConfig& cfg, const McOptions& options = {});

}  // namespace gcm::mc
