#pragma once

#include "gcm/mc.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace gcm {

/// Monte Carlo configuration plus output options, as read from config.json.
///
/// Schema (unknown keys are rejected at every level):
///
///     {
///       "scenario": {
///         "design":   {"builder": "potthoff_roy", "groups": 2, "times": [1,2,3,4], "q": 2},
///         "theta":    [[...], ...],              // m x q
///         "sigma":    [[...], ...],              // p x p, SPD
///         "contrast": {"kind": "equality"} | {"kind": "explicit", "C": [[...]], "D": [[...]]},
///         "noise":    {"family": "gaussian" | "uniform" | "student_t", "df": 6}
///       },
///       "sample_sizes": [16, 64, 256],           // subjects per group
///       "replications": 500,
///       "seed": 20080601,
///       "alpha": 0.05,
///       "alternative_theta": [[...], ...],       // optional
///       "output_dir": "out",                     // optional
///       "format": {"tables": true, "indent": 2}, // optional
///       "dump_replicates": false                 // optional
///     }
struct ExperimentConfig {
    mc::McConfig mc;
    std::optional<std::string> output_dir;
    bool write_tables = true;
    int indent = 2;
    bool dump_replicates = false;
};

ExperimentConfig parse_experiment_config(std::string_view json_text);
std::string dump_experiment_config(const ExperimentConfig& config);

}  // namespace gcm
