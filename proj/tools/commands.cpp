#include "commands.hpp"

#include "gcm/config.hpp"
#include "gcm/error.hpp"
#include "gcm/estimators.hpp"
#include "gcm/inference.hpp"
#include "gcm/io.hpp"
#include "gcm/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

namespace gcm::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

json matrix_json(const Matrix& a) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        throw Error(ErrorKind::Parse, where + ": expected a non-empty array of rows");
    }
    Matrix a(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_array() || j[i].size() != j[0].size()) {
            throw Error(ErrorKind::Parse, where + ": ragged rows");
        }
        for (std::size_t c = 0; c < j[i].size(); ++c) {
            if (!j[i][c].is_number()) throw Error(ErrorKind::Parse, where + ": non-numeric entry");
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[i][c].get<double>();
        }
    }
    return a;
}

void report_error(const Error& e) {
    std::cerr << "gcm: " << to_string(e.kind()) << ": " << e.what() << '\n';
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw Error(ErrorKind::Io, "cannot create output directory " + dir.string());
    }
}

struct Truth {
    Matrix theta;
    Matrix sigma;
    std::uint64_t seed = 0;
};

Truth read_truth(const fs::path& path) {
    json j;
    try {
        j = json::parse(io::read_file(path));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
    }
    static const std::vector<std::string> keys{"theta", "sigma", "sigma_cholesky", "seed", "noise",
                                               "design"};
    if (!j.is_object()) throw Error(ErrorKind::Parse, path.string() + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw Error(ErrorKind::Parse, path.string() + ": unknown key '" + key + "'");
        }
    }
    for (const auto& key : keys) {
        if (!j.contains(key)) throw Error(ErrorKind::Parse, path.string() + ": missing key '" + key + "'");
    }
    return Truth{matrix_from(j.at("theta"), "truth.theta"), matrix_from(j.at("sigma"), "truth.sigma"),
                 j.at("seed").get<std::uint64_t>()};
}

struct Loaded {
    Dataset data;
    Contrast contrast;
    std::optional<SpdMatrix> sigma0;
    std::optional<Truth> truth;
    std::vector<std::string> warnings;
};

Loaded load(const EstimateInputs& in) {
    Loaded l;
    l.data.Y = io::read_matrix_csv(in.Y, in.header);
    l.data.design.X = io::read_matrix_csv(in.X, in.header);
    l.data.design.Z = io::read_matrix_csv(in.Z, in.header);
    l.contrast.C = io::read_matrix_csv(in.C, in.header);
    l.contrast.D = io::read_matrix_csv(in.D, in.header);
    validate(l.data.design);
    validate_contrast(l.contrast, l.data.design);
    if (l.data.Y.rows() != l.data.design.n() || l.data.Y.cols() != l.data.design.p()) {
        throw Error(ErrorKind::DimensionMismatch, "Y must have n rows (as X) and p columns (rows of Z)");
    }
    if (auto w = conditioning_warning(l.data.design)) {
        l.warnings.push_back(*w);
        std::cerr << "gcm: warning: " << *w << '\n';
    }
    if (in.sigma0) {
        const Matrix s0 = io::read_matrix_csv(*in.sigma0, in.header);
        if (s0.rows() != l.data.design.p() || s0.cols() != l.data.design.p()) {
            throw Error(ErrorKind::DimensionMismatch, "Sigma0 must be p x p");
        }
        l.sigma0 = SpdMatrix(s0);
    }
    if (in.truth) {
        l.truth = read_truth(*in.truth);
        if (l.truth->theta.rows() != l.data.design.m() || l.truth->theta.cols() != l.data.design.q() ||
            l.truth->sigma.rows() != l.data.design.p() || l.truth->sigma.cols() != l.data.design.p()) {
            throw Error(ErrorKind::DimensionMismatch, "truth.json does not conform to the design");
        }
    }
    return l;
}

json inputs_json(const EstimateInputs& in, std::optional<double> alpha) {
    json j = {
        {"Y", in.Y.string()}, {"X", in.X.string()}, {"Z", in.Z.string()},
        {"C", in.C.string()}, {"D", in.D.string()}, {"header", in.header},
        {"sigma0", in.sigma0 ? json(in.sigma0->string()) : json(nullptr)},
        {"truth", in.truth ? json(in.truth->string()) : json(nullptr)},
    };
    if (alpha) j["alpha"] = *alpha;
    return j;
}

int write_report(const fs::path& out, const report::Meta& meta, const json& inputs,
                 const json& results, const std::vector<report::ErrorEntry>& errors) {
    ensure_dir(out);
    io::write_file_atomic(out / "report.json",
                          report::make_report(meta, inputs.dump(), results.dump(), errors));
    return kOk;
}

// Writes an error report when the output directory is usable; I/O problems
// while doing so are swallowed because the original code is more useful.
int fail(const fs::path& out, const report::Meta& meta, const json& inputs, const Error& e, int code) {
    report_error(e);
    try {
        write_report(out, meta, inputs, nullptr,
                     {{std::string(to_string(e.kind())), e.what()}});
    } catch (const Error&) {
    }
    return code;
}

int load_failure_code(const Error& e) {
    return e.kind() == ErrorKind::Io ? kIo : kValidation;
}

json standard_errors(const AsymptoticLaw& law) {
    Matrix se(law.left.rows(), law.right.rows());
    for (Eigen::Index i = 0; i < se.rows(); ++i) {
        for (Eigen::Index j = 0; j < se.cols(); ++j) {
            se(i, j) = std::sqrt(std::max(0.0, law.left(i, i) * law.right(j, j)));
        }
    }
    return matrix_json(se);
}

report::Meta meta_for(const Loaded* loaded) {
    report::Meta meta;
    meta.timestamp = report::deterministic_timestamp();
    if (loaded && loaded->truth) meta.seed = loaded->truth->seed;
    return meta;
}

// Estimation shared by estimate and test. Throws Error on singular first stage.
struct Estimate {
    Matrix theta;
    Matrix gamma;
    std::optional<SigmaHat> sigma_hat;
    AsymptoticLaw law;
};

Estimate estimate(const Loaded& l) {
    Estimate e;
    if (l.sigma0) {
        e.theta = theta_hat_known(l.data, *l.sigma0);
        e.law = known_cov(l.data, *l.sigma0, l.contrast);
    } else {
        e.sigma_hat = sigma_hat(l.data);
        e.theta = theta_hat_known(l.data, e.sigma_hat->value);
        e.law = plugin_cov(l.data, l.contrast);
    }
    e.gamma = l.contrast.C * e.theta * l.contrast.D.transpose();
    return e;
}

json estimate_results(const Loaded& l, const Estimate& e) {
    json results = {
        {"mode", l.sigma0 ? "known_sigma" : "two_stage"},
        {"gamma_hat", matrix_json(e.gamma)},
        {"theta_hat", matrix_json(e.theta)},
        {"plugin_cov", {{"left", matrix_json(e.law.left)}, {"right", matrix_json(e.law.right)}}},
        {"standard_errors", standard_errors(e.law)},
        {"warnings", l.warnings},
    };
    if (e.sigma_hat) {
        results["sigma_hat"] = matrix_json(e.sigma_hat->value.matrix());
        results["sigma_hat_divisor"] = e.sigma_hat->divisor;
    }
    if (l.truth) {
        const Matrix gamma_true = l.contrast.C * l.truth->theta * l.contrast.D.transpose();
        json errs = {{"theta", (e.theta - l.truth->theta).norm()},
                     {"gamma", (e.gamma - gamma_true).norm()}};
        if (e.sigma_hat) errs["sigma"] = (e.sigma_hat->value.matrix() - l.truth->sigma).norm();
        results["truth_errors"] = errs;
    }
    return results;
}

}  // namespace

unsigned threads_from_env() {
    const char* value = std::getenv("GCM_THREADS");
    if (!value) return 0;
    char* end = nullptr;
    const unsigned long n = std::strtoul(value, &end, 10);
    return (end == value || *end != '\0') ? 0u : static_cast<unsigned>(n);
}

int cmd_simulate(const fs::path& config_path, std::optional<std::uint64_t> seed, const fs::path& out) {
    ExperimentConfig cfg;
    Design design;
    try {
        cfg = parse_experiment_config(io::read_file(config_path));
        if (seed) cfg.mc.seed = *seed;
        if (cfg.mc.sample_sizes.empty()) {
            throw Error(ErrorKind::InvalidConfig, "sample_sizes must not be empty");
        }
        design = mc::scenario_design(cfg.mc.scenario, cfg.mc.sample_sizes.front());
        validate(design);
        validate_noise(cfg.mc.scenario.noise);
    } catch (const Error& e) {
        report_error(e);
        return load_failure_code(e);
    }
    try {
        const SpdMatrix sigma(cfg.mc.scenario.sigma);
        const ModelParams params{cfg.mc.scenario.theta, sigma};
        const Dataset data = simulate(design, params, cfg.mc.scenario.noise, cfg.mc.seed);
        json noise = {{"family", std::string(to_string(cfg.mc.scenario.noise.family))}};
        if (cfg.mc.scenario.noise.family == NoiseFamily::StudentT) noise["df"] = cfg.mc.scenario.noise.df;
        const json truth = {
            {"theta", matrix_json(params.theta)},
            {"sigma", matrix_json(sigma.matrix())},
            {"sigma_cholesky", matrix_json(sigma.cholesky_lower())},
            {"seed", cfg.mc.seed},
            {"noise", noise},
            {"design",
             {{"builder", "potthoff_roy"},
              {"groups", cfg.mc.scenario.design.groups},
              {"per_group", cfg.mc.sample_sizes.front()},
              {"times", cfg.mc.scenario.design.times},
              {"q", cfg.mc.scenario.design.q}}},
        };
        ensure_dir(out);
        io::write_file_atomic(out / "Y.csv", io::format_matrix_csv(data.Y));
        io::write_file_atomic(out / "X.csv", io::format_matrix_csv(design.X));
        io::write_file_atomic(out / "Z.csv", io::format_matrix_csv(design.Z));
        io::write_file_atomic(out / "truth.json", truth.dump(2) + "\n");
    } catch (const Error& e) {
        report_error(e);
        return e.kind() == ErrorKind::Io ? kIo : kValidation;
    }
    return kOk;
}

int cmd_estimate(const EstimateInputs& inputs, const fs::path& out) {
    const json in_json = inputs_json(inputs, std::nullopt);
    Loaded loaded;
    try {
        loaded = load(inputs);
    } catch (const Error& e) {
        return fail(out, meta_for(nullptr), in_json, e, load_failure_code(e));
    }
    const report::Meta meta = meta_for(&loaded);
    Estimate est;
    try {
        est = estimate(loaded);
    } catch (const Error& e) {
        return fail(out, meta, in_json, e, kSingularFirstStage);
    }
    try {
        return write_report(out, meta, in_json, estimate_results(loaded, est), {});
    } catch (const Error& e) {
        report_error(e);
        return kIo;
    }
}

int cmd_test(const EstimateInputs& inputs, double alpha, const fs::path& out) {
    const json in_json = inputs_json(inputs, alpha);
    Loaded loaded;
    try {
        if (!(alpha > 0.0 && alpha <= 1.0)) {
            throw Error(ErrorKind::InvalidConfig, "--alpha must lie in (0, 1]");
        }
        loaded = load(inputs);
    } catch (const Error& e) {
        return fail(out, meta_for(nullptr), in_json, e, load_failure_code(e));
    }
    const report::Meta meta = meta_for(&loaded);
    Estimate est;
    try {
        est = estimate(loaded);
    } catch (const Error& e) {
        return fail(out, meta, in_json, e, kSingularFirstStage);
    }
    TestResult result;
    try {
        result = test_from_statistic(standardize(est.gamma, est.law, loaded.data.design.n()), alpha);
    } catch (const Error& e) {
        return fail(out, meta, in_json, e, kSingularStandardizer);
    }
    json results = estimate_results(loaded, est);
    results["statistic"] = matrix_json(result.statistic);
    results["chi_sq"] = result.chi_sq;
    results["dof"] = result.dof;
    results["p_value"] = result.p_value;
    results["reject"] = result.reject;
    results["alpha"] = alpha;
    try {
        return write_report(out, meta, in_json, results, {});
    } catch (const Error& e) {
        report_error(e);
        return kIo;
    }
}

int cmd_mc(mc::McKind kind, const fs::path& config_path, std::optional<std::uint64_t> seed,
           const std::optional<fs::path>& out_override, bool dump_replicates, unsigned threads) {
    ExperimentConfig cfg;
    try {
        cfg = parse_experiment_config(io::read_file(config_path));
        if (seed) cfg.mc.seed = *seed;
        if (dump_replicates) cfg.dump_replicates = true;
        mc::validate_config(cfg.mc, kind);
    } catch (const Error& e) {
        report_error(e);
        return load_failure_code(e);
    }
    const fs::path out = out_override ? *out_override : fs::path(cfg.output_dir.value_or("."));

    mc::McRun run;
    try {
        run = mc::run(kind, cfg.mc, mc::McOptions{threads});
    } catch (const Error& e) {
        report_error(e);
        return kValidation;
    }

    report::Meta meta;
    meta.seed = cfg.mc.seed;
    meta.timestamp = report::deterministic_timestamp();

    // Render everything before touching the disk.
    std::vector<std::pair<std::string, std::string>> files;
    files.emplace_back("report.json", report::mc_report_json(run.report, cfg, meta, cfg.indent));
    if (cfg.write_tables) {
        switch (kind) {
            case mc::McKind::Consistency:
                files.emplace_back("tables/consistency.csv", report::consistency_table(run.report));
                break;
            case mc::McKind::Unbiasedness:
                files.emplace_back("tables/unbiasedness.csv", report::unbiasedness_table(run.report));
                break;
            case mc::McKind::Normality:
                files.emplace_back("tables/normality.csv", report::normality_table(run.report));
                files.emplace_back("tables/covariance_match.csv",
                                   report::covariance_match_table(run.report));
                break;
            case mc::McKind::Level:
                files.emplace_back("tables/level.csv", report::level_table(run.report));
                break;
        }
    }
    if (cfg.dump_replicates) {
        files.emplace_back("replicates.csv", report::replicates_table(run.records));
    }
    try {
        ensure_dir(out / "tables");
        for (const auto& [name, content] : files) {
            io::write_file_atomic(out / name, content);
        }
    } catch (const Error& e) {
        report_error(e);
        return kIo;
    }
    return kOk;
}

}  // namespace gcm::cli
