#include "gcm/config.hpp"

#include "json_util.hpp"

namespace gcm {

namespace {

using detail::expect_keys;
using detail::get_as;
using detail::json;
using detail::matrix_from;
using detail::matrix_json;
using detail::schema_error;

mc::Scenario scenario_from(const json& j) {
    expect_keys(j, {"design", "theta", "sigma", "contrast", "noise"}, {}, "scenario");
    mc::Scenario sc;

    const json& design = j.at("design");
    expect_keys(design, {"builder", "groups", "times", "q"}, {}, "scenario.design");
    if (get_as<std::string>(design.at("builder"), "scenario.design.builder") != "potthoff_roy") {
        schema_error("scenario.design.builder", "only 'potthoff_roy' is supported");
    }
    sc.design.groups = get_as<int>(design.at("groups"), "scenario.design.groups");
    sc.design.times = get_as<std::vector<double>>(design.at("times"), "scenario.design.times");
    sc.design.q = get_as<int>(design.at("q"), "scenario.design.q");

    sc.theta = matrix_from(j.at("theta"), "scenario.theta");
    sc.sigma = matrix_from(j.at("sigma"), "scenario.sigma");

    const json& contrast = j.at("contrast");
    expect_keys(contrast, {"kind"}, {"C", "D"}, "scenario.contrast");
    const auto kind = get_as<std::string>(contrast.at("kind"), "scenario.contrast.kind");
    if (kind == "equality") {
        if (contrast.contains("C") || contrast.contains("D")) {
            schema_error("scenario.contrast", "equality contrast takes no C or D");
        }
        sc.contrast.kind = mc::ContrastSpec::Kind::Equality;
    } else if (kind == "explicit") {
        expect_keys(contrast, {"kind", "C", "D"}, {}, "scenario.contrast");
        sc.contrast.kind = mc::ContrastSpec::Kind::Explicit;
        sc.contrast.C = matrix_from(contrast.at("C"), "scenario.contrast.C");
        sc.contrast.D = matrix_from(contrast.at("D"), "scenario.contrast.D");
    } else {
        schema_error("scenario.contrast.kind", "expected 'equality' or 'explicit'");
    }

    const json& noise = j.at("noise");
    expect_keys(noise, {"family"}, {"df"}, "scenario.noise");
    try {
        sc.noise.family = parse_noise_family(get_as<std::string>(noise.at("family"), "scenario.noise.family"));
    } catch (const Error& e) {
        schema_error("scenario.noise.family", e.what());
    }
    if (noise.contains("df")) {
        sc.noise.df = get_as<double>(noise.at("df"), "scenario.noise.df");
    }
    return sc;
}

json scenario_json(const mc::Scenario& sc) {
    json contrast = {{"kind", sc.contrast.kind == mc::ContrastSpec::Kind::Equality ? "equality"
                                                                                  : "explicit"}};
    if (sc.contrast.kind == mc::ContrastSpec::Kind::Explicit) {
        contrast["C"] = matrix_json(sc.contrast.C);
        contrast["D"] = matrix_json(sc.contrast.D);
    }
    json noise = {{"family", std::string(to_string(sc.noise.family))}};
    if (sc.noise.family == NoiseFamily::StudentT || sc.noise.df != 0.0) {
        noise["df"] = sc.noise.df;
    }
    return json{
        {"design",
         {{"builder", "potthoff_roy"},
          {"groups", sc.design.groups},
          {"times", sc.design.times},
          {"q", sc.design.q}}},
        {"theta", matrix_json(sc.theta)},
        {"sigma", matrix_json(sc.sigma)},
        {"contrast", contrast},
        {"noise", noise},
    };
}

}  // namespace

namespace detail {

ExperimentConfig experiment_config_from(const json& j) {
    expect_keys(j, {"scenario", "sample_sizes", "replications", "seed", "alpha"},
                {"alternative_theta", "output_dir", "format", "dump_replicates"}, "config");
    ExperimentConfig cfg;
    cfg.mc.scenario = scenario_from(j.at("scenario"));
    cfg.mc.sample_sizes = get_as<std::vector<int>>(j.at("sample_sizes"), "config.sample_sizes");
    cfg.mc.replications = get_as<int>(j.at("replications"), "config.replications");
    cfg.mc.seed = get_as<std::uint64_t>(j.at("seed"), "config.seed");
    cfg.mc.alpha = get_as<double>(j.at("alpha"), "config.alpha");
    if (j.contains("alternative_theta")) {
        cfg.mc.alternative_theta = matrix_from(j.at("alternative_theta"), "config.alternative_theta");
    }
    if (j.contains("output_dir")) {
        cfg.output_dir = get_as<std::string>(j.at("output_dir"), "config.output_dir");
    }
    if (j.contains("format")) {
        const json& format = j.at("format");
        expect_keys(format, {}, {"tables", "indent"}, "config.format");
        if (format.contains("tables")) {
            cfg.write_tables = get_as<bool>(format.at("tables"), "config.format.tables");
        }
        if (format.contains("indent")) {
            cfg.indent = get_as<int>(format.at("indent"), "config.format.indent");
        }
    }
    if (j.contains("dump_replicates")) {
        cfg.dump_replicates = get_as<bool>(j.at("dump_replicates"), "config.dump_replicates");
    }
    return cfg;
}

json experiment_config_json(const ExperimentConfig& cfg) {
    json j = {
        {"scenario", scenario_json(cfg.mc.scenario)},
        {"sample_sizes", cfg.mc.sample_sizes},
        {"replications", cfg.mc.replications},
        {"seed", cfg.mc.seed},
        {"alpha", cfg.mc.alpha},
        {"format", {{"tables", cfg.write_tables}, {"indent", cfg.indent}}},
        {"dump_replicates", cfg.dump_replicates},
    };
    if (cfg.mc.alternative_theta) {
        j["alternative_theta"] = matrix_json(*cfg.mc.alternative_theta);
    }
    if (cfg.output_dir) {
        j["output_dir"] = *cfg.output_dir;
    }
    return j;
}

}  // namespace detail

ExperimentConfig parse_experiment_config(std::string_view json_text) {
    return detail::experiment_config_from(detail::parse_json(json_text, "config"));
}

std::string dump_experiment_config(const ExperimentConfig& config) {
    return detail::experiment_config_json(config).dump(2) + "\n";
}

}  // namespace gcm
