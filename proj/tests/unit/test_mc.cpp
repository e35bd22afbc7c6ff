#include "gcm/config.hpp"
#include "gcm/error.hpp"
#include "gcm/mc.hpp"
#include "gcm/report.hpp"

#include <doctest.h>

#include <cmath>

using namespace gcm;

namespace {

mc::McConfig base_config(int m) {
    mc::McConfig cfg;
    cfg.scenario.design = {m, {1, 2, 3, 4}, 2};
    cfg.scenario.theta = Matrix::Zero(m, 2);
    for (int g = 0; g < m; ++g) {
        cfg.scenario.theta(g, 0) = 1.0 + 0.5 * g;
        cfg.scenario.theta(g, 1) = 0.5 + 0.2 * g;
    }
    cfg.scenario.sigma.resize(4, 4);
    cfg.scenario.sigma << 1.0, 0.5, 0.3, 0.2,
                          0.5, 1.2, 0.5, 0.3,
                          0.3, 0.5, 1.1, 0.5,
                          0.2, 0.3, 0.5, 1.3;
    cfg.sample_sizes = {10, 40};
    cfg.replications = 120;
    cfg.seed = 99;
    return cfg;
}

mc::McConfig null_config() {
    mc::McConfig cfg = base_config(2);
    cfg.scenario.theta << 1.0, 0.5, 2.0, 0.5;
    Matrix alt = cfg.scenario.theta;
    alt(1, 1) = 1.5;
    cfg.alternative_theta = alt;
    return cfg;
}

std::string render(const mc::McReport& report) {
    ExperimentConfig ec;
    ec.mc = report.config;
    return report::mc_report_json(report, ec, report::Meta{});
}

}  // namespace

TEST_CASE("config validation") {
    mc::McConfig cfg = base_config(2);
    CHECK_NOTHROW(mc::validate_config(cfg, mc::McKind::Consistency));

    mc::McConfig bad = cfg;
    bad.sample_sizes = {};
    CHECK_THROWS_AS(mc::validate_config(bad, mc::McKind::Consistency), Error);
    bad.sample_sizes = {40, 10};
    CHECK_THROWS_AS(mc::validate_config(bad, mc::McKind::Consistency), Error);
    bad.sample_sizes = {2};  // n - m = 2 < p
    CHECK_THROWS_AS(mc::validate_config(bad, mc::McKind::Consistency), Error);

    bad = cfg;
    bad.replications = 1;
    CHECK_THROWS_AS(mc::validate_config(bad, mc::McKind::Consistency), Error);

    bad = cfg;
    bad.scenario.noise = {NoiseFamily::StudentT, 3.0};
    CHECK_THROWS_AS(mc::validate_config(bad, mc::McKind::Consistency), Error);

    // level runs need a null scenario
    CHECK_THROWS_AS(mc::validate_config(cfg, mc::McKind::Level), Error);
    CHECK_NOTHROW(mc::validate_config(null_config(), mc::McKind::Level));
}

TEST_CASE("replicates are reproducible and independent of scheduling") {
    const mc::McConfig cfg = base_config(3);
    const mc::ReplicateRecord a = mc::run_replicate(cfg, 1, 17);
    const mc::ReplicateRecord b = mc::run_replicate(cfg, 1, 17);
    CHECK(a.gamma == b.gamma);
    CHECK(a.sigma_err == b.sigma_err);
    CHECK(mc::run_replicate(cfg, 1, 18).gamma != a.gamma);
    CHECK(mc::run_replicate(cfg, 0, 17).gamma != a.gamma);

    for (mc::McKind kind : {mc::McKind::Consistency, mc::McKind::Normality}) {
        const std::string one = render(mc::run(kind, cfg, {1}).report);
        const std::string four = render(mc::run(kind, cfg, {4}).report);
        CHECK(one == four);
    }
}

TEST_CASE("summaries are reproduced from the replicate dump") {
    const mc::McConfig cfg = null_config();
    const mc::McRun run = mc::run(mc::McKind::Level, cfg, {2});
    const std::string dump = report::replicates_table(run.records);
    const mc::ReplicateTable parsed = report::parse_replicates_table(dump);
    CHECK(report::replicates_table(parsed) == dump);
    const mc::McReport again = mc::summarize(mc::McKind::Level, cfg, parsed);
    CHECK(render(again) == render(run.report));
}

TEST_CASE("cell accounting and ranges") {
    const mc::McConfig cfg = null_config();
    const mc::McReport report = mc::run_level(cfg, {2});
    REQUIRE(report.cells.size() == 2);
    for (const mc::McCell& cell : report.cells) {
        CHECK(cell.successes + cell.failures == cfg.replications);
        CHECK(cell.n == 2 * cell.r);
        CHECK(cell.rejection_rate >= 0.0);
        CHECK(cell.rejection_rate <= 1.0);
        REQUIRE(cell.power.has_value());
        CHECK(*cell.power >= 0.0);
        CHECK(*cell.power <= 1.0);
        for (const auto& d : cell.true_whitened) {
            CHECK(d.ks_distance >= 0.0);
            CHECK(d.ks_distance <= 1.0);
        }
        CHECK(cell.theory_cov.rows() == cell.empirical_cov.rows());
    }
    // a slope gap of 1.0 is detected almost surely at r = 40
    CHECK(*report.cells[1].power > 0.9);
}

TEST_CASE("error medians shrink with the sample size") {
    mc::McConfig cfg = base_config(3);
    cfg.sample_sizes = {8, 32, 128};
    cfg.replications = 200;
    const mc::McReport report = mc::run_consistency(cfg, {2});
    REQUIRE(report.cells.size() == 3);
    for (std::size_t k = 1; k < 3; ++k) {
        CHECK(report.cells[k].median_sigma_err < report.cells[k - 1].median_sigma_err);
        CHECK(report.cells[k].median_gamma_err < report.cells[k - 1].median_gamma_err);
        CHECK(report.cells[k].median_h_gap < report.cells[k - 1].median_h_gap);
    }
}

TEST_CASE("zero coefficients give a mean estimate near zero") {
    mc::McConfig cfg = base_config(3);
    cfg.scenario.theta.setZero();
    cfg.sample_sizes = {12};
    cfg.replications = 2000;
    cfg.scenario.noise = {NoiseFamily::StudentT, 6.0};
    const mc::McReport report = mc::run_unbiasedness(cfg, {2});
    const mc::McCell& cell = report.cells.front();
    CHECK(cell.truth_gamma.isZero(0.0));
    CHECK_FALSE(cell.bias_flagged);
    for (Eigen::Index i = 0; i < cell.bias.size(); ++i)
        CHECK(std::abs(cell.bias(i)) < 4.0 * cell.bias_se(i));
}

TEST_CASE("mc kind names") {
    for (mc::McKind k : {mc::McKind::Consistency, mc::McKind::Unbiasedness, mc::McKind::Normality,
                         mc::McKind::Level})
        CHECK(mc::parse_mc_kind(mc::to_string(k)) == k);
    CHECK_THROWS_AS(mc::parse_mc_kind("bootstrap"), Error);
}
