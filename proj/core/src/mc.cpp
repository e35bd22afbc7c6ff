#include "gcm/mc.hpp"

#include "gcm/estimators.hpp"
#include "gcm/random.hpp"
#include "gcm/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

namespace gcm::mc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Quantities shared by every replicate of one sample size.
struct CellContext {
    Design design;
    ModelParams params;
    NoiseSpec noise;
    Contrast contrast;
    Matrix truth_gamma{};
    Matrix h_true{};
    Matrix finite_left{};  // C (X'X)^-1 C'
    AsymptoticLaw law{};
    std::optional<Matrix> left_whitener{};   // (C R^-1 C')^-1/2
    std::optional<Matrix> right_whitener{};  // (D (Z' Sigma^-1 Z)^-1 D')^-1/2
    std::optional<Matrix> alternative_shift{};  // X (Theta_alt - Theta) Z'
    std::uint64_t seed = 0;
    std::size_t size_index = 0;
};

SpdMatrix limit_gram(int groups) {
    // Balanced Potthoff-Roy design: X'X / n = I / m for every r.
    return SpdMatrix(Matrix::Identity(groups, groups) / static_cast<double>(groups));
}

CellContext make_context(const McConfig& cfg, std::size_t size_index) {
    const Scenario& sc = cfg.scenario;
    CellContext ctx{
        .design = scenario_design(sc, cfg.sample_sizes.at(size_index)),
        .params = ModelParams{sc.theta, SpdMatrix(sc.sigma)},
        .noise = sc.noise,
        .contrast = sc.contrast.resolve(sc.design.groups, sc.design.q),
    };
    ctx.truth_gamma = ctx.contrast.C * sc.theta * ctx.contrast.D.transpose();
    ctx.h_true = h_matrix(ctx.params.sigma, ctx.design.Z).value;
    const Matrix& X = ctx.design.X;
    ctx.finite_left =
        symmetrize(ctx.contrast.C * (X.transpose() * X).llt().solve(ctx.contrast.C.transpose()));
    ctx.law = asym_cov(AsymptoticSpec{limit_gram(sc.design.groups), ctx.params.sigma,
                                      ctx.design.Z, ctx.contrast});
    if (SpdMatrix::is_spd(ctx.law.left) && SpdMatrix::is_spd(ctx.law.right)) {
        ctx.left_whitener = inv_sqrt_spd(SpdMatrix(ctx.law.left));
        ctx.right_whitener = inv_sqrt_spd(SpdMatrix(ctx.law.right));
    }
    if (cfg.alternative_theta) {
        ctx.alternative_shift = X * (*cfg.alternative_theta - sc.theta) * ctx.design.Z.transpose();
    }
    ctx.seed = cfg.seed;
    ctx.size_index = size_index;
    return ctx;
}

ReplicateRecord replicate(const CellContext& ctx, int index) {
    ReplicateRecord rec;
    const std::uint64_t seed = derive_seed(
        ctx.seed, {static_cast<std::uint64_t>(ctx.size_index), static_cast<std::uint64_t>(index)});
    const Dataset data = simulate(ctx.design, ctx.params, ctx.noise, seed);
    const auto n = ctx.design.n();
    const double root_n = std::sqrt(static_cast<double>(n));
    try {
        const SigmaHat sh = sigma_hat(data);
        const Matrix theta = theta_hat_known(data, sh.value);
        const Matrix gamma = ctx.contrast.C * theta * ctx.contrast.D.transpose();
        const Matrix error = gamma - ctx.truth_gamma;

        rec.sigma_err = (sh.value.matrix() - ctx.params.sigma.matrix()).norm();
        rec.gamma_err = error.norm();
        rec.h_gap = max_abs(h_matrix(sh, ctx.design.Z).value - ctx.h_true);
        rec.gamma = vec_t(gamma);
        if (ctx.left_whitener) {
            rec.z_true = vec_t(*ctx.left_whitener * (root_n * error) * *ctx.right_whitener);
        }

        const AsymptoticLaw plugin{ctx.finite_left,
                                   right_factor(sh.value, ctx.design.Z, ctx.contrast.D)};
        const TestResult test = test_from_statistic(standardize(gamma, plugin, n), 1.0);
        rec.chi_sq = test.chi_sq;
        rec.p_value = test.p_value;
        rec.z_plugin = vec_t(standardize(error, plugin, n));

        if (ctx.alternative_shift) {
            Dataset shifted = data;
            shifted.Y += *ctx.alternative_shift;
            const SigmaHat alt_sh = sigma_hat(shifted);
            const Matrix alt_gamma = ctx.contrast.C * theta_hat_known(shifted, alt_sh.value) *
                                     ctx.contrast.D.transpose();
            const AsymptoticLaw alt_law{ctx.finite_left,
                                        right_factor(alt_sh.value, ctx.design.Z, ctx.contrast.D)};
            rec.alt_p_value = test_from_statistic(standardize(alt_gamma, alt_law, n), 1.0).p_value;
        }
        rec.ok = true;
    } catch (const Error& e) {
        rec = ReplicateRecord{};
        rec.failure = std::string(to_string(e.kind()));
    }
    return rec;
}

unsigned resolve_threads(unsigned requested) {
    if (requested != 0) {
        return requested;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<CoordinateDiagnostics> diagnose(const std::vector<const Vector*>& draws) {
    if (draws.empty() || draws.front()->size() == 0) {
        return {};
    }
    const auto dim = draws.front()->size();
    std::vector<CoordinateDiagnostics> out;
    std::vector<double> column(draws.size());
    for (Eigen::Index c = 0; c < dim; ++c) {
        for (std::size_t i = 0; i < draws.size(); ++i) {
            column[i] = (*draws[i])(c);
        }
        const stats::Moments mom = stats::moments(column);
        out.push_back(CoordinateDiagnostics{stats::ks_distance_normal(column), mom.mean,
                                            mom.variance, mom.skewness, mom.excess_kurtosis});
    }
    return out;
}

McCell summarize_cell(const McConfig& cfg, std::size_t k, const std::vector<ReplicateRecord>& recs) {
    const Scenario& sc = cfg.scenario;
    const int r = cfg.sample_sizes.at(k);
    const Design design = scenario_design(sc, r);
    const Contrast contrast = sc.contrast.resolve(sc.design.groups, sc.design.q);

    McCell cell;
    cell.r = r;
    cell.n = static_cast<int>(design.n());
    cell.truth_gamma = contrast.C * sc.theta * contrast.D.transpose();
    const auto s = cell.truth_gamma.rows();
    const auto t = cell.truth_gamma.cols();
    const double root_n = std::sqrt(static_cast<double>(cell.n));

    std::vector<const ReplicateRecord*> good;
    for (const ReplicateRecord& rec : recs) {
        if (rec.ok) {
            good.push_back(&rec);
        }
    }
    cell.successes = static_cast<int>(good.size());
    cell.failures = static_cast<int>(recs.size()) - cell.successes;
    const auto count = static_cast<double>(good.size());

    std::vector<double> sigma_err, gamma_err, h_gap;
    for (const ReplicateRecord* rec : good) {
        sigma_err.push_back(rec->sigma_err);
        gamma_err.push_back(rec->gamma_err);
        h_gap.push_back(rec->h_gap);
    }
    cell.median_sigma_err = stats::median(sigma_err);
    cell.mean_sigma_err = stats::mean(sigma_err);
    cell.median_gamma_err = stats::median(gamma_err);
    cell.mean_gamma_err = stats::mean(gamma_err);
    cell.median_h_gap = stats::median(h_gap);
    cell.mean_h_gap = stats::mean(h_gap);

    // Bias and its Monte Carlo standard error.
    const auto dim = s * t;
    Vector sum = Vector::Zero(dim);
    for (const ReplicateRecord* rec : good) {
        sum += rec->gamma;
    }
    const Vector mean_vec = good.empty() ? Vector::Constant(dim, kNaN) : Vector(sum / count);
    Vector var = Vector::Zero(dim);
    for (const ReplicateRecord* rec : good) {
        var += (rec->gamma - mean_vec).cwiseAbs2();
    }
    const Vector se = good.size() < 2 ? Vector::Constant(dim, kNaN)
                                      : Vector((var / (count - 1.0) / count).cwiseSqrt());
    cell.mean_gamma = unvec_t(mean_vec, s, t);
    cell.bias = cell.mean_gamma - cell.truth_gamma;
    cell.bias_se = unvec_t(se, s, t);
    const Thresholds bands;
    cell.bias_flagged = false;
    for (Eigen::Index i = 0; i < cell.bias.size(); ++i) {
        const double b = cell.bias.reshaped()(i);
        const double e = cell.bias_se.reshaped()(i);
        if (!(std::abs(b) <= bands.bias_se_multiple * e)) {
            cell.bias_flagged = true;
        }
    }

    // Empirical covariance of sqrt(n) vec_t(gamma-hat - gamma).
    const Vector truth_vec = vec_t(cell.truth_gamma);
    Vector centre = Vector::Zero(dim);
    for (const ReplicateRecord* rec : good) {
        centre += root_n * (rec->gamma - truth_vec);
    }
    if (!good.empty()) {
        centre /= count;
    }
    Matrix emp = Matrix::Zero(dim, dim);
    for (const ReplicateRecord* rec : good) {
        const Vector d = root_n * (rec->gamma - truth_vec) - centre;
        emp += d * d.transpose();
    }
    cell.empirical_cov = good.size() < 2 ? Matrix::Constant(dim, dim, kNaN)
                                         : Matrix(emp / (count - 1.0));

    const AsymptoticLaw law = asym_cov(AsymptoticSpec{limit_gram(sc.design.groups),
                                                      SpdMatrix(sc.sigma), design.Z, contrast});
    cell.theory_cov = law.covariance();
    const double theory_norm = cell.theory_cov.norm();
    cell.relative_frobenius =
        theory_norm > 0.0 ? (cell.empirical_cov - cell.theory_cov).norm() / theory_norm : kNaN;

    std::vector<const Vector*> z_true, z_plugin;
    for (const ReplicateRecord* rec : good) {
        z_true.push_back(&rec->z_true);
        z_plugin.push_back(&rec->z_plugin);
    }
    cell.true_whitened = diagnose(z_true);
    cell.plugin_whitened = diagnose(z_plugin);

    int rejections = 0;
    int alt_rejections = 0;
    bool has_alt = false;
    for (const ReplicateRecord* rec : good) {
        rejections += rec->p_value < cfg.alpha ? 1 : 0;
        if (rec->alt_p_value) {
            has_alt = true;
            alt_rejections += *rec->alt_p_value < cfg.alpha ? 1 : 0;
        }
    }
    cell.rejection_rate = good.empty() ? kNaN : rejections / count;
    if (has_alt) {
        cell.power = alt_rejections / count;
    }
    return cell;
}

}  // namespace

std::string_view to_string(McKind kind) {
    switch (kind) {
        case McKind::Consistency: return "consistency";
        case McKind::Unbiasedness: return "unbiasedness";
        case McKind::Normality: return "normality";
        case McKind::Level: return "level";
    }
    return "unknown";
}

McKind parse_mc_kind(std::string_view name) {
    if (name == "consistency") return McKind::Consistency;
    if (name == "unbiasedness") return McKind::Unbiasedness;
    if (name == "normality") return McKind::Normality;
    if (name == "level") return McKind::Level;
    throw Error(ErrorKind::InvalidConfig, "unknown Monte Carlo kind '" + std::string(name) + "'");
}

Contrast ContrastSpec::resolve(int m, int q) const {
    if (kind == Kind::Equality) {
        return equality_contrast(m, q);
    }
    return Contrast{C, D};
}

Design scenario_design(const Scenario& scenario, int r) {
    return potthoff_roy_design(scenario.design.groups, r, scenario.design.times, scenario.design.q);
}

void validate_config(const McConfig& cfg, McKind kind) {
    const Scenario& sc = cfg.scenario;
    if (cfg.sample_sizes.empty()) {
        throw Error(ErrorKind::InvalidConfig, "sample_sizes must not be empty");
    }
    if (!std::is_sorted(cfg.sample_sizes.begin(), cfg.sample_sizes.end(),
                        [](int a, int b) { return a <= b; })) {
        throw Error(ErrorKind::InvalidConfig, "sample_sizes must be strictly increasing");
    }
    if (cfg.replications < 2) {
        throw Error(ErrorKind::InvalidConfig, "replications must be at least 2");
    }
    if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) {
        throw Error(ErrorKind::InvalidConfig, "alpha must lie in (0, 1]");
    }
    validate_noise(sc.noise);
    const SpdMatrix sigma(sc.sigma);
    for (int r : cfg.sample_sizes) {
        const Design design = scenario_design(sc, r);
        validate(design);
        validate_params(ModelParams{sc.theta, sigma}, design);
        validate_contrast(sc.contrast.resolve(sc.design.groups, sc.design.q), design);
        if (design.n() - design.m() < design.p()) {
            throw Error(ErrorKind::InvalidConfig,
                        "r = " + std::to_string(r) + " gives n - m < p; Sigma-hat would be singular");
        }
    }
    if (cfg.alternative_theta) {
        if (cfg.alternative_theta->rows() != sc.theta.rows() ||
            cfg.alternative_theta->cols() != sc.theta.cols()) {
            throw Error(ErrorKind::InvalidConfig, "alternative_theta must have the shape of theta");
        }
        require_finite(*cfg.alternative_theta, "alternative_theta");
    }
    if (kind == McKind::Level) {
        const Contrast c = sc.contrast.resolve(sc.design.groups, sc.design.q);
        const Matrix gamma = c.C * sc.theta * c.D.transpose();
        const double scale = std::max(1.0, max_abs(sc.theta));
        if (max_abs(gamma) > 1e-12 * scale) {
            throw Error(ErrorKind::InvalidConfig, "level run requires C Theta D' = 0");
        }
    }
}

ReplicateRecord run_replicate(const McConfig& cfg, std::size_t size_index, int index) {
    return replicate(make_context(cfg, size_index), index);
}

McRun run(McKind kind, const McConfig& cfg, const McOptions& options) {
    validate_config(cfg, kind);
    McRun out;
    out.records.resize(cfg.sample_sizes.size());
    const unsigned threads = resolve_threads(options.threads);

    for (std::size_t k = 0; k < cfg.sample_sizes.size(); ++k) {
        const CellContext ctx = make_context(cfg, k);
        std::vector<ReplicateRecord>& slots = out.records[k];
        slots.resize(static_cast<std::size_t>(cfg.replications));
        std::atomic<int> next{0};
        auto worker = [&] {
            for (int i = next++; i < cfg.replications; i = next++) {
                slots[static_cast<std::size_t>(i)] = replicate(ctx, i);
            }
        };
        if (threads <= 1) {
            worker();
        } else {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < threads; ++w) {
                pool.emplace_back(worker);
            }
        }
    }
    out.report = summarize(kind, cfg, out.records);
    return out;
}

McReport summarize(McKind kind, const McConfig& cfg, const ReplicateTable& records) {
    McReport report;
    report.kind = kind;
    report.config = cfg;
    report.thresholds.ks_critical =
        stats::ks_critical_1pct(static_cast<std::size_t>(cfg.replications));
    for (std::size_t k = 0; k < records.size(); ++k) {
        report.cells.push_back(summarize_cell(cfg, k, records[k]));
    }
    return report;
}

McReport run_consistency(const McConfig& cfg, const McOptions& options) {
    return run(McKind::Consistency, cfg, options).report;
}

McReport run_unbiasedness(const McConfig& cfg, const McOptions& options) {
    return run(McKind::Unbiasedness, cfg, options).report;
}

McReport run_normality(const McConfig& cfg, const McOptions& options) {
    return run(McKind::Normality, cfg, options).report;
}

McReport run_level(const McConfig& cfg, const McOptions& options) {
    return run(McKind::Level, cfg, options).report;
}

}  // namespace gcm::mc
