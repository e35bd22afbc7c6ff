#include "gcm/model.hpp"

#include "gcm/error.hpp"
#include "gcm/random.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace gcm {

namespace {

constexpr double kConditioningLimit = 1e8;

std::string shape(const Matrix& a) {
    return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

}  // namespace

std::string_view to_string(NoiseFamily family) {
    switch (family) {
        case NoiseFamily::Gaussian: return "gaussian";
        case NoiseFamily::Uniform: return "uniform";
        case NoiseFamily::StudentT: return "student_t";
    }
    return "unknown";
}

NoiseFamily parse_noise_family(std::string_view name) {
    if (name == "gaussian") return NoiseFamily::Gaussian;
    if (name == "uniform") return NoiseFamily::Uniform;
    if (name == "student_t") return NoiseFamily::StudentT;
    throw Error(ErrorKind::InvalidNoise, "unknown noise family '" + std::string(name) + "'");
}

void validate(const Design& design) {
    require_finite(design.X, "X");
    require_finite(design.Z, "Z");
    if (design.n() <= design.m()) {
        throw Error(ErrorKind::ShapeViolation,
                    "X must have more rows than columns (n > m), got " + shape(design.X));
    }
    if (design.p() <= design.q()) {
        throw Error(ErrorKind::ShapeViolation,
                    "Z must have more rows than columns (p > q), got " + shape(design.Z));
    }
    if (!has_full_column_rank(design.X)) {
        throw Error(ErrorKind::RankDeficient, "X does not have full column rank");
    }
    if (!has_full_column_rank(design.Z)) {
        throw Error(ErrorKind::RankDeficient, "Z does not have full column rank");
    }
}

std::optional<std::string> conditioning_warning(const Design& design) {
    const double cond = condition_number(design.Z);
    if (cond > kConditioningLimit) {
        return "Z is ill-conditioned (condition number " + std::to_string(cond) + ")";
    }
    return std::nullopt;
}

void validate_contrast(const Contrast& contrast, const Design& design) {
    require_finite(contrast.C, "C");
    require_finite(contrast.D, "D");
    if (contrast.C.rows() < 1 || contrast.C.cols() != design.m()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "C must be s x m with m = " + std::to_string(design.m()) + ", got " +
                        shape(contrast.C));
    }
    if (contrast.D.rows() < 1 || contrast.D.cols() != design.q()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "D must be t x q with q = " + std::to_string(design.q()) + ", got " +
                        shape(contrast.D));
    }
}

void validate_noise(const NoiseSpec& noise) {
    if (noise.family == NoiseFamily::StudentT && !(noise.df > 4.0)) {
        throw Error(ErrorKind::InvalidNoise, "student_t noise requires df > 4");
    }
}

void validate_params(const ModelParams& params, const Design& design) {
    require_finite(params.theta, "Theta");
    if (params.theta.rows() != design.m() || params.theta.cols() != design.q()) {
        throw Error(ErrorKind::DimensionMismatch, "Theta must be m x q, got " + shape(params.theta));
    }
    if (params.sigma.dim() != design.p()) {
        throw Error(ErrorKind::DimensionMismatch, "Sigma must be p x p, got " +
                                                      shape(params.sigma.matrix()));
    }
}

Design potthoff_roy_design(int groups, int per_group, std::span<const double> times, int q) {
    const auto p = static_cast<Eigen::Index>(times.size());
    if (groups < 1 || per_group < 1) {
        throw Error(ErrorKind::ShapeViolation, "potthoff-roy design needs m >= 1 and r >= 1");
    }
    if (q < 1 || q > p) {
        throw Error(ErrorKind::ShapeViolation, "potthoff-roy design needs 1 <= q <= p");
    }
    std::vector<double> sorted(times.begin(), times.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw Error(ErrorKind::DegenerateTimes, "time points must be distinct");
    }
    for (double t : times) {
        if (!std::isfinite(t)) {
            throw Error(ErrorKind::NonFinite, "time points must be finite");
        }
    }

    Design design;
    const Eigen::Index n = static_cast<Eigen::Index>(groups) * per_group;
    design.X = Matrix::Zero(n, groups);
    for (int g = 0; g < groups; ++g) {
        design.X.block(static_cast<Eigen::Index>(g) * per_group, g, per_group, 1).setOnes();
    }
    design.Z.resize(p, q);
    for (Eigen::Index j = 0; j < p; ++j) {
        double power = 1.0;
        for (Eigen::Index k = 0; k < q; ++k) {
            design.Z(j, k) = power;
            power *= times[static_cast<std::size_t>(j)];
        }
    }
    return design;
}

Contrast equality_contrast(int m, int q) {
    if (m < 2 || q < 2) {
        throw Error(ErrorKind::ShapeViolation, "equality contrast needs m >= 2 and q >= 2");
    }
    Contrast c;
    c.C = Matrix::Zero(m - 1, m);
    c.C.leftCols(m - 1).setIdentity();
    c.C.col(m - 1).setConstant(-1.0);
    c.D = Matrix::Zero(q - 1, q);
    c.D.rightCols(q - 1).setIdentity();
    return c;
}

Matrix simulate_errors(Eigen::Index n, const SpdMatrix& sigma, const NoiseSpec& noise,
                       std::uint64_t seed) {
    validate_noise(noise);
    const Eigen::Index p = sigma.dim();
    const Matrix lower = sigma.cholesky_lower();
    Matrix standard(n, p);

    for (Eigen::Index l = 0; l < n; ++l) {
        Engine engine = make_engine(seed, {static_cast<std::uint64_t>(l)});
        switch (noise.family) {
            case NoiseFamily::Gaussian: {
                std::normal_distribution<double> dist(0.0, 1.0);
                for (Eigen::Index j = 0; j < p; ++j) standard(l, j) = dist(engine);
                break;
            }
            case NoiseFamily::Uniform: {
                const double half_width = std::sqrt(3.0);
                std::uniform_real_distribution<double> dist(-half_width, half_width);
                for (Eigen::Index j = 0; j < p; ++j) standard(l, j) = dist(engine);
                break;
            }
            case NoiseFamily::StudentT: {
                std::student_t_distribution<double> dist(noise.df);
                const double scale = std::sqrt((noise.df - 2.0) / noise.df);
                for (Eigen::Index j = 0; j < p; ++j) standard(l, j) = scale * dist(engine);
                break;
            }
        }
    }
    return standard * lower.transpose();
}

Dataset simulate(const Design& design, const ModelParams& params, const NoiseSpec& noise,
                 std::uint64_t seed) {
    validate_params(params, design);
    Dataset data;
    data.design = design;
    data.Y = design.X * params.theta * design.Z.transpose() +
             simulate_errors(design.n(), params.sigma, noise, seed);
    return data;
}

}  // namespace gcm
