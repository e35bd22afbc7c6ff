#pragma once

#include "gcm/matlib.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace gcm {

/// Design pair of the growth curve model Y = X Theta Z' + E.
struct Design {
    Matrix X;  ///< n x m, between-individual design
    Matrix Z;  ///< p x q, within-individual (time) design

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index m() const { return X.cols(); }
    Eigen::Index p() const { return Z.rows(); }
    Eigen::Index q() const { return Z.cols(); }
};

struct ModelParams {
    Matrix theta;       ///< m x q
    SpdMatrix sigma;    ///< p x p
};

/// gamma = C Theta D'.
struct Contrast {
    Matrix C;  ///< s x m
    Matrix D;  ///< t x q
};

enum class NoiseFamily { Gaussian, Uniform, StudentT };

std::string_view to_string(NoiseFamily family);
NoiseFamily parse_noise_family(std::string_view name);

/// Error distribution of one row of E before the covariance transform.
/// Every family is symmetric about zero with unit variance per coordinate;
/// the row covariance comes from ModelParams::sigma.
struct NoiseSpec {
    NoiseFamily family = NoiseFamily::Gaussian;
    double df = 0.0;  ///< student_t only, must exceed 4
};

struct Dataset {
    Matrix Y;  ///< n x p
    Design design;
};

/// Checks n > m, p > q and full column rank of X and Z.
/// Throws ShapeViolation or RankDeficient.
void validate(const Design& design);

/// Non-empty when cond(Z) exceeds 1e8.
std::optional<std::string> conditioning_warning(const Design& design);

void validate_contrast(const Contrast& contrast, const Design& design);
void validate_noise(const NoiseSpec& noise);
void validate_params(const ModelParams& params, const Design& design);

/// m groups of r subjects measured at common time points, polynomial
/// profile of q coefficients. Rows of X are grouped: the first r rows
/// belong to group 0.
Design potthoff_roy_design(int groups, int per_group, std::span<const double> times, int q);

/// C = [I_{m-1} | -1], D = [0 | I_{q-1}]: all m curves equal up to the
/// additive constant.
Contrast equality_contrast(int m, int q);

/// n x p error matrix; row l is drawn from substream (seed, l).
Matrix simulate_errors(Eigen::Index n, const SpdMatrix& sigma, const NoiseSpec& noise,
                       std::uint64_t seed);

/// Y = X Theta Z' + E with E from simulate_errors.
Dataset simulate(const Design& design, const ModelParams& params, const NoiseSpec& noise,
                 std::uint64_t seed);

}  // namespace gcm
