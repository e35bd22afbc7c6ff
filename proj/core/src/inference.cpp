#include "gcm/inference.hpp"

#include "gcm/error.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <string>

namespace gcm {

namespace {

SpdMatrix standardizer(const Matrix& factor, const char* which) {
    if (!SpdMatrix::is_spd(factor)) {
        throw Error(ErrorKind::NotSpd, std::string(which) + " standardizer is singular");
    }
    return SpdMatrix(factor);
}

Matrix left_factor(const Matrix& X, const Matrix& C) {
    const Matrix xtx_inv_ct = (X.transpose() * X).llt().solve(C.transpose());
    return symmetrize(C * xtx_inv_ct);
}

}  // namespace

Matrix right_factor(const SpdMatrix& sigma, const Matrix& Z, const Matrix& D) {
    const Matrix info = symmetrize(Z.transpose() * sigma.solve(Z));
    return symmetrize(D * info.llt().solve(D.transpose()));
}

AsymptoticLaw asym_cov(const AsymptoticSpec& spec) {
    const Matrix& C = spec.contrast.C;
    const Matrix& D = spec.contrast.D;
    if (C.cols() != spec.R.dim() || D.cols() != spec.Z.cols() || spec.Z.rows() != spec.sigma.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "asymptotic spec dimensions do not conform");
    }
    return AsymptoticLaw{symmetrize(C * spec.R.solve(C.transpose())),
                         right_factor(spec.sigma, spec.Z, D)};
}

AsymptoticLaw plugin_cov(const Dataset& data, const Contrast& contrast) {
    validate_contrast(contrast, data.design);
    const SigmaHat sh = sigma_hat(data);
    return AsymptoticLaw{left_factor(data.design.X, contrast.C),
                         right_factor(sh.value, data.design.Z, contrast.D)};
}

AsymptoticLaw known_cov(const Dataset& data, const SpdMatrix& sigma0, const Contrast& contrast) {
    validate(data.design);
    validate_contrast(contrast, data.design);
    if (sigma0.dim() != data.design.p()) {
        throw Error(ErrorKind::DimensionMismatch, "Sigma0 must be p x p");
    }
    return AsymptoticLaw{left_factor(data.design.X, contrast.C),
                         right_factor(sigma0, data.design.Z, contrast.D)};
}

Matrix standardize(const Matrix& gamma, const AsymptoticLaw& finite_law, Eigen::Index n) {
    const auto scale = static_cast<double>(n);
    const SpdMatrix left = standardizer(scale * finite_law.left, "left");
    const SpdMatrix right = standardizer(finite_law.right, "right");
    return inv_sqrt_spd(left) * (std::sqrt(scale) * gamma) * inv_sqrt_spd(right);
}

Matrix standardized_stat(const Dataset& data, const Contrast& contrast) {
    const GammaHat gamma = two_stage_gamma(data, contrast);
    return standardize(gamma.value, plugin_cov(data, contrast), data.design.n());
}

double chi_square_upper_tail(double x, int dof) {
    if (dof < 1) {
        throw Error(ErrorKind::InvalidConfig, "chi-square needs at least one degree of freedom");
    }
    if (!(x > 0.0)) {
        return 1.0;
    }
    return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

TestResult test_from_statistic(const Matrix& statistic, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw Error(ErrorKind::InvalidConfig, "alpha must lie in (0, 1]");
    }
    TestResult result;
    result.statistic = statistic;
    result.chi_sq = statistic.squaredNorm();
    result.dof = static_cast<int>(statistic.size());
    result.p_value = chi_square_upper_tail(result.chi_sq, result.dof);
    result.reject = result.p_value < alpha;
    return result;
}

TestResult test_gamma_zero(const Dataset& data, const Contrast& contrast, double alpha) {
    return test_from_statistic(standardized_stat(data, contrast), alpha);
}

}  // namespace gcm
