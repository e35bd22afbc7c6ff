#include "gcm/estimators.hpp"

#include "gcm/error.hpp"

#include <string>

namespace gcm {

namespace {

void require_conforming(const Dataset& data) {
    validate(data.design);
    require_finite(data.Y, "Y");
    if (data.Y.rows() != data.design.n() || data.Y.cols() != data.design.p()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "Y must be n x p = " + std::to_string(data.design.n()) + "x" +
                        std::to_string(data.design.p()));
    }
}

// (X'X)^-1 X' Y
Matrix regress_rows(const Dataset& data) {
    const Matrix& X = data.design.X;
    return (X.transpose() * X).llt().solve(X.transpose() * data.Y);
}

}  // namespace

SigmaHat sigma_hat(const Dataset& data) {
    require_conforming(data);
    const Eigen::Index n = data.design.n();
    const Eigen::Index m = data.design.m();
    const Eigen::Index p = data.design.p();
    if (n - m < p) {
        throw Error(ErrorKind::TooFewSamples,
                    "n - m = " + std::to_string(n - m) + " is smaller than p = " +
                        std::to_string(p) + "; Sigma-hat would be singular");
    }
    const auto divisor = static_cast<double>(n - m);
    const Matrix residual = data.Y - data.design.X * regress_rows(data);
    const Matrix cross = symmetrize(residual.transpose() * residual) / divisor;
    if (!SpdMatrix::is_spd(cross)) {
        throw Error(ErrorKind::NotSpd, "Sigma-hat is not positive definite (degenerate residuals)");
    }
    return SigmaHat{SpdMatrix(cross), divisor};
}

Matrix theta_hat_known(const Dataset& data, const SpdMatrix& sigma0) {
    require_conforming(data);
    const Matrix& Z = data.design.Z;
    if (sigma0.dim() != data.design.p()) {
        throw Error(ErrorKind::DimensionMismatch, "Sigma0 must be p x p");
    }
    const Matrix sigma_inv_z = sigma0.solve(Z);
    const Matrix info = symmetrize(Z.transpose() * sigma_inv_z);
    const Matrix weighted = regress_rows(data) * sigma_inv_z;  // m x q
    return info.llt().solve(weighted.transpose()).transpose();
}

GammaHat gamma_hat_known(const Dataset& data, const SpdMatrix& sigma0, const Contrast& contrast) {
    validate_contrast(contrast, data.design);
    return GammaHat{contrast.C * theta_hat_known(data, sigma0) * contrast.D.transpose(), contrast};
}

HMatrix h_matrix(const SpdMatrix& sigma, const Matrix& Z) {
    if (Z.rows() != sigma.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "Z row count must match Sigma");
    }
    const Matrix proj = orth_projector(Z);
    const Matrix sigma_inv = sigma.inverse();
    return HMatrix{sigma_inv * moore_penrose(proj * sigma_inv * proj)};
}

Matrix two_stage_theta(const Dataset& data) {
    const SigmaHat sh = sigma_hat(data);
    const Matrix& Z = data.design.Z;
    const Matrix k = (Z.transpose() * Z).llt().solve(Z.transpose()).transpose();
    return regress_rows(data) * h_matrix(sh, Z).value * k;
}

GammaHat two_stage_gamma(const Dataset& data, const Contrast& contrast) {
    validate_contrast(contrast, data.design);
    const SigmaHat sh = sigma_hat(data);
    return GammaHat{contrast.C * theta_hat_known(data, sh.value) * contrast.D.transpose(),
                    contrast};
}

}  // namespace gcm
