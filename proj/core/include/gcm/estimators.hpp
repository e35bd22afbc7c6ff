#pragma once

#include "gcm/matlib.hpp"
#include "gcm/model.hpp"

namespace gcm {

/// The invariant quadratic estimator Y'WY with W = (I - P_X) / (n - m).
struct SigmaHat {
    SpdMatrix value;
    double divisor;  ///< n - rank(X)
};

struct GammaHat {
    Matrix value;  ///< s x t
    Contrast contrast;
};

/// H = Sigma^-1 (P_Z Sigma^-1 P_Z)^+. Satisfies H Z (Z'Z)^-1 = Sigma^-1 Z (Z' Sigma^-1 Z)^-1.
struct HMatrix {
    Matrix value;  ///< p x p
};

/// Throws TooFewSamples when n - m < p and NotSpd when the residual
/// cross-product is singular (for example noise-free data).
SigmaHat sigma_hat(const Dataset& data);

/// Generalized least squares with a known covariance:
/// (X'X)^-1 X'Y Sigma0^-1 Z (Z' Sigma0^-1 Z)^-1, evaluated by Cholesky solves.
Matrix theta_hat_known(const Dataset& data, const SpdMatrix& sigma0);
GammaHat gamma_hat_known(const Dataset& data, const SpdMatrix& sigma0, const Contrast& contrast);

HMatrix h_matrix(const SpdMatrix& sigma, const Matrix& Z);
inline HMatrix h_matrix(const SigmaHat& sigma_hat, const Matrix& Z) {
    return h_matrix(sigma_hat.value, Z);
}

/// Two-stage estimate of Theta through the H-matrix form
/// (X'X)^-1 X' Y H(Y) Z (Z'Z)^-1. Kept as the verification route.
Matrix two_stage_theta(const Dataset& data);

/// Two-stage estimate of C Theta D' through Cholesky solves against
/// Sigma-hat. This is the production route.
GammaHat two_stage_gamma(const Dataset& data, const Contrast& contrast);

}  // namespace gcm
