#pragma once

#include "gcm/estimators.hpp"
#include "gcm/matlib.hpp"
#include "gcm/model.hpp"

namespace gcm {

/// Inputs of the limit law. R is the limit of X'X / n.
struct AsymptoticSpec {
    SpdMatrix R;
    SpdMatrix sigma;
    Matrix Z;
    Contrast contrast;
};

/// Kronecker-factored covariance kron(left, right) of vec_t(gamma-hat - gamma)
/// (row-stacking orientation). Factors are symmetric positive semidefinite;
/// they are positive definite when C and D have full row rank.
struct AsymptoticLaw {
    Matrix left;   ///< s x s
    Matrix right;  ///< t x t

    Matrix covariance() const { return kron(left, right); }
};

struct TestResult {
    Matrix statistic;  ///< standardized s x t matrix T
    double chi_sq = 0.0;
    int dof = 0;
    double p_value = 1.0;
    bool reject = false;
};

/// left = C R^-1 C', right = D (Z' Sigma^-1 Z)^-1 D'.
AsymptoticLaw asym_cov(const AsymptoticSpec& spec);

/// Finite-sample plug-in: left = C (X'X)^-1 C', right = D (Z' Sigma-hat^-1 Z)^-1 D'.
AsymptoticLaw plugin_cov(const Dataset& data, const Contrast& contrast);
/// Same with a known covariance in place of Sigma-hat (exact covariance of gamma-hat-0).
AsymptoticLaw known_cov(const Dataset& data, const SpdMatrix& sigma0, const Contrast& contrast);

/// D (Z' S^-1 Z)^-1 D' for a given row covariance S.
Matrix right_factor(const SpdMatrix& sigma, const Matrix& Z, const Matrix& D);

/// T = (C n(X'X)^-1 C')^-1/2 sqrt(n) gamma-hat (D (Z' Sigma-hat^-1 Z)^-1 D')^-1/2,
/// with symmetric inverse square roots. Throws NotSpd when either
/// standardizer is singular.
Matrix standardized_stat(const Dataset& data, const Contrast& contrast);
/// Same standardization applied to a supplied estimate and plug-in law.
Matrix standardize(const Matrix& gamma, const AsymptoticLaw& finite_law, Eigen::Index n);

/// Upper tail of chi-square with dof degrees of freedom.
double chi_square_upper_tail(double x, int dof);

/// chi_sq = ||T||_F^2 against chi-square(s t); reject iff p_value < alpha.
TestResult test_gamma_zero(const Dataset& data, const Contrast& contrast, double alpha);
TestResult test_from_statistic(const Matrix& statistic, double alpha);

}  // namespace gcm
