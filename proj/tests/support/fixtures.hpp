#pragma once

// Test-only generators and independent oracles.

#include "gcm/matlib.hpp"
#include "gcm/model.hpp"

#include <random>

namespace gcm::testing {

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> dist;
    Matrix a(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = dist(rng);
    return a;
}

inline Matrix random_spd(Eigen::Index p, std::mt19937_64& rng) {
    const Matrix a = random_matrix(p, p, rng);
    return a * a.transpose() + 0.5 * Matrix::Identity(p, p);
}

inline Matrix random_rank(Eigen::Index rows, Eigen::Index cols, Eigen::Index rank,
                          std::mt19937_64& rng) {
    if (rank == 0) return Matrix::Zero(rows, cols);
    return random_matrix(rows, rank, rng) * random_matrix(rank, cols, rng);
}

/// Projector from an orthonormal basis (Householder QR), independent of the
/// normal-equation route.
inline Matrix projector_via_qr(const Matrix& a) {
    Eigen::HouseholderQR<Matrix> qr(a);
    const Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
    return q * q.transpose();
}

inline Matrix pinv_via_cod(const Matrix& a) {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
    cod.setThreshold(1e-12);
    return cod.pseudoInverse();
}

/// Straight transcription of the known-covariance GLS formula with explicit
/// inverses.
inline Matrix gls_explicit(const Matrix& X, const Matrix& Y, const Matrix& Z, const Matrix& S) {
    const Matrix si = S.inverse();
    return (X.transpose() * X).inverse() * X.transpose() * Y * si * Z *
           (Z.transpose() * si * Z).inverse();
}

inline Dataset random_dataset(Eigen::Index n, Eigen::Index m, Eigen::Index p, Eigen::Index q,
                              std::mt19937_64& rng) {
    Dataset d;
    d.design.X = random_matrix(n, m, rng);
    d.design.Z = random_matrix(p, q, rng);
    d.Y = random_matrix(n, p, rng);
    return d;
}

}  // namespace gcm::testing
