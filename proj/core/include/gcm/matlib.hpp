#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace gcm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative threshold on singular values / eigenvalues for rank and SPD checks.
inline constexpr double kRankTolerance = 1e-10;
// Relative truncation for the Moore-Penrose inverse.
inline constexpr double kPinvTolerance = 1e-12;

/// A symmetric positive definite matrix, validated at construction.
///
/// Symmetry is checked to a relative tolerance of 1e-10 on the largest
/// absolute entry, positive definiteness by requiring the smallest
/// eigenvalue to exceed 1e-10 times the largest. The stored value is the
/// exact symmetric part of the input.
class SpdMatrix {
public:
    /// Throws Error{NotSpd} when the checks fail.
    explicit SpdMatrix(const Matrix& value);

    static bool is_spd(const Matrix& value) noexcept;

    const Matrix& matrix() const noexcept { return value_; }
    Eigen::Index dim() const noexcept { return value_.rows(); }

    /// Solve A X = B by Cholesky factorization.
    Matrix solve(const Matrix& rhs) const;
    Matrix inverse() const;
    /// Lower-triangular Cholesky factor L with A = L L'.
    Matrix cholesky_lower() const;

private:
    Matrix value_;
};

void require_finite(const Matrix& a, std::string_view what);

double max_abs(const Matrix& a);
Matrix symmetrize(const Matrix& a);

bool has_full_column_rank(const Matrix& a, double rel_tol = kRankTolerance);
/// Ratio of largest to smallest singular value (infinity when rank deficient).
double condition_number(const Matrix& a);

/// P_A = A (A'A)^- A', the orthogonal projector onto the column space of A.
/// Throws RankDeficient unless A has full column rank.
Matrix orth_projector(const Matrix& a);

/// SVD-based pseudo-inverse; singular values below 1e-12 of the largest are
/// treated as zero.
Matrix moore_penrose(const Matrix& a);

/// Block (i, j) of the result is a(i, j) * b.
Matrix kron(const Matrix& a, const Matrix& b);

/// Row-stacking vectorization vec(A'): row 0 first.
Vector vec_t(const Matrix& a);
/// Inverse of vec_t.
Matrix unvec_t(const Vector& v, Eigen::Index rows, Eigen::Index cols);

/// Symmetric spectral root B with B A B = I.
Matrix inv_sqrt_spd(const SpdMatrix& a);

}  // namespace gcm
