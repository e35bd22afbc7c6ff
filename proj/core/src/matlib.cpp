#include "gcm/matlib.hpp"

#include "gcm/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace gcm {

namespace {

bool symmetric_enough(const Matrix& a) {
    const double scale = max_abs(a);
    return max_abs(a - a.transpose()) <= kRankTolerance * scale;
}

}  // namespace

SpdMatrix::SpdMatrix(const Matrix& value) {
    if (!is_spd(value)) {
        throw Error(ErrorKind::NotSpd, "matrix is not symmetric positive definite");
    }
    value_ = symmetrize(value);
}

bool SpdMatrix::is_spd(const Matrix& value) noexcept {
    if (value.rows() == 0 || value.rows() != value.cols() || !value.allFinite()) {
        return false;
    }
    if (!symmetric_enough(value)) {
        return false;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(value), Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
        return false;
    }
    const double largest = eig.eigenvalues().maxCoeff();
    const double smallest = eig.eigenvalues().minCoeff();
    return largest > 0.0 && smallest > kRankTolerance * largest;
}

Matrix SpdMatrix::solve(const Matrix& rhs) const {
    if (rhs.rows() != value_.rows()) {
        throw Error(ErrorKind::DimensionMismatch, "SPD solve: right-hand side has wrong row count");
    }
    return value_.llt().solve(rhs);
}

Matrix SpdMatrix::inverse() const {
    return solve(Matrix::Identity(dim(), dim()));
}

Matrix SpdMatrix::cholesky_lower() const {
    return value_.llt().matrixL();
}

void require_finite(const Matrix& a, std::string_view what) {
    if (!a.allFinite()) {
        throw Error(ErrorKind::NonFinite, std::string(what) + " contains NaN or Inf");
    }
}

double max_abs(const Matrix& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

Matrix symmetrize(const Matrix& a) {
    return 0.5 * (a + a.transpose());
}

bool has_full_column_rank(const Matrix& a, double rel_tol) {
    if (a.cols() == 0 || a.cols() > a.rows() || !a.allFinite()) {
        return false;
    }
    Eigen::JacobiSVD<Matrix> svd(a);
    const auto& s = svd.singularValues();
    return s(0) > 0.0 && s(s.size() - 1) > rel_tol * s(0);
}

double condition_number(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(s.size() - 1) <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return s(0) / s(s.size() - 1);
}

Matrix orth_projector(const Matrix& a) {
    require_finite(a, "projector input");
    if (!has_full_column_rank(a)) {
        throw Error(ErrorKind::RankDeficient, "projector input does not have full column rank");
    }
    const Matrix gram = a.transpose() * a;
    return symmetrize(a * gram.llt().solve(a.transpose()));
}

Matrix moore_penrose(const Matrix& a) {
    require_finite(a, "pseudo-inverse input");
    if (a.size() == 0) {
        return Matrix::Zero(a.cols(), a.rows());
    }
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    const double cutoff = kPinvTolerance * s(0);
    Vector inv_s = Vector::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > cutoff && s(i) > 0.0) {
            inv_s(i) = 1.0 / s(i);
        }
    }
    return svd.matrixV() * inv_s.asDiagonal() * svd.matrixU().transpose();
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Vector vec_t(const Matrix& a) {
    Vector v(a.size());
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            v(k++) = a(i, j);
        }
    }
    return v;
}

Matrix unvec_t(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
    if (v.size() != rows * cols) {
        throw Error(ErrorKind::DimensionMismatch, "unvec_t: length does not match shape");
    }
    Matrix a(rows, cols);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            a(i, j) = v(k++);
        }
    }
    return a;
}

Matrix inv_sqrt_spd(const SpdMatrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(a.matrix());
    const Vector scale = eig.eigenvalues().cwiseSqrt().cwiseInverse();
    const Matrix& v = eig.eigenvectors();
    return symmetrize(v * scale.asDiagonal() * v.transpose());
}

}  // namespace gcm
