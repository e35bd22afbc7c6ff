#include "gcm/error.hpp"
#include "gcm/matlib.hpp"
#include "support/fixtures.hpp"

#include <doctest.h>

#include <algorithm>

using namespace gcm;
using gcm::testing::random_matrix;
using gcm::testing::random_rank;
using gcm::testing::random_spd;

namespace {

void check_penrose(const Matrix& a, const Matrix& pinv, double tol) {
    const double scale = std::max(1.0, max_abs(a)) * std::max(1.0, max_abs(pinv));
    CHECK(max_abs(a * pinv * a - a) <= tol * scale * std::max(1.0, max_abs(a)));
    CHECK(max_abs(pinv * a * pinv - pinv) <= tol * scale * std::max(1.0, max_abs(pinv)));
    CHECK(max_abs((a * pinv).transpose() - a * pinv) <= tol * scale);
    CHECK(max_abs((pinv * a).transpose() - pinv * a) <= tol * scale);
}

}  // namespace

TEST_CASE("orth_projector on identity and constant column") {
    CHECK(max_abs(orth_projector(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)) < 1e-15);

    const Matrix ones = Matrix::Ones(5, 1);
    CHECK(max_abs(orth_projector(ones) - Matrix::Constant(5, 5, 1.0 / 5.0)) < 1e-15);
}

TEST_CASE("orth_projector matches an orthonormal-basis oracle") {
    std::mt19937_64 rng(601);
    const Matrix a = random_matrix(6, 2, rng);
    const Matrix p = orth_projector(a);
    CHECK(max_abs(p * p - p) < 1e-12);
    CHECK(max_abs(p - p.transpose()) < 1e-12);
    CHECK(max_abs(p * a - a) < 1e-10 * max_abs(a));
    CHECK(max_abs(p - gcm::testing::projector_via_qr(a)) < 1e-12);
}

TEST_CASE("projector laws on random full-rank inputs") {
    std::mt19937_64 rng(602);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = 2 + trial % 7;
        const Eigen::Index k = 1 + trial % n;
        const Matrix a = random_matrix(n, k, rng);
        const Matrix p = orth_projector(a);
        CHECK(max_abs(p - p.transpose()) < 1e-10);
        CHECK(max_abs(p * p - p) < 1e-10);
        CHECK(max_abs(p * a - a) < 1e-10 * std::max(1.0, max_abs(a)));
        CHECK(std::abs(p.trace() - static_cast<double>(k)) < 1e-10);
    }
}

TEST_CASE("orth_projector rejects rank-deficient input") {
    Matrix a(4, 2);
    a << 1, 2, 2, 4, 3, 6, 4, 8;
    CHECK_THROWS_AS(orth_projector(a), Error);
    try {
        orth_projector(a);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::RankDeficient);
    }
    CHECK_THROWS_AS(orth_projector(Matrix::Ones(2, 3)), Error);  // k > n
}

TEST_CASE("non-finite entries are refused") {
    Matrix a = Matrix::Identity(3, 3);
    a(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(orth_projector(a), Error);
    CHECK_THROWS_AS(moore_penrose(a), Error);
    CHECK_FALSE(SpdMatrix::is_spd(a));
}

TEST_CASE("moore_penrose basics") {
    CHECK(max_abs(moore_penrose(Matrix::Zero(3, 2))) == 0.0);
    CHECK(moore_penrose(Matrix::Zero(3, 2)).rows() == 2);
    CHECK(moore_penrose(Matrix::Zero(3, 2)).cols() == 3);

    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 2.0;
    Matrix expected = Matrix::Zero(2, 2);
    expected(0, 0) = 0.5;
    CHECK(max_abs(moore_penrose(d) - expected) < 1e-15);
}

TEST_CASE("moore_penrose on a rank-2 4x3 matrix agrees with an independent decomposition") {
    std::mt19937_64 rng(603);
    const Matrix a = random_rank(4, 3, 2, rng);
    const Matrix pinv = moore_penrose(a);
    check_penrose(a, pinv, 1e-9);
    CHECK(max_abs(pinv - gcm::testing::pinv_via_cod(a)) < 1e-9 * std::max(1.0, max_abs(pinv)));
}

TEST_CASE("Penrose conditions across all ranks") {
    std::mt19937_64 rng(604);
    for (Eigen::Index rows = 1; rows <= 5; ++rows) {
        for (Eigen::Index cols = 1; cols <= 5; ++cols) {
            for (Eigen::Index r = 0; r <= std::min(rows, cols); ++r) {
                const Matrix a = random_rank(rows, cols, r, rng);
                check_penrose(a, moore_penrose(a), 1e-9);
            }
        }
    }
}

TEST_CASE("kron block structure") {
    std::mt19937_64 rng(605);
    const Matrix b = random_matrix(2, 3, rng);
    const Matrix k = kron(Matrix::Identity(2, 2), b);
    CHECK(max_abs(k.block(0, 0, 2, 3) - b) == 0.0);
    CHECK(max_abs(k.block(2, 3, 2, 3) - b) == 0.0);
    CHECK(max_abs(k.block(0, 3, 2, 3)) == 0.0);
    CHECK(max_abs(k.block(2, 0, 2, 3)) == 0.0);

    Matrix two(1, 1);
    two(0, 0) = 2.0;
    CHECK(max_abs(kron(two, b) - 2.0 * b) == 0.0);
}

TEST_CASE("kron and vec_t: vec_t(A M B') = (A kron B) vec_t(M)") {
    std::mt19937_64 rng(606);
    {
        const Matrix a = random_matrix(2, 2, rng);
        const Matrix b = random_matrix(3, 3, rng);
        const Matrix m = random_matrix(2, 3, rng);
        CHECK(max_abs(vec_t(a * m * b.transpose()) - kron(a, b) * vec_t(m)) < 1e-12);
    }
    for (int trial = 0; trial < 30; ++trial) {
        const Eigen::Index ar = 1 + trial % 4, ac = 1 + (trial / 4) % 3;
        const Eigen::Index br = 1 + (trial / 2) % 3, bc = 1 + trial % 3;
        const Matrix a = random_matrix(ar, ac, rng);
        const Matrix b = random_matrix(br, bc, rng);
        const Matrix m = random_matrix(ac, bc, rng);
        CHECK(max_abs(vec_t(a * m * b.transpose()) - kron(a, b) * vec_t(m)) < 1e-11);
    }
}

TEST_CASE("vec_t stacks rows") {
    Matrix a(2, 2);
    a << 1, 2, 3, 4;
    const Vector v = vec_t(a);
    CHECK(v(0) == 1.0);
    CHECK(v(1) == 2.0);
    CHECK(v(2) == 3.0);
    CHECK(v(3) == 4.0);

    Matrix row(1, 4);
    row << 5, 6, 7, 8;
    CHECK(vec_t(row) == Vector(row.transpose()));

    std::mt19937_64 rng(607);
    const Matrix m = random_matrix(3, 4, rng);
    CHECK(unvec_t(vec_t(m), 3, 4) == m);
    CHECK_THROWS_AS(unvec_t(vec_t(m), 5, 4), Error);
}

TEST_CASE("inv_sqrt_spd") {
    CHECK(max_abs(inv_sqrt_spd(SpdMatrix(Matrix::Identity(4, 4))) - Matrix::Identity(4, 4)) < 1e-15);

    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 4.0;
    d(1, 1) = 9.0;
    Matrix expected = Matrix::Zero(2, 2);
    expected(0, 0) = 0.5;
    expected(1, 1) = 1.0 / 3.0;
    CHECK(max_abs(inv_sqrt_spd(SpdMatrix(d)) - expected) < 1e-15);

    std::mt19937_64 rng(608);
    const Matrix a = random_spd(3, rng);
    const Matrix b = inv_sqrt_spd(SpdMatrix(a));
    CHECK(max_abs(b * a * b - Matrix::Identity(3, 3)) < 1e-9);
    CHECK(max_abs(b - b.transpose()) == 0.0);
    CHECK(max_abs(b * a - a * b) < 1e-9);
    CHECK(SpdMatrix::is_spd(b));
}

TEST_CASE("SpdMatrix validation") {
    Matrix asym = Matrix::Identity(2, 2);
    asym(0, 1) = 0.1;
    CHECK_FALSE(SpdMatrix::is_spd(asym));

    Matrix indefinite(2, 2);
    indefinite << 1, 2, 2, 1;
    CHECK_FALSE(SpdMatrix::is_spd(indefinite));
    try {
        SpdMatrix bad(indefinite);
        FAIL("expected NotSpd");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotSpd);
    }

    Matrix nearly = Matrix::Identity(2, 2);
    nearly(1, 1) = 1e-12;  // below the 1e-10 relative floor
    CHECK_FALSE(SpdMatrix::is_spd(nearly));
    CHECK_FALSE(SpdMatrix::is_spd(Matrix::Zero(3, 3)));

    std::mt19937_64 rng(609);
    const Matrix s = random_spd(4, rng);
    const SpdMatrix spd(s);
    const Matrix l = spd.cholesky_lower();
    CHECK(max_abs(l * l.transpose() - s) < 1e-12 * max_abs(s));
    CHECK(max_abs(spd.inverse() * s - Matrix::Identity(4, 4)) < 1e-10);
}
