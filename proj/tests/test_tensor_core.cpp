#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>

#include "test_util.hpp"
#include "ttrz/dense.hpp"
#include "ttrz/svd.hpp"

using namespace ttrz;

TEST_CASE("frobenius_norm: zero and constant tensors") {
    DenseTensor zero((Shape({3, 4})));
    CHECK(frobenius_norm(zero) == 0.0);

    DenseTensor ones(Shape({2, 2}), std::vector<double>(4, 1.0));
    CHECK(frobenius_norm(ones) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("frobenius_norm matches a scalar loop oracle") {
    DenseTensor t = ttest::random_dense({4, 5, 6}, 11);
    double sum = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 5; ++j)
            for (std::size_t k = 0; k < 6; ++k) {
                const double v = t.at({i, j, k});
                sum += v * v;
            }
    const double oracle = std::sqrt(sum);
    CHECK(std::abs(frobenius_norm(t) - oracle) <= 1e-14 * oracle);
}

TEST_CASE("reshape relabels modes bit-exactly") {
    DenseTensor t = ttest::random_dense({2, 6}, 3);
    DenseTensor r = reshape(t, Shape({3, 4}));
    CHECK(r.data() == t.data());
    CHECK(r.shape().order() == 2);
    CHECK(r.shape().dim(0) == 3);

    DenseTensor back = reshape(r, t.shape());
    CHECK(back.data() == t.data());

    DenseTensor flat = reshape(reshape(t, Shape({1, 12})), Shape({12}));
    CHECK(flat.data() == t.data());

    CHECK(frobenius_norm(r) == frobenius_norm(t));
}

TEST_CASE("reshape rejects changed element counts") {
    DenseTensor t = ttest::random_dense({2, 6}, 3);
    CHECK_THROWS_AS(reshape(t, Shape({5})), ShapeMismatch);
}

TEST_CASE("matricize produces the documented dims") {
    DenseTensor t = ttest::random_dense({2, 3, 4}, 5);

    Matrix m1 = matricize(t, 1);
    CHECK(m1.rows == 2);
    CHECK(m1.cols == 12);

    Matrix m2 = matricize(t, 2);
    CHECK(m2.rows == 6);
    CHECK(m2.cols == 4);

    CHECK_THROWS_AS(matricize(t, 0), SplitOutOfRange);
    CHECK_THROWS_AS(matricize(t, 3), SplitOutOfRange);
}

TEST_CASE("matricize / dematricize round trip") {
    DenseTensor t = ttest::random_dense({3, 4, 2, 5}, 7);
    for (std::size_t split = 1; split < 4; ++split) {
        DenseTensor back = dematricize(matricize(t, split), t.shape(), split);
        CHECK(back.data() == t.data());
    }
}

TEST_CASE("svd_truncated: identity matrix keeps unit spectrum") {
    Matrix eye(3, 3);
    for (std::size_t i = 0; i < 3; ++i) eye(i, i) = 1.0;
    TruncatedSvd svd = svd_truncated(eye, 3);
    REQUIRE(svd.singular_values.size() == 3);
    for (double s : svd.singular_values) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(svd.discarded_energy == 0.0);
}

namespace {

Matrix reconstruct(const TruncatedSvd& svd) {
    const std::size_t r = svd.singular_values.size();
    Matrix out(svd.u.rows, svd.v.cols);
    for (std::size_t i = 0; i < out.rows; ++i)
        for (std::size_t j = 0; j < out.cols; ++j) {
            double sum = 0.0;
            for (std::size_t k = 0; k < r; ++k)
                sum += svd.u(i, k) * svd.singular_values[k] * svd.v(k, j);
            out(i, j) = sum;
        }
    return out;
}

double matrix_rel_err(const Matrix& a, const Matrix& b) {
    return ttest::diff_norm(a.data, b.data) / ttest::vec_norm(b.data);
}

} // namespace

TEST_CASE("svd_truncated: exact on a rank-1 outer product") {
    std::mt19937_64 gen(17);
    Matrix m(5, 4);
    std::vector<double> u(5), v(4);
    for (double& x : u) x = standard_normal(gen);
    for (double& x : v) x = standard_normal(gen);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 4; ++j) m(i, j) = u[i] * v[j];

    TruncatedSvd svd = svd_truncated(m, 1);
    REQUIRE(svd.singular_values.size() == 1);
    CHECK(matrix_rel_err(reconstruct(svd), m) <= 1e-12);
}

TEST_CASE("svd_truncated: error equals the dropped tail of a full-SVD oracle") {
    DenseTensor t = ttest::random_dense({8, 6}, 23);
    Matrix m(8, 6, t.data());

    Eigen::MatrixXd a(8, 6);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 6; ++j) a(i, j) = m(i, j);
    Eigen::JacobiSVD<Eigen::MatrixXd> full(a);
    const auto& sigma = full.singularValues();
    const double expected = std::sqrt(sigma(3) * sigma(3) + sigma(4) * sigma(4) +
                                      sigma(5) * sigma(5));

    TruncatedSvd svd = svd_truncated(m, 3);
    REQUIRE(svd.singular_values.size() == 3);
    const double err = ttest::diff_norm(reconstruct(svd).data, m.data);
    CHECK(std::abs(err - expected) <= 1e-10 * expected);
    CHECK(std::abs(svd.discarded_energy - expected) <= 1e-10 * expected);
}

TEST_CASE("svd_truncated: loose rank cap reproduces the input") {
    DenseTensor t = ttest::random_dense({6, 9}, 29);
    Matrix m(6, 9, t.data());
    TruncatedSvd svd = svd_truncated(m, 50);
    CHECK(matrix_rel_err(reconstruct(svd), m) <= 1e-10);
}

TEST_CASE("svd_truncated beats random rank-r projections") {
    DenseTensor t = ttest::random_dense({6, 7}, 31);
    Matrix m(6, 7, t.data());
    TruncatedSvd svd = svd_truncated(m, 3);
    const double best = ttest::diff_norm(reconstruct(svd).data, m.data);

    Eigen::MatrixXd a(6, 7);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 7; ++j) a(i, j) = m(i, j);

    std::mt19937_64 gen(37);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::MatrixXd g(6, 3);
        for (Eigen::Index i = 0; i < g.size(); ++i) g(i / 3, i % 3) = standard_normal(gen);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(6, 3);
        const double err = (a - q * (q.transpose() * a)).norm();
        CHECK(best <= err + 1e-12);
    }
}

TEST_CASE("svd_truncated: deterministic sign convention") {
    DenseTensor t = ttest::random_dense({5, 5}, 41);
    Matrix m(5, 5, t.data());
    TruncatedSvd a = svd_truncated(m, 4);
    TruncatedSvd b = svd_truncated(m, 4);
    CHECK(a.u.data == b.u.data);
    CHECK(a.v.data == b.v.data);
    for (std::size_t j = 0; j < a.singular_values.size(); ++j) {
        for (std::size_t i = 0; i < a.u.rows; ++i) {
            if (a.u(i, j) != 0.0) {
                CHECK(a.u(i, j) > 0.0);
                break;
            }
        }
    }
}
