#include "ttrz/svd.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "ttrz/errors.hpp"

namespace ttrz {

namespace {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Singular values below this relative threshold carry no information at
// the precision the library guarantees and are treated as rank deficiency.
constexpr double kRankTol = 1e-14;

} // namespace

TruncatedSvd svd_truncated(const Matrix& m, std::size_t max_rank) {
    if (max_rank < 1) throw ConfigError("svd_truncated: max_rank must be >= 1");
    if (m.rows == 0 || m.cols == 0) throw ShapeMismatch("svd_truncated: empty matrix");

    Eigen::Map<const RowMajorMatrix> a(m.data.data(), static_cast<Eigen::Index>(m.rows),
                                       static_cast<Eigen::Index>(m.cols));
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        throw NumericalFailure("SVD backend did not converge");

    const auto& sigma = svd.singularValues();
    const std::size_t full = static_cast<std::size_t>(sigma.size());

    std::size_t numerical_rank = 0;
    const double tol = sigma.size() > 0 ? kRankTol * sigma(0) : 0.0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        if (sigma(i) > tol) ++numerical_rank;
    numerical_rank = std::max<std::size_t>(numerical_rank, 1);

    const std::size_t r = std::min(max_rank, numerical_rank);

    Eigen::MatrixXd u = svd.matrixU().leftCols(static_cast<Eigen::Index>(r));
    Eigen::MatrixXd v = svd.matrixV().leftCols(static_cast<Eigen::Index>(r));

    // Sign convention: first nonzero entry of each left singular vector is
    // non-negative, so repeated decompositions of the same data serialize
    // identically.
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            if (u(i, j) != 0.0) {
                if (u(i, j) < 0.0) {
                    u.col(j) = -u.col(j);
                    v.col(j) = -v.col(j);
                }
                break;
            }
        }
    }

    TruncatedSvd out;
    out.singular_values.assign(sigma.data(), sigma.data() + r);

    out.u = Matrix(m.rows, r);
    Eigen::Map<RowMajorMatrix>(out.u.data.data(), u.rows(), u.cols()) = u;

    out.v = Matrix(r, m.cols);
    Eigen::Map<RowMajorMatrix>(out.v.data.data(), v.cols(), v.rows()) = v.transpose();

    double dropped = 0.0;
    for (std::size_t i = r; i < full; ++i) dropped += sigma(static_cast<Eigen::Index>(i)) *
                                                      sigma(static_cast<Eigen::Index>(i));
    out.discarded_energy = std::sqrt(dropped);
    return out;
}

} // namespace ttrz
