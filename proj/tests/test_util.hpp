#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <random>
#include <vector>

#include "ttrz/dense.hpp"
#include "ttrz/rng.hpp"
#include "ttrz/tt_matrix.hpp"
#include "ttrz/tt_vector.hpp"

namespace ttest {

inline ttrz::DenseTensor random_dense(const std::vector<std::size_t>& dims, std::uint64_t seed) {
    ttrz::DenseTensor t((ttrz::Shape(dims)));
    std::mt19937_64 gen(seed);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = ttrz::standard_normal(gen);
    return t;
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double vec_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double diff_norm(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

/// Relative Frobenius distance ||a - b|| / ||b||.
inline double rel_err(const std::vector<double>& a, const std::vector<double>& b) {
    return diff_norm(a, b) / vec_norm(b);
}

/// The analytic rank-{1,2,2,1} chain for the tensor t[i,j,k] = i + j + k:
/// slices [i 1], [[1 0],[i 1]], [1 i]^T.
inline ttrz::TTVector index_sum_cores(std::size_t mode_size) {
    ttrz::TTCore3 c0(mode_size, 1, 2);
    ttrz::TTCore3 c1(mode_size, 2, 2);
    ttrz::TTCore3 c2(mode_size, 2, 1);
    for (std::size_t i = 0; i < mode_size; ++i) {
        c0.at(i, 0, 0) = static_cast<double>(i);
        c0.at(i, 0, 1) = 1.0;
        c1.at(i, 0, 0) = 1.0;
        c1.at(i, 0, 1) = 0.0;
        c1.at(i, 1, 0) = static_cast<double>(i);
        c1.at(i, 1, 1) = 1.0;
        c2.at(i, 0, 0) = 1.0;
        c2.at(i, 1, 0) = static_cast<double>(i);
    }
    return ttrz::TTVector({c0, c1, c2});
}

/// Independent oracle: sequential truncated SVD of a dense row-major
/// tensor down to the given bond ranks, returning the reconstructed dense
/// tensor. Index bookkeeping is spelled out with plain loops.
inline std::vector<double> seq_svd_truncate_oracle(const std::vector<double>& data,
                                                   const std::vector<std::size_t>& dims,
                                                   const std::vector<std::size_t>& bond_caps) {
    const std::size_t order = dims.size();
    std::size_t total = 1;
    for (std::size_t d : dims) total *= d;

    if (order == 1) return data;

    std::vector<Eigen::MatrixXd> left_factors; // (r_k * I_k) x r_{k+1}
    std::vector<double> carry = data;          // (r_k) x (I_k ... I_{K-1}) row-major
    std::size_t left_rank = 1;
    std::size_t rest = total;

    for (std::size_t k = 0; k + 1 < order; ++k) {
        rest /= dims[k];
        const std::size_t rows = left_rank * dims[k];
        Eigen::MatrixXd a(rows, rest);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < rest; ++c) a(r, c) = carry[r * rest + c];

        Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const std::size_t keep =
            std::min<std::size_t>(bond_caps[k + 1], static_cast<std::size_t>(svd.singularValues().size()));

        left_factors.push_back(svd.matrixU().leftCols(keep));
        Eigen::MatrixXd next = svd.singularValues().head(keep).asDiagonal() *
                               svd.matrixV().leftCols(keep).transpose();
        carry.assign(keep * rest, 0.0);
        for (std::size_t r = 0; r < keep; ++r)
            for (std::size_t c = 0; c < rest; ++c) carry[r * rest + c] = next(r, c);
        left_rank = keep;
    }

    // Reconstruct: chain the left factors back onto the remainder.
    // g holds (I_0 ... I_k) x r_{k+1}.
    Eigen::MatrixXd g = left_factors[0]; // rows = I_0 (left_rank was 1)
    for (std::size_t k = 1; k + 1 < order; ++k) {
        const Eigen::MatrixXd& u = left_factors[k]; // (r_k * I_k) x r_{k+1}
        const std::size_t r_k = u.rows() / dims[k];
        Eigen::MatrixXd next(g.rows() * dims[k], u.cols());
        for (Eigen::Index row = 0; row < g.rows(); ++row)
            for (std::size_t i = 0; i < dims[k]; ++i)
                for (Eigen::Index b = 0; b < u.cols(); ++b) {
                    double sum = 0.0;
                    for (std::size_t a = 0; a < r_k; ++a)
                        sum += g(row, a) * u(a * dims[k] + i, b);
                    next(row * dims[k] + i, b) = sum;
                }
        g = std::move(next);
    }

    // carry is r_{K-1} x I_{K-1}.
    const std::size_t last_mode = dims[order - 1];
    std::vector<double> out(total, 0.0);
    for (Eigen::Index row = 0; row < g.rows(); ++row)
        for (std::size_t i = 0; i < last_mode; ++i) {
            double sum = 0.0;
            for (Eigen::Index a = 0; a < g.cols(); ++a)
                sum += g(row, a) * carry[a * last_mode + i];
            out[row * last_mode + i] = sum;
        }
    return out;
}

/// Relative error of the oracle truncation against the original data.
inline double seq_svd_truncate_error(const std::vector<double>& data,
                                     const std::vector<std::size_t>& dims,
                                     const std::vector<std::size_t>& bond_caps) {
    return diff_norm(seq_svd_truncate_oracle(data, dims, bond_caps), data) / vec_norm(data);
}

} // namespace ttest
