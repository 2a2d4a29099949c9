#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ttrz/tt_vector.hpp"

namespace ttrz {

/// Factorization of a flat dimension into K mode sizes, e.g.
/// 2048 = 8 * 4 * 8 * 8.
class ModeFactorization {
public:
    ModeFactorization() = default;
    explicit ModeFactorization(std::vector<std::size_t> factors);

    std::size_t order() const { return factors_.size(); }
    std::size_t factor(std::size_t k) const { return factors_[k]; }
    const std::vector<std::size_t>& factors() const { return factors_; }
    std::size_t product() const;

    bool operator==(const ModeFactorization& o) const { return factors_ == o.factors_; }

private:
    std::vector<std::size_t> factors_;
};

/// 4-order TT operator core, stored as (out_mode, in_mode, left_rank,
/// right_rank) row-major. The flat layout coincides with a TTCore3 whose
/// mode is the fused pair (j, i) of size out_mode * in_mode.
struct TTCore4 {
    std::size_t out_mode = 0;
    std::size_t in_mode = 0;
    std::size_t left_rank = 0;
    std::size_t right_rank = 0;
    std::vector<double> data;

    TTCore4() = default;
    TTCore4(std::size_t out, std::size_t in, std::size_t left, std::size_t right)
        : out_mode(out), in_mode(in), left_rank(left), right_rank(right),
          data(out * in * left * right, 0.0) {}

    double at(std::size_t j, std::size_t i, std::size_t a, std::size_t b) const {
        return data[((j * in_mode + i) * left_rank + a) * right_rank + b];
    }
    double& at(std::size_t j, std::size_t i, std::size_t a, std::size_t b) {
        return data[((j * in_mode + i) * left_rank + a) * right_rank + b];
    }
    std::size_t size() const { return data.size(); }
};

/// Linear operator in TT format: K chained 4-order cores representing a map
/// from a product of in-modes to a product of out-modes.
class TTMatrix {
public:
    TTMatrix() = default;
    explicit TTMatrix(std::vector<TTCore4> cores);

    std::size_t order() const { return cores_.size(); }
    const TTCore4& core(std::size_t k) const { return cores_[k]; }
    TTCore4& core(std::size_t k) { return cores_[k]; }
    const std::vector<TTCore4>& cores() const { return cores_; }

    Shape in_shape() const;
    Shape out_shape() const;
    std::size_t in_dim() const;
    std::size_t out_dim() const;
    RankProfile rank_profile() const;

private:
    std::vector<TTCore4> cores_;
};

/// View a TT operator as a TT tensor over the fused (out, in) modes. The
/// core data is shared bit-exactly; only the mode bookkeeping changes.
TTVector fuse_modes(const TTMatrix& m);

/// Inverse of fuse_modes for the given factorizations.
TTMatrix split_modes(const TTVector& w, const ModeFactorization& out_f,
                     const ModeFactorization& in_f);

/// Decompose a dense matrix into TT operator format. The matrix is indexed
/// by interleaved digit pairs (j_1,i_1,...,j_K,i_K) so that TT mode k
/// carries the pair (j_k, i_k); the fused tensor is then decomposed by
/// tt_svd under the rank cap.
TTMatrix tt_matrix_from_dense(const Matrix& w, const ModeFactorization& in_f,
                              const ModeFactorization& out_f, const RankProfile& cap);
TTMatrix tt_matrix_from_dense(const Matrix& w, const ModeFactorization& in_f,
                              const ModeFactorization& out_f, std::size_t max_rank);

/// Dense matrix reconstruction (desk scale).
Matrix tt_matrix_full(const TTMatrix& m);

/// Intermediate contraction stages of a TT matrix-vector product; kept so
/// the product can be differentiated exactly in reverse order.
struct TtMatvecTrace {
    std::vector<std::vector<double>> stages;
};

/// y = m * x by mode-wise contraction; never materializes the dense
/// operator. When trace is non-null all intermediate stages are retained.
std::vector<double> tt_matvec(const TTMatrix& m, const std::vector<double>& x,
                              TtMatvecTrace* trace = nullptr);

struct TtMatvecBackward {
    std::vector<double> grad_x;
    std::vector<std::vector<double>> grad_cores; // flat, same layout as core data
};

/// Exact reverse-mode differentiation of tt_matvec given the forward trace
/// and the gradient with respect to the output.
TtMatvecBackward tt_matvec_backward(const TTMatrix& m, const TtMatvecTrace& trace,
                                    const std::vector<double>& grad_y);

std::size_t param_count(const TTMatrix& m);

/// TT operator with the given factorizations and ranks and standard normal
/// entries, reproducible from the seed.
TTMatrix random_tt_matrix(const ModeFactorization& out_f, const ModeFactorization& in_f,
                          const RankProfile& ranks, std::uint64_t seed);

} // namespace ttrz
