#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ttrz/dense.hpp"

namespace ttrz {

/// TT-rank chain {R_0,...,R_K}. Boundary ranks R_0 and R_K are always 1,
/// interior ranks are >= 1.
class RankProfile {
public:
    RankProfile() = default;
    explicit RankProfile(std::vector<std::size_t> ranks);

    /// Profile {1, r, r, ..., r, 1} for a K-mode tensor.
    static RankProfile uniform(std::size_t order, std::size_t interior_rank);

    std::size_t order() const { return ranks_.empty() ? 0 : ranks_.size() - 1; }
    std::size_t rank(std::size_t k) const { return ranks_[k]; }
    const std::vector<std::size_t>& ranks() const { return ranks_; }

    /// True when every rank of this profile is >= the other's.
    bool dominates(const RankProfile& other) const;

    bool operator==(const RankProfile& other) const { return ranks_ == other.ranks_; }

private:
    std::vector<std::size_t> ranks_;
};

/// 3-order TT core, stored as (mode, left_rank, right_rank) row-major, so
/// the slice for a fixed mode index is a contiguous left_rank x right_rank
/// matrix.
struct TTCore3 {
    std::size_t mode_size = 0;
    std::size_t left_rank = 0;
    std::size_t right_rank = 0;
    std::vector<double> data;

    TTCore3() = default;
    TTCore3(std::size_t mode, std::size_t left, std::size_t right)
        : mode_size(mode), left_rank(left), right_rank(right), data(mode * left * right, 0.0) {}

    double at(std::size_t i, std::size_t a, std::size_t b) const {
        return data[(i * left_rank + a) * right_rank + b];
    }
    double& at(std::size_t i, std::size_t a, std::size_t b) {
        return data[(i * left_rank + a) * right_rank + b];
    }
    std::size_t size() const { return data.size(); }
};

/// Order-K tensor in TT format: a chain of 3-order cores whose shared rank
/// indices agree and whose boundary ranks are 1.
class TTVector {
public:
    TTVector() = default;
    explicit TTVector(std::vector<TTCore3> cores);

    std::size_t order() const { return cores_.size(); }
    const TTCore3& core(std::size_t k) const { return cores_[k]; }
    TTCore3& core(std::size_t k) { return cores_[k]; }
    const std::vector<TTCore3>& cores() const { return cores_; }

    Shape shape() const;
    RankProfile rank_profile() const;

private:
    std::vector<TTCore3> cores_;
};

/// Single entry: the chained matrix product of the per-mode core slices.
double tt_element(const TTVector& w, const std::vector<std::size_t>& idx);

/// Full reconstruction. Intended for desk-scale tensors; the caller is
/// responsible for the element count being reasonable.
DenseTensor tt_full(const TTVector& w);

/// Left-to-right sequential truncated SVD decomposition of a dense tensor.
/// Bond k is capped at cap.rank(k); when the cap dominates the true
/// TT-ranks, the reconstruction is exact up to roundoff.
TTVector tt_svd(const DenseTensor& t, const RankProfile& cap);
TTVector tt_svd(const DenseTensor& t, std::size_t max_rank);

/// Sum in TT format via block-diagonal core concatenation; interior ranks
/// add. No rounding is applied here; callers reduce ranks explicitly.
TTVector tt_add(const TTVector& a, const TTVector& b);

/// Scalar multiple; exactly one core (the first) is scaled.
TTVector tt_scale(const TTVector& a, double c);

/// Frobenius norm computed by rank-wise contraction of <a, a> without
/// forming the dense tensor.
double tt_norm(const TTVector& a);

/// Total number of stored core entries.
std::size_t param_count(const TTVector& w);

/// TT tensor with the given modes and ranks and standard normal entries,
/// reproducible from the seed.
TTVector random_tt_vector(const Shape& shape, const RankProfile& ranks, std::uint64_t seed);

/// Re-embed a TT tensor into a larger rank profile by zero padding the
/// cores. The represented tensor is unchanged.
TTVector pad_ranks(const TTVector& a, const RankProfile& target);

} // namespace ttrz
