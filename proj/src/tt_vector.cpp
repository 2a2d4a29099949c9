#include "ttrz/tt_vector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eigen_util.hpp"
#include "ttrz/rng.hpp"
#include "ttrz/svd.hpp"

namespace ttrz {

using detail::CMapRow;
using detail::MapRow;
using detail::RowMat;

RankProfile::RankProfile(std::vector<std::size_t> ranks) : ranks_(std::move(ranks)) {
    if (ranks_.size() < 2) throw ConfigError("rank profile needs at least two entries");
    if (ranks_.front() != 1 || ranks_.back() != 1)
        throw ConfigError("boundary TT-ranks must be 1");
    for (std::size_t r : ranks_)
        if (r == 0) throw ConfigError("TT-ranks must be >= 1");
}

RankProfile RankProfile::uniform(std::size_t order, std::size_t interior_rank) {
    if (order == 0) throw ConfigError("rank profile order must be >= 1");
    std::vector<std::size_t> ranks(order + 1, interior_rank);
    ranks.front() = ranks.back() = 1;
    return RankProfile(std::move(ranks));
}

bool RankProfile::dominates(const RankProfile& other) const {
    if (ranks_.size() != other.ranks_.size()) return false;
    for (std::size_t k = 0; k < ranks_.size(); ++k)
        if (ranks_[k] < other.ranks_[k]) return false;
    return true;
}

TTVector::TTVector(std::vector<TTCore3> cores) : cores_(std::move(cores)) {
    if (cores_.empty()) throw ShapeMismatch("TT tensor needs at least one core");
    if (cores_.front().left_rank != 1 || cores_.back().right_rank != 1)
        throw ShapeMismatch("boundary TT-ranks must be 1");
    for (std::size_t k = 0; k < cores_.size(); ++k) {
        const TTCore3& c = cores_[k];
        if (c.mode_size == 0 || c.left_rank == 0 || c.right_rank == 0)
            throw ShapeMismatch("TT core dimensions must be >= 1");
        if (c.data.size() != c.mode_size * c.left_rank * c.right_rank)
            throw ShapeMismatch("TT core data length inconsistent");
        if (k + 1 < cores_.size() && c.right_rank != cores_[k + 1].left_rank)
            throw ShapeMismatch("adjacent TT cores have mismatched ranks at bond " +
                                std::to_string(k + 1));
    }
}

Shape TTVector::shape() const {
    std::vector<std::size_t> dims;
    dims.reserve(cores_.size());
    for (const TTCore3& c : cores_) dims.push_back(c.mode_size);
    return Shape(std::move(dims));
}

RankProfile TTVector::rank_profile() const {
    std::vector<std::size_t> ranks;
    ranks.reserve(cores_.size() + 1);
    ranks.push_back(cores_.front().left_rank);
    for (const TTCore3& c : cores_) ranks.push_back(c.right_rank);
    return RankProfile(std::move(ranks));
}

double tt_element(const TTVector& w, const std::vector<std::size_t>& idx) {
    const std::size_t order = w.order();
    if (idx.size() != order) throw IndexOutOfRange("multi-index order mismatch");
    for (std::size_t k = 0; k < order; ++k)
        if (idx[k] >= w.core(k).mode_size)
            throw IndexOutOfRange("index out of range at mode " + std::to_string(k));

    // Running 1 x R_k row vector times the slice chain.
    std::vector<double> row(w.core(0).right_rank);
    for (std::size_t b = 0; b < row.size(); ++b) row[b] = w.core(0).at(idx[0], 0, b);
    for (std::size_t k = 1; k < order; ++k) {
        const TTCore3& c = w.core(k);
        std::vector<double> next(c.right_rank, 0.0);
        for (std::size_t a = 0; a < c.left_rank; ++a) {
            const double ra = row[a];
            if (ra == 0.0) continue;
            for (std::size_t b = 0; b < c.right_rank; ++b) next[b] += ra * c.at(idx[k], a, b);
        }
        row = std::move(next);
    }
    return row[0];
}

DenseTensor tt_full(const TTVector& w) {
    const std::size_t order = w.order();
    const Shape shape = w.shape();

    // G holds the contraction of cores 0..k as an (I_0...I_k) x R_{k+1}
    // matrix; the first core's left unfolding is already that matrix.
    RowMat g = CMapRow(w.core(0).data.data(), w.core(0).mode_size, w.core(0).right_rank);
    for (std::size_t k = 1; k < order; ++k) {
        const TTCore3& c = w.core(k);
        const Eigen::Index n = g.rows();
        RowMat next(n * static_cast<Eigen::Index>(c.mode_size),
                    static_cast<Eigen::Index>(c.right_rank));
        for (std::size_t i = 0; i < c.mode_size; ++i) {
            CMapRow slice(c.data.data() + i * c.left_rank * c.right_rank, c.left_rank,
                          c.right_rank);
            RowMat prod = g * slice;
            for (Eigen::Index r = 0; r < n; ++r)
                next.row(r * static_cast<Eigen::Index>(c.mode_size) +
                         static_cast<Eigen::Index>(i)) = prod.row(r);
        }
        g = std::move(next);
    }

    std::vector<double> data(g.data(), g.data() + g.size());
    return DenseTensor(shape, std::move(data));
}

TTVector tt_svd(const DenseTensor& t, const RankProfile& cap) {
    const std::size_t order = t.shape().order();
    if (cap.order() != order) throw ShapeMismatch("rank cap order does not match tensor order");

    std::vector<TTCore3> cores;
    cores.reserve(order);

    if (order == 1) {
        TTCore3 core(t.shape().dim(0), 1, 1);
        core.data = t.data();
        cores.push_back(std::move(core));
        return TTVector(std::move(cores));
    }

    // Carry starts as the full tensor seen as a (left_rank * I_1) x rest
    // matrix and shrinks by one mode per truncated SVD.
    std::size_t left_rank = 1;
    std::size_t rest = t.shape().element_count();
    std::vector<double> carry = t.data();

    for (std::size_t k = 0; k + 1 < order; ++k) {
        const std::size_t mode = t.shape().dim(k);
        rest /= mode;
        Matrix unfolding(left_rank * mode, rest, std::move(carry));
        TruncatedSvd svd = svd_truncated(unfolding, cap.rank(k + 1));
        const std::size_t r = svd.singular_values.size();

        TTCore3 core(mode, left_rank, r);
        for (std::size_t i = 0; i < mode; ++i)
            for (std::size_t a = 0; a < left_rank; ++a)
                for (std::size_t b = 0; b < r; ++b) core.at(i, a, b) = svd.u(a * mode + i, b);
        cores.push_back(std::move(core));

        // carry = diag(S) * V, the remainder to decompose.
        carry = std::move(svd.v.data);
        for (std::size_t a = 0; a < r; ++a)
            for (std::size_t j = 0; j < rest; ++j) carry[a * rest + j] *= svd.singular_values[a];
        left_rank = r;
    }

    TTCore3 last(t.shape().dim(order - 1), left_rank, 1);
    const std::size_t mode = t.shape().dim(order - 1);
    for (std::size_t i = 0; i < mode; ++i)
        for (std::size_t a = 0; a < left_rank; ++a) last.at(i, a, 0) = carry[a * mode + i];
    cores.push_back(std::move(last));

    return TTVector(std::move(cores));
}

TTVector tt_svd(const DenseTensor& t, std::size_t max_rank) {
    return tt_svd(t, RankProfile::uniform(t.shape().order(), max_rank));
}

TTVector tt_add(const TTVector& a, const TTVector& b) {
    if (!(a.shape() == b.shape())) throw ShapeMismatch("tt_add operands have different shapes");
    const std::size_t order = a.order();

    std::vector<TTCore3> cores;
    cores.reserve(order);
    for (std::size_t k = 0; k < order; ++k) {
        const TTCore3& ca = a.core(k);
        const TTCore3& cb = b.core(k);
        const bool first = (k == 0);
        const bool last = (k + 1 == order);
        const std::size_t left = first ? 1 : ca.left_rank + cb.left_rank;
        const std::size_t right = last ? 1 : ca.right_rank + cb.right_rank;

        TTCore3 core(ca.mode_size, left, right);
        for (std::size_t i = 0; i < ca.mode_size; ++i) {
            for (std::size_t p = 0; p < ca.left_rank; ++p)
                for (std::size_t q = 0; q < ca.right_rank; ++q)
                    core.at(i, p, q) = ca.at(i, p, q);
            const std::size_t off_l = first ? 0 : ca.left_rank;
            const std::size_t off_r = last ? 0 : ca.right_rank;
            for (std::size_t p = 0; p < cb.left_rank; ++p)
                for (std::size_t q = 0; q < cb.right_rank; ++q) {
                    double& slot = core.at(i, off_l + p, off_r + q);
                    if (first && last)
                        slot += cb.at(i, p, q); // K = 1: plain sum
                    else
                        slot = cb.at(i, p, q);
                }
        }
        cores.push_back(std::move(core));
    }
    return TTVector(std::move(cores));
}

TTVector tt_scale(const TTVector& a, double c) {
    TTVector out = a;
    for (double& x : out.core(0).data) x *= c;
    return out;
}

double tt_norm(const TTVector& a) {
    const std::size_t order = a.order();
    // Transfer matrix of <a, a> across each bond.
    RowMat w = RowMat::Ones(1, 1);
    for (std::size_t k = 0; k < order; ++k) {
        const TTCore3& c = a.core(k);
        RowMat next = RowMat::Zero(c.right_rank, c.right_rank);
        for (std::size_t i = 0; i < c.mode_size; ++i) {
            CMapRow slice(c.data.data() + i * c.left_rank * c.right_rank, c.left_rank,
                          c.right_rank);
            next.noalias() += slice.transpose() * w * slice;
        }
        w = std::move(next);
    }
    return std::sqrt(std::max(0.0, w(0, 0)));
}

std::size_t param_count(const TTVector& w) {
    std::size_t total = 0;
    for (const TTCore3& c : w.cores()) total += c.size();
    return total;
}

TTVector random_tt_vector(const Shape& shape, const RankProfile& ranks, std::uint64_t seed) {
    if (ranks.order() != shape.order())
        throw ShapeMismatch("rank profile order does not match shape order");
    std::mt19937_64 gen(seed);
    std::vector<TTCore3> cores;
    cores.reserve(shape.order());
    for (std::size_t k = 0; k < shape.order(); ++k) {
        TTCore3 core(shape.dim(k), ranks.rank(k), ranks.rank(k + 1));
        for (double& x : core.data) x = standard_normal(gen);
        cores.push_back(std::move(core));
    }
    return TTVector(std::move(cores));
}

TTVector pad_ranks(const TTVector& a, const RankProfile& target) {
    if (target.order() != a.order()) throw ShapeMismatch("pad_ranks: profile order mismatch");
    if (!target.dominates(a.rank_profile()))
        throw ConfigError("pad_ranks: target must dominate current ranks");
    std::vector<TTCore3> cores;
    cores.reserve(a.order());
    for (std::size_t k = 0; k < a.order(); ++k) {
        const TTCore3& c = a.core(k);
        TTCore3 padded(c.mode_size, target.rank(k), target.rank(k + 1));
        for (std::size_t i = 0; i < c.mode_size; ++i)
            for (std::size_t p = 0; p < c.left_rank; ++p)
                for (std::size_t q = 0; q < c.right_rank; ++q)
                    padded.at(i, p, q) = c.at(i, p, q);
        cores.push_back(std::move(padded));
    }
    return TTVector(std::move(cores));
}

} // namespace ttrz
