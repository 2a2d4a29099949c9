#include "ttrz/tt_matrix.hpp"

#include <algorithm>
#include <string>

#include "eigen_util.hpp"
#include "ttrz/rng.hpp"

namespace ttrz {

using detail::CMapRow;
using detail::MapRow;
using detail::RowMat;

ModeFactorization::ModeFactorization(std::vector<std::size_t> factors)
    : factors_(std::move(factors)) {
    if (factors_.empty()) throw ConfigError("mode factorization needs at least one factor");
    for (std::size_t f : factors_)
        if (f == 0) throw ConfigError("mode factors must be >= 1");
}

std::size_t ModeFactorization::product() const {
    std::size_t p = 1;
    for (std::size_t f : factors_) p *= f;
    return p;
}

TTMatrix::TTMatrix(std::vector<TTCore4> cores) : cores_(std::move(cores)) {
    if (cores_.empty()) throw ShapeMismatch("TT operator needs at least one core");
    if (cores_.front().left_rank != 1 || cores_.back().right_rank != 1)
        throw ShapeMismatch("boundary TT-ranks must be 1");
    for (std::size_t k = 0; k < cores_.size(); ++k) {
        const TTCore4& c = cores_[k];
        if (c.out_mode == 0 || c.in_mode == 0 || c.left_rank == 0 || c.right_rank == 0)
            throw ShapeMismatch("TT operator core dimensions must be >= 1");
        if (c.data.size() != c.out_mode * c.in_mode * c.left_rank * c.right_rank)
            throw ShapeMismatch("TT operator core data length inconsistent");
        if (k + 1 < cores_.size() && c.right_rank != cores_[k + 1].left_rank)
            throw ShapeMismatch("adjacent TT operator cores mismatched at bond " +
                                std::to_string(k + 1));
    }
}

Shape TTMatrix::in_shape() const {
    std::vector<std::size_t> dims;
    for (const TTCore4& c : cores_) dims.push_back(c.in_mode);
    return Shape(std::move(dims));
}

Shape TTMatrix::out_shape() const {
    std::vector<std::size_t> dims;
    for (const TTCore4& c : cores_) dims.push_back(c.out_mode);
    return Shape(std::move(dims));
}

std::size_t TTMatrix::in_dim() const { return in_shape().element_count(); }
std::size_t TTMatrix::out_dim() const { return out_shape().element_count(); }

RankProfile TTMatrix::rank_profile() const {
    std::vector<std::size_t> ranks;
    ranks.push_back(cores_.front().left_rank);
    for (const TTCore4& c : cores_) ranks.push_back(c.right_rank);
    return RankProfile(std::move(ranks));
}

TTVector fuse_modes(const TTMatrix& m) {
    // (j, i, a, b) row-major equals ((j * in + i), a, b) row-major, so the
    // fused core shares the flat data unchanged.
    std::vector<TTCore3> cores;
    cores.reserve(m.order());
    for (const TTCore4& c : m.cores()) {
        TTCore3 fused(c.out_mode * c.in_mode, c.left_rank, c.right_rank);
        fused.data = c.data;
        cores.push_back(std::move(fused));
    }
    return TTVector(std::move(cores));
}

TTMatrix split_modes(const TTVector& w, const ModeFactorization& out_f,
                     const ModeFactorization& in_f) {
    if (out_f.order() != w.order() || in_f.order() != w.order())
        throw ShapeMismatch("split_modes: factorization order mismatch");
    std::vector<TTCore4> cores;
    cores.reserve(w.order());
    for (std::size_t k = 0; k < w.order(); ++k) {
        const TTCore3& c = w.core(k);
        if (c.mode_size != out_f.factor(k) * in_f.factor(k))
            throw ShapeMismatch("split_modes: fused mode size mismatch at core " +
                                std::to_string(k));
        TTCore4 split(out_f.factor(k), in_f.factor(k), c.left_rank, c.right_rank);
        split.data = c.data;
        cores.push_back(std::move(split));
    }
    return TTMatrix(std::move(cores));
}

namespace {

// Digits of flat under the factorization, row-major (first digit slowest).
void to_digits(std::size_t flat, const ModeFactorization& f, std::vector<std::size_t>& digits) {
    digits.resize(f.order());
    for (std::size_t k = f.order(); k-- > 0;) {
        digits[k] = flat % f.factor(k);
        flat /= f.factor(k);
    }
}

} // namespace

TTMatrix tt_matrix_from_dense(const Matrix& w, const ModeFactorization& in_f,
                              const ModeFactorization& out_f, const RankProfile& cap) {
    if (in_f.order() != out_f.order())
        throw ShapeMismatch("tt_matrix_from_dense: factorization orders differ");
    if (w.rows != out_f.product() || w.cols != in_f.product())
        throw ShapeMismatch("tt_matrix_from_dense: matrix dims do not match factorizations");

    const std::size_t order = in_f.order();
    std::vector<std::size_t> fused_modes(order);
    for (std::size_t k = 0; k < order; ++k)
        fused_modes[k] = out_f.factor(k) * in_f.factor(k);
    DenseTensor paired((Shape(fused_modes)));

    // Pair up the row and column digits: tensor mode k is (j_k, i_k).
    std::vector<std::size_t> jd, id;
    for (std::size_t j = 0; j < w.rows; ++j) {
        to_digits(j, out_f, jd);
        for (std::size_t i = 0; i < w.cols; ++i) {
            to_digits(i, in_f, id);
            std::size_t flat = 0;
            for (std::size_t k = 0; k < order; ++k)
                flat = flat * fused_modes[k] + (jd[k] * in_f.factor(k) + id[k]);
            paired[flat] = w(j, i);
        }
    }

    return split_modes(tt_svd(paired, cap), out_f, in_f);
}

TTMatrix tt_matrix_from_dense(const Matrix& w, const ModeFactorization& in_f,
                              const ModeFactorization& out_f, std::size_t max_rank) {
    return tt_matrix_from_dense(w, in_f, out_f, RankProfile::uniform(in_f.order(), max_rank));
}

Matrix tt_matrix_full(const TTMatrix& m) {
    const DenseTensor paired = tt_full(fuse_modes(m));
    const ModeFactorization out_f(m.out_shape().dims());
    const ModeFactorization in_f(m.in_shape().dims());
    const std::size_t order = m.order();

    Matrix w(m.out_dim(), m.in_dim());
    std::vector<std::size_t> jd, id;
    for (std::size_t j = 0; j < w.rows; ++j) {
        to_digits(j, out_f, jd);
        for (std::size_t i = 0; i < w.cols; ++i) {
            to_digits(i, in_f, id);
            std::size_t flat = 0;
            for (std::size_t k = 0; k < order; ++k)
                flat = flat * (out_f.factor(k) * in_f.factor(k)) +
                       (jd[k] * in_f.factor(k) + id[k]);
            w(j, i) = paired[flat];
        }
    }
    return w;
}

namespace {

// Stage k of the product holds the partial contraction with dims
// (rank_k, remaining in-modes k..K-1, produced out-modes 0..k-1), flat as
// rank slowest, then in-modes, then out-modes.
struct StageDims {
    std::size_t rank;
    std::size_t in_rem;
    std::size_t out_done;
    std::size_t size() const { return rank * in_rem * out_done; }
};

std::vector<StageDims> stage_dims(const TTMatrix& m) {
    std::vector<StageDims> dims(m.order() + 1);
    std::size_t in_rem = m.in_dim();
    std::size_t out_done = 1;
    dims[0] = {1, in_rem, 1};
    for (std::size_t k = 0; k < m.order(); ++k) {
        const TTCore4& c = m.core(k);
        in_rem /= c.in_mode;
        out_done *= c.out_mode;
        dims[k + 1] = {c.right_rank, in_rem, out_done};
    }
    return dims;
}

// Core as a (out*right) x (in*left) matrix for one contraction step.
RowMat core_as_step_matrix(const TTCore4& c) {
    RowMat m(c.out_mode * c.right_rank, c.in_mode * c.left_rank);
    for (std::size_t j = 0; j < c.out_mode; ++j)
        for (std::size_t i = 0; i < c.in_mode; ++i)
            for (std::size_t a = 0; a < c.left_rank; ++a)
                for (std::size_t b = 0; b < c.right_rank; ++b)
                    m(j * c.right_rank + b, i * c.left_rank + a) = c.at(j, i, a, b);
    return m;
}

} // namespace

std::vector<double> tt_matvec(const TTMatrix& m, const std::vector<double>& x,
                              TtMatvecTrace* trace) {
    if (x.size() != m.in_dim())
        throw ShapeMismatch("tt_matvec: input length does not match operator in-dim");

    const std::vector<StageDims> dims = stage_dims(m);
    std::vector<double> stage = x;
    if (trace) {
        trace->stages.clear();
        trace->stages.push_back(stage);
    }

    for (std::size_t k = 0; k < m.order(); ++k) {
        const TTCore4& c = m.core(k);
        const StageDims cur = dims[k];
        const StageDims nxt = dims[k + 1];
        const std::size_t in_rem = nxt.in_rem;      // in-modes after this one
        const std::size_t out_done = cur.out_done;  // out-modes before this one

        // Gather stage into an (in*left) x (in_rem*out_done) matrix.
        RowMat xs(c.in_mode * c.left_rank, in_rem * out_done);
        for (std::size_t i = 0; i < c.in_mode; ++i)
            for (std::size_t a = 0; a < c.left_rank; ++a)
                for (std::size_t p = 0; p < in_rem; ++p)
                    for (std::size_t q = 0; q < out_done; ++q)
                        xs(i * c.left_rank + a, p * out_done + q) =
                            stage[(a * cur.in_rem + i * in_rem + p) * out_done + q];

        const RowMat ys = core_as_step_matrix(c) * xs;

        std::vector<double> next(nxt.size());
        for (std::size_t j = 0; j < c.out_mode; ++j)
            for (std::size_t b = 0; b < c.right_rank; ++b)
                for (std::size_t p = 0; p < in_rem; ++p)
                    for (std::size_t q = 0; q < out_done; ++q)
                        next[(b * in_rem + p) * nxt.out_done + (q * c.out_mode + j)] =
                            ys(j * c.right_rank + b, p * out_done + q);
        stage = std::move(next);
        if (trace) trace->stages.push_back(stage);
    }
    return stage;
}

TtMatvecBackward tt_matvec_backward(const TTMatrix& m, const TtMatvecTrace& trace,
                                    const std::vector<double>& grad_y) {
    if (trace.stages.size() != m.order() + 1)
        throw ShapeMismatch("tt_matvec_backward: trace does not match operator");
    if (grad_y.size() != m.out_dim())
        throw ShapeMismatch("tt_matvec_backward: output gradient length mismatch");

    const std::vector<StageDims> dims = stage_dims(m);
    TtMatvecBackward out;
    out.grad_cores.resize(m.order());

    std::vector<double> grad_stage = grad_y;
    for (std::size_t k = m.order(); k-- > 0;) {
        const TTCore4& c = m.core(k);
        const StageDims cur = dims[k];
        const StageDims nxt = dims[k + 1];
        const std::size_t in_rem = nxt.in_rem;
        const std::size_t out_done = cur.out_done;

        // Reverse the output scatter of the forward step.
        RowMat gys(c.out_mode * c.right_rank, in_rem * out_done);
        for (std::size_t j = 0; j < c.out_mode; ++j)
            for (std::size_t b = 0; b < c.right_rank; ++b)
                for (std::size_t p = 0; p < in_rem; ++p)
                    for (std::size_t q = 0; q < out_done; ++q)
                        gys(j * c.right_rank + b, p * out_done + q) =
                            grad_stage[(b * in_rem + p) * nxt.out_done + (q * c.out_mode + j)];

        // Rebuild the forward gather of this stage.
        const std::vector<double>& stage = trace.stages[k];
        RowMat xs(c.in_mode * c.left_rank, in_rem * out_done);
        for (std::size_t i = 0; i < c.in_mode; ++i)
            for (std::size_t a = 0; a < c.left_rank; ++a)
                for (std::size_t p = 0; p < in_rem; ++p)
                    for (std::size_t q = 0; q < out_done; ++q)
                        xs(i * c.left_rank + a, p * out_done + q) =
                            stage[(a * cur.in_rem + i * in_rem + p) * out_done + q];

        const RowMat grad_core_mat = gys * xs.transpose();
        std::vector<double>& gc = out.grad_cores[k];
        gc.assign(c.data.size(), 0.0);
        for (std::size_t j = 0; j < c.out_mode; ++j)
            for (std::size_t i = 0; i < c.in_mode; ++i)
                for (std::size_t a = 0; a < c.left_rank; ++a)
                    for (std::size_t b = 0; b < c.right_rank; ++b)
                        gc[((j * c.in_mode + i) * c.left_rank + a) * c.right_rank + b] =
                            grad_core_mat(j * c.right_rank + b, i * c.left_rank + a);

        const RowMat gxs = core_as_step_matrix(c).transpose() * gys;
        std::vector<double> grad_prev(cur.size(), 0.0);
        for (std::size_t i = 0; i < c.in_mode; ++i)
            for (std::size_t a = 0; a < c.left_rank; ++a)
                for (std::size_t p = 0; p < in_rem; ++p)
                    for (std::size_t q = 0; q < out_done; ++q)
                        grad_prev[(a * cur.in_rem + i * in_rem + p) * out_done + q] =
                            gxs(i * c.left_rank + a, p * out_done + q);
        grad_stage = std::move(grad_prev);
    }

    out.grad_x = std::move(grad_stage);
    return out;
}

std::size_t param_count(const TTMatrix& m) {
    std::size_t total = 0;
    for (const TTCore4& c : m.cores()) total += c.size();
    return total;
}

TTMatrix random_tt_matrix(const ModeFactorization& out_f, const ModeFactorization& in_f,
                          const RankProfile& ranks, std::uint64_t seed) {
    if (out_f.order() != in_f.order() || ranks.order() != in_f.order())
        throw ShapeMismatch("random_tt_matrix: order mismatch");
    std::mt19937_64 gen(seed);
    std::vector<TTCore4> cores;
    cores.reserve(in_f.order());
    for (std::size_t k = 0; k < in_f.order(); ++k) {
        TTCore4 core(out_f.factor(k), in_f.factor(k), ranks.rank(k), ranks.rank(k + 1));
        for (double& v : core.data) v = standard_normal(gen);
        cores.push_back(std::move(core));
    }
    return TTMatrix(std::move(cores));
}

} // namespace ttrz
