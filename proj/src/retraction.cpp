#include "ttrz/retraction.hpp"

#include <Eigen/Dense>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>

#include "eigen_util.hpp"
#include "ttrz/svd.hpp"

namespace ttrz {

using detail::CMapRow;
using detail::MapRow;
using detail::RowMat;

namespace {

// (left * mode) x right unfolding with the left rank as the slow row index.
Matrix left_unfold(const TTCore3& c) {
    Matrix m(c.left_rank * c.mode_size, c.right_rank);
    for (std::size_t i = 0; i < c.mode_size; ++i)
        for (std::size_t a = 0; a < c.left_rank; ++a)
            for (std::size_t b = 0; b < c.right_rank; ++b)
                m(a * c.mode_size + i, b) = c.at(i, a, b);
    return m;
}

TTCore3 refold_left(const Matrix& m, std::size_t mode, std::size_t left, std::size_t right) {
    TTCore3 c(mode, left, right);
    for (std::size_t i = 0; i < mode; ++i)
        for (std::size_t a = 0; a < left; ++a)
            for (std::size_t b = 0; b < right; ++b) c.at(i, a, b) = m(a * mode + i, b);
    return c;
}

// Contract a matrix into the left rank index: core'(i,a',b) = sum_a t(a',a) core(i,a,b).
TTCore3 absorb_left(const RowMat& t, const TTCore3& c) {
    TTCore3 out(c.mode_size, static_cast<std::size_t>(t.rows()), c.right_rank);
    for (std::size_t i = 0; i < c.mode_size; ++i) {
        CMapRow slice(c.data.data() + i * c.left_rank * c.right_rank, c.left_rank, c.right_rank);
        MapRow(out.data.data() + i * out.left_rank * out.right_rank, out.left_rank,
               out.right_rank)
            .noalias() = t * slice;
    }
    return out;
}

// Contract a matrix into the right rank index: core'(i,a,b') = sum_b core(i,a,b) t(b,b').
TTCore3 absorb_right(const TTCore3& c, const RowMat& t) {
    TTCore3 out(c.mode_size, c.left_rank, static_cast<std::size_t>(t.cols()));
    for (std::size_t i = 0; i < c.mode_size; ++i) {
        CMapRow slice(c.data.data() + i * c.left_rank * c.right_rank, c.left_rank, c.right_rank);
        MapRow(out.data.data() + i * out.left_rank * out.right_rank, out.left_rank,
               out.right_rank)
            .noalias() = slice * t;
    }
    return out;
}

// Right-to-left sweep making cores 1..K-1 right-orthonormal (orthonormal
// rows of their right unfolding); the represented tensor is unchanged.
void orthogonalize_right_to_left(std::vector<TTCore3>& cores) {
    for (std::size_t k = cores.size(); k-- > 1;) {
        TTCore3& c = cores[k];
        const std::size_t rows = c.left_rank;
        const std::size_t cols = c.mode_size * c.right_rank;

        // Right unfolding (rank index as rows), gathered since the mode
        // index is slowest in storage.
        RowMat m(rows, cols);
        for (std::size_t i = 0; i < c.mode_size; ++i)
            for (std::size_t a = 0; a < rows; ++a)
                for (std::size_t b = 0; b < c.right_rank; ++b)
                    m(a, i * c.right_rank + b) = c.at(i, a, b);

        // LQ via QR of the transpose: m = l * q with orthonormal rows of q.
        const std::size_t r = std::min(rows, cols);
        Eigen::MatrixXd mt = m.transpose();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(mt);
        Eigen::MatrixXd thin_q =
            qr.householderQ() * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(cols),
                                                          static_cast<Eigen::Index>(r));
        Eigen::MatrixXd rfac = qr.matrixQR()
                                   .topRows(static_cast<Eigen::Index>(r))
                                   .triangularView<Eigen::Upper>();
        RowMat l = rfac.transpose(); // rows x r
        RowMat q = thin_q.transpose();

        TTCore3 replaced(c.mode_size, r, c.right_rank);
        for (std::size_t i = 0; i < c.mode_size; ++i)
            for (std::size_t a = 0; a < r; ++a)
                for (std::size_t b = 0; b < c.right_rank; ++b)
                    replaced.at(i, a, b) = q(a, i * c.right_rank + b);
        cores[k] = std::move(replaced);
        cores[k - 1] = absorb_right(cores[k - 1], l);
    }
}

std::vector<std::size_t> profile_of(const std::vector<TTCore3>& cores) {
    std::vector<std::size_t> ranks;
    ranks.reserve(cores.size() + 1);
    ranks.push_back(cores.front().left_rank);
    for (const TTCore3& c : cores) ranks.push_back(c.right_rank);
    return ranks;
}

// Left-to-right truncation sweep shared by both retraction variants. The
// kept rank at bond k+1 is min(bond_cap[k], available singular values);
// the carry diag(S) * V is absorbed into the next core.
void truncate_sweep(std::vector<TTCore3>& cores, const std::vector<std::size_t>& bond_cap,
                    std::vector<double>& energies) {
    for (std::size_t k = 0; k + 1 < cores.size(); ++k) {
        Matrix m = left_unfold(cores[k]);
        TruncatedSvd svd = svd_truncated(m, bond_cap[k]);
        const std::size_t r = svd.singular_values.size();
        energies[k] = svd.discarded_energy;

        cores[k] = refold_left(svd.u, cores[k].mode_size, cores[k].left_rank, r);

        RowMat carry(r, svd.v.cols);
        for (std::size_t a = 0; a < r; ++a)
            for (std::size_t j = 0; j < svd.v.cols; ++j)
                carry(a, j) = svd.singular_values[a] * svd.v(a, j);
        cores[k + 1] = absorb_left(carry, cores[k + 1]);
    }
}

RetractReport make_report(const RankProfile& in, const std::vector<TTCore3>& out_cores,
                          std::vector<double> energies, double input_norm) {
    RetractReport report;
    report.input_ranks = in;
    report.output_ranks = RankProfile(profile_of(out_cores));
    double sq = 0.0;
    for (double e : energies) sq += e * e;
    report.total_relative_error_estimate = input_norm > 0.0 ? std::sqrt(sq) / input_norm : 0.0;
    report.per_core_discarded_energy = std::move(energies);
    return report;
}

std::pair<TTVector, RetractReport> retract_literal_cores(const TTVector& w, std::size_t r_max) {
    if (r_max < 1) throw ConfigError("retract_literal: r_max must be >= 1");
    const std::size_t order = w.order();
    const RankProfile input_ranks = w.rank_profile();
    const double input_norm = tt_norm(w);

    std::vector<TTCore3> cores = w.cores();
    std::vector<double> energies(order, 0.0);

    // Single truncation sweep without prior orthogonalization. The bond
    // cap follows the three-way minimum with the running kept rank: the
    // row count of the current unfolding, and the (floored) product of
    // the original bond ranks divided by the running rank.
    std::vector<std::size_t> bond_cap(order, 0);
    std::size_t running = 1;
    for (std::size_t k = 0; k + 1 < order; ++k) {
        const std::size_t rows_bound = cores[k].mode_size * running;
        const std::size_t ratio_bound =
            std::max<std::size_t>(1, input_ranks.rank(k) * input_ranks.rank(k + 1) / running);
        std::size_t cap = std::min({r_max, rows_bound, ratio_bound});
        // Thin SVD cannot produce more values than the unfolding has columns.
        cap = std::min(cap, input_ranks.rank(k + 1));
        bond_cap[k] = std::max<std::size_t>(1, cap);
        running = bond_cap[k];
    }
    truncate_sweep(cores, bond_cap, energies);

    TTVector result(std::move(cores));
    RetractReport report = make_report(input_ranks, result.cores(), std::move(energies), input_norm);
    return {std::move(result), std::move(report)};
}

std::pair<TTVector, RetractReport> retract_orthogonal_cores(const TTVector& w,
                                                            const RankProfile& target) {
    if (target.order() != w.order())
        throw ConfigError("retract_orthogonal: target profile order mismatch");
    const RankProfile input_ranks = w.rank_profile();
    const double input_norm = tt_norm(w);

    std::vector<TTCore3> cores = w.cores();
    orthogonalize_right_to_left(cores);

    std::vector<std::size_t> bond_cap(w.order(), 0);
    for (std::size_t k = 0; k + 1 < w.order(); ++k) bond_cap[k] = target.rank(k + 1);
    std::vector<double> energies(w.order(), 0.0);
    truncate_sweep(cores, bond_cap, energies);

    TTVector result(std::move(cores));
    RetractReport report = make_report(input_ranks, result.cores(), std::move(energies), input_norm);
    return {std::move(result), std::move(report)};
}

} // namespace

std::pair<TTVector, RetractReport> retract_literal(const TTVector& w, std::size_t r_max) {
    return retract_literal_cores(w, r_max);
}

std::pair<TTMatrix, RetractReport> retract_literal(const TTMatrix& m, std::size_t r_max) {
    auto [vec, report] = retract_literal_cores(fuse_modes(m), r_max);
    ModeFactorization out_f(m.out_shape().dims());
    ModeFactorization in_f(m.in_shape().dims());
    return {split_modes(vec, out_f, in_f), std::move(report)};
}

std::pair<TTVector, RetractReport> retract_orthogonal(const TTVector& w,
                                                      const RankProfile& target) {
    return retract_orthogonal_cores(w, target);
}

std::pair<TTVector, RetractReport> retract_orthogonal(const TTVector& w, std::size_t r_max) {
    if (r_max < 1) throw ConfigError("retract_orthogonal: r_max must be >= 1");
    return retract_orthogonal_cores(w, RankProfile::uniform(w.order(), r_max));
}

std::pair<TTMatrix, RetractReport> retract_orthogonal(const TTMatrix& m,
                                                      const RankProfile& target) {
    auto [vec, report] = retract_orthogonal_cores(fuse_modes(m), target);
    ModeFactorization out_f(m.out_shape().dims());
    ModeFactorization in_f(m.in_shape().dims());
    return {split_modes(vec, out_f, in_f), std::move(report)};
}

std::pair<TTMatrix, RetractReport> retract_orthogonal(const TTMatrix& m, std::size_t r_max) {
    if (r_max < 1) throw ConfigError("retract_orthogonal: r_max must be >= 1");
    return retract_orthogonal(m, RankProfile::uniform(m.order(), r_max));
}

} // namespace ttrz
