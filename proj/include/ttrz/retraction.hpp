#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ttrz/tt_matrix.hpp"
#include "ttrz/tt_vector.hpp"

namespace ttrz {

/// Accounting record of one rank-reduction sweep.
struct RetractReport {
    RankProfile input_ranks;
    RankProfile output_ranks;
    /// Root-sum-square of singular values dropped at each bond truncation
    /// (one entry per core, the last is always 0).
    std::vector<double> per_core_discarded_energy;
    /// sqrt(sum of squared energies) / input norm. For the orthogonalized
    /// variant this is an upper bound on the relative error; for the
    /// literal variant it is an estimate.
    double total_relative_error_estimate = 0.0;
};

/// Rank reduction by a single left-to-right truncated-SVD sweep with no
/// prior orthogonalization. At bond k the kept rank is
/// min(r_max, rows of the unfolding, floor(r_k * r_{k+1} / kept_{k-1}),
/// available singular values), with the running kept rank starting at 1.
/// Within-cap inputs are reproduced up to roundoff.
std::pair<TTVector, RetractReport> retract_literal(const TTVector& w, std::size_t r_max);
std::pair<TTMatrix, RetractReport> retract_literal(const TTMatrix& m, std::size_t r_max);

/// Quasi-optimal rank reduction: a right-to-left orthogonalization sweep
/// followed by a left-to-right truncated-SVD sweep. The result satisfies
/// ||w - result|| <= sqrt(sum of squared per-bond discarded energies).
std::pair<TTVector, RetractReport> retract_orthogonal(const TTVector& w, const RankProfile& target);
std::pair<TTVector, RetractReport> retract_orthogonal(const TTVector& w, std::size_t r_max);
std::pair<TTMatrix, RetractReport> retract_orthogonal(const TTMatrix& m, const RankProfile& target);
std::pair<TTMatrix, RetractReport> retract_orthogonal(const TTMatrix& m, std::size_t r_max);

} // namespace ttrz
