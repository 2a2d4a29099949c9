#pragma once

#include <cstddef>
#include <vector>

#include "ttrz/dense.hpp"

namespace ttrz {

/// Result of a rank-truncated SVD: u is rows x r, v is r x cols, and
/// u * diag(singular_values) * v is the best rank-r approximation of the
/// input in the Frobenius norm. discarded_energy is the root-sum-square of
/// the dropped singular values.
struct TruncatedSvd {
    Matrix u;
    std::vector<double> singular_values;
    Matrix v;
    double discarded_energy = 0.0;
};

/// Truncated SVD keeping r = min(max_rank, numerical rank) components
/// (at least one). Singular values are non-increasing; the sign of each
/// left singular vector is normalized so its first nonzero entry is
/// non-negative. Throws NumericalFailure when the backend does not
/// converge.
TruncatedSvd svd_truncated(const Matrix& m, std::size_t max_rank);

} // namespace ttrz
