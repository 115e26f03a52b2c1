#pragma once

#include "halftrack/types.hpp"

namespace halftrack {

// ||Rw - r_index||^2, divided by T when `normalized`. The solvers work on
// the unnormalized objective; all reported TEI/TEO values are normalized.
double tracking_error(const Matrix& returns, const Vector& index_returns,
                      const Vector& weights, bool normalized);

// Squared largest singular value of `m`, by power iteration on m^T m with
// a fixed all-ones start vector (10000 iterations max, 1e-10 relative
// eigenvalue change stop). Throws ZeroMatrix when m == 0.
double spectral_norm_sq(const Matrix& m);

}  // namespace halftrack
