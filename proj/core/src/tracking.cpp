#include "halftrack/tracking.hpp"

#include <cmath>

namespace halftrack {

double tracking_error(const Matrix& returns, const Vector& index_returns,
                      const Vector& weights, bool normalized) {
  if (returns.rows() != index_returns.size() || returns.cols() != weights.size())
    throw DimensionMismatch("tracking_error: shape mismatch");
  const double sq = (returns * weights - index_returns).squaredNorm();
  return normalized ? sq / static_cast<double>(returns.rows()) : sq;
}

double spectral_norm_sq(const Matrix& m) {
  if (m.size() == 0 || m.norm() == 0.0) throw ZeroMatrix("spectral_norm_sq of zero matrix");

  constexpr int kMaxIters = 10000;
  constexpr double kRelTol = 1e-10;

  Vector v = Vector::Ones(m.cols());
  v /= v.norm();
  double eig = 0.0;
  for (int it = 0; it < kMaxIters; ++it) {
    Vector u = m.transpose() * (m * v);
    const double norm = u.norm();
    if (norm == 0.0) {
      // start vector in the null space; perturb deterministically
      v = Vector::LinSpaced(m.cols(), 1.0, 2.0).normalized();
      continue;
    }
    u /= norm;
    const double next = u.dot(m.transpose() * (m * u));
    if (eig > 0.0 && std::abs(next - eig) <= kRelTol * eig) {
      return next;
    }
    eig = next;
    v = u;
  }
  return eig;
}

}  // namespace halftrack
