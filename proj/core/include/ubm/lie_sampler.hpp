#pragma once

#include <Eigen/Dense>

#include "ubm/rng.hpp"

namespace ubm {

using ComplexMatrix = Eigen::MatrixXcd;

/// Element of the Lie algebra u(n): an n x n skew-Hermitian matrix.
///
/// The only constructors are the samplers below and from_matrix(), which
/// rejects inputs that are not skew-Hermitian. Samplers write the upper
/// triangle and mirror it, so X + X* == 0 holds bit-for-bit.
class SkewMatrix {
 public:
  static SkewMatrix zero(int n);
  /// Validates X + X* == 0 up to `tol` (max-abs) and symmetrises exactly.
  static SkewMatrix from_matrix(const ComplexMatrix& m, double tol = 1e-12);

  int dim() const noexcept { return static_cast<int>(entries_.rows()); }
  const ComplexMatrix& matrix() const noexcept { return entries_; }

 private:
  explicit SkewMatrix(ComplexMatrix m) : entries_(std::move(m)) {}
  friend SkewMatrix gaussian_u(int n, RngStream& rng);
  friend SkewMatrix gaussian_su(int n, RngStream& rng);

  ComplexMatrix entries_;
};

/// <A, B>_N = N Re tr(A B*), the scaled real inner product on n x n matrices.
double scaled_inner(const ComplexMatrix& a, const ComplexMatrix& b);
inline double scaled_norm_sq(const SkewMatrix& x) { return scaled_inner(x.matrix(), x.matrix()); }

/// The unit vector i I / n spanning the centre of u(n).
ComplexMatrix central_unit(int n);

/// Standard Gaussian on (u(n), <.,.>_N), built as X = i H / sqrt(n) with H
/// Hermitian: diagonal N(0, 1), off-diagonal real and imaginary parts
/// N(0, 1/2) each. Consumes n^2 normals from `rng`.
SkewMatrix gaussian_u(int n, RngStream& rng);

/// Standard Gaussian on su(n): gaussian_u with its component along
/// central_unit(n) removed. Same draw count as gaussian_u.
SkewMatrix gaussian_su(int n, RngStream& rng);

}  // namespace ubm
