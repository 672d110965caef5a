#include "ubm/lie_sampler.hpp"

#include <cmath>
#include <string>

#include "ubm/errors.hpp"

namespace ubm {

namespace {

void require_dimension(int n) {
  if (n < 1) fail(ErrorCode::invalid_dimension, "dimension must be >= 1, got " + std::to_string(n));
}

// Fills the upper triangle of i H / sqrt(n) and mirrors it.
ComplexMatrix sample_u_entries(int n, RngStream& rng) {
  ComplexMatrix x(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double half = std::sqrt(0.5);
  for (int j = 0; j < n; ++j) {
    x(j, j) = {0.0, rng.normal() * scale};
    for (int k = j + 1; k < n; ++k) {
      const double re = rng.normal() * half;
      const double im = rng.normal() * half;
      // i * (re + i im) = -im + i re
      const std::complex<double> v{-im * scale, re * scale};
      x(j, k) = v;
      x(k, j) = -std::conj(v);
    }
  }
  return x;
}

}  // namespace

SkewMatrix SkewMatrix::zero(int n) {
  require_dimension(n);
  return SkewMatrix(ComplexMatrix::Zero(n, n));
}

SkewMatrix SkewMatrix::from_matrix(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    fail(ErrorCode::invalid_dimension, "skew-Hermitian matrix must be square and nonempty");
  }
  const double defect = (m + m.adjoint()).cwiseAbs().maxCoeff();
  if (!(defect <= tol)) {
    fail(ErrorCode::invalid_input,
         "matrix is not skew-Hermitian (max |X + X*| = " + std::to_string(defect) + ")");
  }
  ComplexMatrix s = 0.5 * (m - m.adjoint());
  return SkewMatrix(std::move(s));
}

double scaled_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  // Re tr(A B*) = sum_jk Re(a_jk conj(b_jk))
  const double n = static_cast<double>(a.rows());
  return n * (a.array() * b.array().conjugate()).real().sum();
}

ComplexMatrix central_unit(int n) {
  require_dimension(n);
  return ComplexMatrix::Identity(n, n) * std::complex<double>(0.0, 1.0 / n);
}

SkewMatrix gaussian_u(int n, RngStream& rng) {
  require_dimension(n);
  return SkewMatrix(sample_u_entries(n, rng));
}

SkewMatrix gaussian_su(int n, RngStream& rng) {
  require_dimension(n);
  ComplexMatrix x = sample_u_entries(n, rng);
  // <X, iI/n>_N = Im tr X, so the projection subtracts (Im tr X / n) i from
  // each diagonal entry; entries stay purely imaginary.
  const double shift = x.trace().imag() / n;
  for (int j = 0; j < n; ++j) x(j, j) = {0.0, x(j, j).imag() - shift};
  return SkewMatrix(std::move(x));
}

}  // namespace ubm
