#pragma once

#include <Eigen/Dense>

namespace ubm {

using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kDefaultUnitarityTol = 1e-10;

/// An n x n unitary matrix: max-abs of U*U - I stays within a tolerance.
class UnitaryMatrix {
 public:
  static UnitaryMatrix identity(int n);
  /// Checks the unitarity defect against `tol`; contract-violation otherwise.
  static UnitaryMatrix from_matrix(ComplexMatrix m, double tol = kDefaultUnitarityTol);
  /// For producers that are unitary by construction (products of exponentials
  /// of skew-Hermitian matrices). No check is made.
  static UnitaryMatrix assume_unitary(ComplexMatrix m) { return UnitaryMatrix(std::move(m)); }

  int dim() const noexcept { return static_cast<int>(entries_.rows()); }
  const ComplexMatrix& matrix() const noexcept { return entries_; }

  /// max_jk |(U*U - I)_jk|
  double unitarity_defect() const;

 private:
  explicit UnitaryMatrix(ComplexMatrix m) : entries_(std::move(m)) {}
  ComplexMatrix entries_;
};

double unitarity_defect(const ComplexMatrix& m);

/// exp(A) for skew-Hermitian A via the Hermitian eigendecomposition of -iA.
ComplexMatrix expm_skew_hermitian(const ComplexMatrix& a);

/// M (M*M)^{-1/2}, the unitary factor of the polar decomposition of an
/// invertible M.
ComplexMatrix polar_unitary(const ComplexMatrix& m);

}  // namespace ubm
