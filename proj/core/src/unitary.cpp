#include "ubm/unitary.hpp"

#include <cmath>
#include <string>

#include "ubm/errors.hpp"

namespace ubm {

UnitaryMatrix UnitaryMatrix::identity(int n) {
  if (n < 1) fail(ErrorCode::invalid_dimension, "dimension must be >= 1, got " + std::to_string(n));
  return UnitaryMatrix(ComplexMatrix::Identity(n, n));
}

UnitaryMatrix UnitaryMatrix::from_matrix(ComplexMatrix m, double tol) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    fail(ErrorCode::invalid_dimension, "unitary matrix must be square and nonempty");
  }
  const double defect = ubm::unitarity_defect(m);
  if (!(defect <= tol)) {
    fail(ErrorCode::contract_violation,
         "matrix is not unitary: max|U*U - I| = " + std::to_string(defect));
  }
  return UnitaryMatrix(std::move(m));
}

double UnitaryMatrix::unitarity_defect() const { return ubm::unitarity_defect(entries_); }

double unitarity_defect(const ComplexMatrix& m) {
  ComplexMatrix g = m.adjoint() * m;
  g.diagonal().array() -= 1.0;
  return g.cwiseAbs().maxCoeff();
}

ComplexMatrix expm_skew_hermitian(const ComplexMatrix& a) {
  // a = i h with h Hermitian; exp(a) = V diag(e^{i lambda}) V*.
  const ComplexMatrix h = std::complex<double>(0.0, -1.0) * a;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  if (es.info() != Eigen::Success) {
    fail(ErrorCode::numeric, "Hermitian eigensolver failed in matrix exponential");
  }
  const Eigen::VectorXcd phases =
      es.eigenvalues().unaryExpr([](double l) { return std::polar(1.0, l); });
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

ComplexMatrix polar_unitary(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m.adjoint() * m);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    fail(ErrorCode::numeric, "polar projection of a singular matrix");
  }
  const Eigen::VectorXd inv_sqrt = es.eigenvalues().array().rsqrt();
  return m * (es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().adjoint());
}

}  // namespace ubm
