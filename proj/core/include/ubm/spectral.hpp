#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "ubm/unitary.hpp"

namespace ubm {

/// Angles closer than this are treated as one atom.
inline constexpr double kAngleMergeTol = 1e-12;

/// Maps any real angle to the principal branch (-pi, pi]; -pi goes to +pi.
double principal_angle(double theta);

/// Eigenvalue angles of a unitary matrix, sorted ascending in (-pi, pi].
class AngleSample {
 public:
  /// Wraps each value to the principal branch and sorts.
  static AngleSample from_angles(std::vector<double> angles);

  std::size_t size() const noexcept { return angles_.size(); }
  std::span<const double> angles() const noexcept { return angles_; }

 private:
  explicit AngleSample(std::vector<double> a) : angles_(std::move(a)) {}
  std::vector<double> angles_;
};

/// A finitely supported probability measure on the unit circle, stored as
/// strictly increasing atom angles in (-pi, pi] with positive weights summing
/// to one.
class CircleMeasure {
 public:
  /// Validates ordering, positivity, and total mass (within 1e-12); merges
  /// atoms closer than kAngleMergeTol.
  static CircleMeasure from_atoms(std::vector<double> atoms, std::vector<double> weights);
  /// Sorts, wraps, and merges arbitrary (angle, weight) pairs, then normalises.
  static CircleMeasure from_unsorted(std::vector<double> atoms, std::vector<double> weights);
  static CircleMeasure dirac(double angle);

  std::size_t size() const noexcept { return atoms_.size(); }
  std::span<const double> atoms() const noexcept { return atoms_; }
  std::span<const double> weights() const noexcept { return weights_; }

  double integrate(const std::function<double(double)>& f) const;
  /// int z^k dmu
  std::complex<double> moment(int k) const;
  CircleMeasure rotated(double angle) const;

 private:
  CircleMeasure(std::vector<double> a, std::vector<double> w)
      : atoms_(std::move(a)), weights_(std::move(w)) {}
  std::vector<double> atoms_;
  std::vector<double> weights_;
};

/// Principal arguments of the spectrum of U. Throws a numeric error (with the
/// unitarity defect and norm in the message) if the Schur iteration fails.
AngleSample eigenangles(const UnitaryMatrix& u);

/// Uniform weights 1/n on the sample; coincident angles are merged.
CircleMeasure empirical_measure(const AngleSample& sample);

/// Equal-weight mixture of the inputs. Throws invalid-input on an empty list.
CircleMeasure pool_measures(std::span<const CircleMeasure> measures);

/// (1/n) sum_j e^{i k theta_j}
std::complex<double> trace_moment(const AngleSample& sample, int k);

/// sqrt(n sum_j theta_j^2): distance from U to I in the bi-invariant metric
/// induced by <.,.>_N, with principal-branch angles.
double geodesic_distance_identity(const UnitaryMatrix& u);
double geodesic_distance_identity(const AngleSample& sample);

}  // namespace ubm
