#include "ubm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "ubm/errors.hpp"

namespace ubm {

namespace {

constexpr double kPi = std::numbers::pi;

// Sorted (angle, weight) pairs -> merged atoms.
CircleMeasure merge_sorted(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<double> atoms, weights;
  for (const auto& [a, w] : pairs) {
    if (!atoms.empty() && a - atoms.back() <= kAngleMergeTol) {
      weights.back() += w;
    } else {
      atoms.push_back(a);
      weights.push_back(w);
    }
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= total;
  return CircleMeasure::from_atoms(std::move(atoms), std::move(weights));
}

}  // namespace

double principal_angle(double theta) {
  double r = std::remainder(theta, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r = kPi;
  return r;
}

AngleSample AngleSample::from_angles(std::vector<double> angles) {
  for (double& a : angles) {
    if (!std::isfinite(a)) fail(ErrorCode::invalid_input, "non-finite angle");
    a = principal_angle(a);
  }
  std::sort(angles.begin(), angles.end());
  return AngleSample(std::move(angles));
}

CircleMeasure CircleMeasure::from_atoms(std::vector<double> atoms, std::vector<double> weights) {
  if (atoms.empty() || atoms.size() != weights.size()) {
    fail(ErrorCode::invalid_input, "circle measure needs matching, nonempty atoms and weights");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!(atoms[i] > -kPi && atoms[i] <= kPi)) {
      fail(ErrorCode::invalid_input, "atom outside (-pi, pi]: " + std::to_string(atoms[i]));
    }
    if (!(weights[i] > 0.0)) fail(ErrorCode::invalid_input, "atom weights must be positive");
    if (i > 0 && !(atoms[i] > atoms[i - 1])) {
      fail(ErrorCode::invalid_input, "atoms must be strictly increasing");
    }
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    fail(ErrorCode::invalid_input, "weights sum to " + std::to_string(total) + ", expected 1");
  }
  // Close-but-distinct atoms are merged so downstream code sees separated support.
  bool needs_merge = false;
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    if (atoms[i] - atoms[i - 1] <= kAngleMergeTol) needs_merge = true;
  }
  if (needs_merge) {
    std::vector<double> a, w;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (!a.empty() && atoms[i] - a.back() <= kAngleMergeTol) {
        w.back() += weights[i];
      } else {
        a.push_back(atoms[i]);
        w.push_back(weights[i]);
      }
    }
    return CircleMeasure(std::move(a), std::move(w));
  }
  return CircleMeasure(std::move(atoms), std::move(weights));
}

CircleMeasure CircleMeasure::from_unsorted(std::vector<double> atoms, std::vector<double> weights) {
  if (atoms.empty() || atoms.size() != weights.size()) {
    fail(ErrorCode::invalid_input, "circle measure needs matching, nonempty atoms and weights");
  }
  std::vector<std::pair<double, double>> pairs(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(atoms[i])) {
      fail(ErrorCode::invalid_input, "atoms must be finite with positive weight");
    }
    pairs[i] = {principal_angle(atoms[i]), weights[i]};
  }
  std::sort(pairs.begin(), pairs.end());
  return merge_sorted(pairs);
}

CircleMeasure CircleMeasure::dirac(double angle) {
  return CircleMeasure({principal_angle(angle)}, {1.0});
}

double CircleMeasure::integrate(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) s += weights_[i] * f(atoms_[i]);
  return s;
}

std::complex<double> CircleMeasure::moment(int k) const {
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) s += weights_[i] * std::polar(1.0, k * atoms_[i]);
  return s;
}

CircleMeasure CircleMeasure::rotated(double angle) const {
  std::vector<double> shifted(atoms_.begin(), atoms_.end());
  for (double& a : shifted) a += angle;
  return from_unsorted(std::move(shifted), weights_);
}

AngleSample eigenangles(const UnitaryMatrix& u) {
  // A unitary matrix is normal, so its complex Schur form is diagonal and the
  // eigenvalues are read off without forming Schur vectors.
  Eigen::ComplexSchur<ComplexMatrix> schur(u.matrix(), /*computeU=*/false);
  if (schur.info() != Eigen::Success) {
    fail(ErrorCode::numeric, "Schur iteration failed (n=" + std::to_string(u.dim()) +
                                 ", unitarity defect " + std::to_string(u.unitarity_defect()) +
                                 ", Frobenius norm " + std::to_string(u.matrix().norm()) + ")");
  }
  const auto& t = schur.matrixT();
  std::vector<double> angles(static_cast<std::size_t>(u.dim()));
  for (int j = 0; j < u.dim(); ++j) angles[static_cast<std::size_t>(j)] = std::arg(t(j, j));
  return AngleSample::from_angles(std::move(angles));
}

CircleMeasure empirical_measure(const AngleSample& sample) {
  const auto angles = sample.angles();
  if (angles.empty()) fail(ErrorCode::invalid_input, "empty angle sample");
  const double w = 1.0 / static_cast<double>(angles.size());
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(angles.size());
  for (double a : angles) pairs.emplace_back(a, w);
  return merge_sorted(pairs);
}

CircleMeasure pool_measures(std::span<const CircleMeasure> measures) {
  if (measures.empty()) fail(ErrorCode::invalid_input, "cannot pool an empty list of measures");
  if (measures.size() == 1) return measures.front();
  const double share = 1.0 / static_cast<double>(measures.size());
  std::size_t total = 0;
  for (const auto& m : measures) total += m.size();
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(total);
  for (const auto& m : measures) {
    for (std::size_t i = 0; i < m.size(); ++i) pairs.emplace_back(m.atoms()[i], share * m.weights()[i]);
  }
  std::sort(pairs.begin(), pairs.end());
  return merge_sorted(pairs);
}

std::complex<double> trace_moment(const AngleSample& sample, int k) {
  const auto angles = sample.angles();
  std::complex<double> s = 0.0;
  for (double a : angles) s += std::polar(1.0, k * a);
  return s / static_cast<double>(angles.size());
}

double geodesic_distance_identity(const AngleSample& sample) {
  double sq = 0.0;
  for (double a : sample.angles()) sq += a * a;
  return std::sqrt(static_cast<double>(sample.size()) * sq);
}

double geodesic_distance_identity(const UnitaryMatrix& u) {
  return geodesic_distance_identity(eigenangles(u));
}

}  // namespace ubm
