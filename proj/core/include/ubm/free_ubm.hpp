#pragma once

#include <optional>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ubm/transport.hpp"

namespace ubm {

using Rational = boost::multiprecision::cpp_rational;

/// Q_k(t) = sum_{j<k} (-t k)^j / (j+1)! * C(k-1, j), with exact coefficients.
/// The limiting spectral measure has moments int z^k dnu_t = Q_k(t) e^{-kt/2}.
struct QPolynomial {
  int k = 1;
  std::vector<Rational> coefficients;  ///< coefficient of t^j at index j

  Rational evaluate(const Rational& t) const;
};

QPolynomial q_polynomial(int k);

/// The exact rational value of a double (every finite double is dyadic).
Rational exact_rational(double x);

struct MomentEvaluation {
  double value = 0.0;
  double relative_error_bound = 0.0;
  bool exact_route = false;  ///< true when the rational path produced the value
};

/// e^{-kt/2} Q_k(t) in 100-digit arithmetic with a running error bound.
/// When cancellation defeats the bound the sum is redone in exact rationals;
/// for small dyadic t (t * 2^20 integral, t <= 64, k <= 64) the two routes
/// are also compared. Throws PrecisionLossError when neither route certifies
/// a relative error of 1e-10.
MomentEvaluation evaluate_moment(int k, double t);
inline double moment(int k, double t) { return evaluate_moment(k, t).value; }

/// m_1..m_{k_max} in double via the three-term Laguerre recurrence,
/// Q_k(t) = L^{(1)}_{k-1}(kt) / k, with the e^{-kt/2} factor spread over the
/// recurrence so nothing overflows. Absolute error ~1e-16; used for bulk
/// density reconstruction.
std::vector<double> moment_sequence(double t, int k_max);

enum class Smoothing { none, fejer };

const char* to_string(Smoothing smoothing) noexcept;

struct FreeModelOptions {
  int k_max = 0;                         ///< 0: 256 for t >= 1, 1024 below
  std::optional<Smoothing> smoothing;    ///< default: fejer for t < 4
  int grid_size = 0;                     ///< 0: max(4096, 4 k_max)
};

inline constexpr double kMinModelTime = 0.5;

struct QuantileResult {
  double angle = 0.0;
  double error_bound = 0.0;
};

struct SupportEstimate {
  double lower = 0.0;
  double upper = 0.0;
  bool full_circle = false;
};

/// Truncated Fourier model of the limiting measure nu_t:
/// density(theta) = (1/2pi)(1 + 2 sum_k w_k m_k cos k theta).
/// The CDF is the exact antiderivative of the truncated series; the density
/// and CDF are tabulated on a uniform grid at construction and the object is
/// immutable afterwards.
class FreeMeasureModel {
 public:
  /// Throws invalid-input for t < 0.5.
  static FreeMeasureModel build(double t, const FreeModelOptions& options = {});

  double t() const noexcept { return t_; }
  int k_max() const noexcept { return static_cast<int>(moments_.size()); }
  Smoothing smoothing() const noexcept { return smoothing_; }
  std::span<const double> moments() const noexcept { return moments_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> grid() const noexcept { return grid_; }
  std::span<const double> grid_density() const noexcept { return grid_density_; }
  std::span<const double> grid_cdf() const noexcept { return grid_cdf_; }

  double density(double theta) const;
  /// nu((-pi, theta])
  double cdf(double theta) const;
  /// Throws domain error for p outside (0, 1).
  QuantileResult quantile(double p) const;
  /// Quantile function on [0, 1], with q(0) = -pi and q(1) = pi.
  QuantileFunction quantile_function() const;
  ContinuousTarget as_target() const;

  /// Arc where the tabulated density exceeds `threshold`.
  SupportEstimate support(double threshold = 1e-4) const;

 private:
  FreeMeasureModel() = default;

  double t_ = 0.0;
  Smoothing smoothing_ = Smoothing::fejer;
  std::vector<double> moments_;
  std::vector<double> weights_;
  std::vector<double> coeffs_;  ///< w_k m_k
  std::vector<double> grid_;
  std::vector<double> grid_density_;
  std::vector<double> grid_cdf_;  ///< running maximum, so monotone
};

double density(const FreeMeasureModel& model, double theta);
QuantileResult cdf_quantile(const FreeMeasureModel& model, double p);

inline constexpr int kMinUniformComparisonAtoms = 1024;

/// Geodesic W1 between m-point discretizations of nu_t and the uniform
/// measure, both discretization errors folded into the upper bound. t >= 1.
TransportResult w1_to_uniform(double t, int m);

/// Geodesic W1 between m-point discretizations of nu_t and nu_s.
TransportResult w1_between_free(double t, double s, int m);

}  // namespace ubm
