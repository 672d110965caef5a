#include "ubm/free_ubm.hpp"

#include <algorithm>
#include <complex>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "ubm/errors.hpp"

namespace ubm {

namespace {

namespace mp = boost::multiprecision;
using Wide = mp::cpp_bin_float_100;
using BigInt = mp::cpp_int;

constexpr double kPi = std::numbers::pi;
constexpr double kFloatAcceptRelError = 1e-12;
constexpr int kExactRouteMaxOrder = 4096;

BigInt factorial(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  BigInt c = 1;
  for (int i = 1; i <= k; ++i) {
    c *= n - k + i;
    c /= i;
  }
  return c;
}

Wide to_wide(const Rational& r) {
  return Wide(mp::numerator(r)) / Wide(mp::denominator(r));
}

bool is_small_dyadic(double t) {
  const double scaled = std::ldexp(t, 20);
  return t <= 64.0 && scaled == std::floor(scaled);
}

}  // namespace

const char* to_string(Smoothing smoothing) noexcept {
  return smoothing == Smoothing::fejer ? "fejer" : "none";
}

Rational QPolynomial::evaluate(const Rational& t) const {
  Rational acc = 0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * t + *it;
  return acc;
}

QPolynomial q_polynomial(int k) {
  if (k < 1) fail(ErrorCode::invalid_order, "Q_k needs k >= 1, got " + std::to_string(k));
  QPolynomial q;
  q.k = k;
  q.coefficients.reserve(static_cast<std::size_t>(k));
  BigInt power = 1;  // (-k)^j
  for (int j = 0; j < k; ++j) {
    q.coefficients.emplace_back(power * binomial(k - 1, j), factorial(j + 1));
    power *= -k;
  }
  return q;
}

Rational exact_rational(double x) {
  if (!std::isfinite(x)) fail(ErrorCode::domain, "cannot represent a non-finite value exactly");
  if (x == 0.0) return 0;
  int exponent = 0;
  const double mantissa = std::frexp(x, &exponent);  // x = mantissa * 2^exponent
  const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  Rational r = BigInt(scaled);
  const int shift = exponent - 53;
  if (shift >= 0) {
    r *= BigInt(1) << shift;
  } else {
    r /= BigInt(1) << (-shift);
  }
  return r;
}

MomentEvaluation evaluate_moment(int k, double t) {
  if (k < 1) fail(ErrorCode::invalid_order, "moment order must be >= 1");
  if (!(t >= 0.0) || !std::isfinite(t)) fail(ErrorCode::domain, "moment time must be finite and >= 0");
  if (t == 0.0) return {1.0, 0.0, true};

  // Terms follow term_{j+1} = term_j * (-t k)(k-1-j) / ((j+1)(j+2)).
  const Wide tw(t);
  const Wide tk = tw * k;
  Wide term = 1, sum = 0, magnitude = 0;
  for (int j = 0; j < k; ++j) {
    sum += term;
    magnitude += mp::abs(term);
    term *= -tk * (k - 1 - j);
    term /= (j + 1) * (j + 2);
  }
  const Wide unit = std::numeric_limits<Wide>::epsilon();
  const Wide abs_bound = (4 * k + 8) * unit * magnitude;
  const Wide decay = mp::exp(-tk / 2);

  auto finish = [&](const Wide& q, double rel_bound, bool exact) {
    const double value = static_cast<double>(q * decay);
    return MomentEvaluation{value, rel_bound, exact};
  };

  const bool cross_check = is_small_dyadic(t) && k <= 64;
  const bool float_certified = sum != 0 && abs_bound <= kFloatAcceptRelError * mp::abs(sum);
  if (float_certified && !cross_check) {
    return finish(sum, static_cast<double>(abs_bound / mp::abs(sum)) + 1e-30, false);
  }

  if (k > kExactRouteMaxOrder) {
    const double achieved = sum == 0 ? HUGE_VAL : static_cast<double>(abs_bound / mp::abs(sum));
    throw PrecisionLossError("moment(k=" + std::to_string(k) + ", t=" + std::to_string(t) +
                                 ") lost precision; certified relative error " +
                                 std::to_string(achieved),
                             achieved);
  }
  const Rational exact_q = q_polynomial(k).evaluate(exact_rational(t));
  const Wide exact_wide = to_wide(exact_q);
  if (float_certified) {
    // Both routes ran: they must agree within the floating bound.
    if (mp::abs(exact_wide - sum) > abs_bound + 8 * unit * mp::abs(exact_wide)) {
      const double achieved = static_cast<double>(mp::abs(exact_wide - sum) / mp::abs(exact_wide));
      throw PrecisionLossError("extended-precision and exact moment routes disagree", achieved);
    }
  }
  // Only the final rounding to 100 digits and the exponential remain.
  return finish(exact_wide, exact_q == 0 ? 0.0 : 1e-90, true);
}

std::vector<double> moment_sequence(double t, int k_max) {
  if (k_max < 1) fail(ErrorCode::invalid_order, "k_max must be >= 1");
  if (!(t >= 0.0) || !std::isfinite(t)) fail(ErrorCode::domain, "time must be finite and >= 0");
  std::vector<double> m(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k) {
    const double x = k * t;
    if (k == 1) {
      m[0] = std::exp(-x / 2);
      continue;
    }
    // S_n = L_n^{(1)}(x) s^n with s^{k-1} = e^{-x/2}:
    // S_{n+1} = s ((2n + 2 - x) S_n - (n + 1) s S_{n-1}) / (n + 1).
    const double s = std::exp(-x / (2.0 * (k - 1)));
    double prev = 1.0;
    double cur = (2.0 - x) * s;
    for (int n = 1; n < k - 1; ++n) {
      const double next = s * ((2.0 * n + 2.0 - x) * cur - (n + 1.0) * s * prev) / (n + 1.0);
      prev = cur;
      cur = next;
    }
    m[static_cast<std::size_t>(k - 1)] = cur / k;
  }
  return m;
}

FreeMeasureModel FreeMeasureModel::build(double t, const FreeModelOptions& options) {
  if (!(t >= kMinModelTime) || !std::isfinite(t)) {
    fail(ErrorCode::invalid_input, "free measure model needs t >= 0.5, got " + std::to_string(t));
  }
  FreeMeasureModel model;
  model.t_ = t;
  const int k_max = options.k_max > 0 ? options.k_max : (t >= 1.0 ? 256 : 1024);
  model.smoothing_ = options.smoothing.value_or(t < 4.0 ? Smoothing::fejer : Smoothing::none);
  model.moments_ = moment_sequence(t, k_max);
  for (double mk : model.moments_) {
    if (!(std::abs(mk) <= 1.0 + 1e-12)) fail(ErrorCode::numeric, "moment outside [-1, 1]");
  }
  model.weights_.resize(model.moments_.size());
  model.coeffs_.resize(model.moments_.size());
  for (int k = 1; k <= k_max; ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    model.weights_[i] = model.smoothing_ == Smoothing::fejer ? 1.0 - k / (k_max + 1.0) : 1.0;
    model.coeffs_[i] = model.weights_[i] * model.moments_[i];
  }

  // Tabulate on theta_i = -pi + 2 pi i / G. Since k theta_i = -k pi + 2 pi (k i mod G) / G,
  // every trigonometric value is a table lookup with sign (-1)^k.
  const int g = options.grid_size > 0 ? options.grid_size : std::max(4096, 4 * k_max);
  std::vector<double> cos_table(static_cast<std::size_t>(g)), sin_table(static_cast<std::size_t>(g));
  for (int r = 0; r < g; ++r) {
    cos_table[static_cast<std::size_t>(r)] = std::cos(2.0 * kPi * r / g);
    sin_table[static_cast<std::size_t>(r)] = std::sin(2.0 * kPi * r / g);
  }
  model.grid_.resize(static_cast<std::size_t>(g) + 1);
  model.grid_density_.resize(model.grid_.size());
  model.grid_cdf_.resize(model.grid_.size());
  for (int i = 0; i <= g; ++i) {
    double cos_sum = 0.0, sin_sum = 0.0;
    for (int k = 1; k <= k_max; ++k) {
      const auto r = static_cast<std::size_t>((static_cast<long long>(k) * i) % g);
      const double c = (k % 2 == 0 ? 1.0 : -1.0) * model.coeffs_[static_cast<std::size_t>(k - 1)];
      cos_sum += c * cos_table[r];
      sin_sum += c * sin_table[r] / k;
    }
    const double theta = -kPi + 2.0 * kPi * i / g;
    const auto idx = static_cast<std::size_t>(i);
    model.grid_[idx] = theta;
    model.grid_density_[idx] = (1.0 + 2.0 * cos_sum) / (2.0 * kPi);
    model.grid_cdf_[idx] = (theta + kPi) / (2.0 * kPi) + sin_sum / kPi;
  }
  model.grid_.back() = kPi;
  model.grid_cdf_.front() = 0.0;
  model.grid_cdf_.back() = 1.0;
  for (std::size_t i = 1; i < model.grid_cdf_.size(); ++i) {
    model.grid_cdf_[i] = std::max(model.grid_cdf_[i], model.grid_cdf_[i - 1]);
  }
  return model;
}

double FreeMeasureModel::density(double theta) const {
  // e^{ik theta} by repeated rotation; drift is O(k eps), far below 1e-12.
  const std::complex<double> step = std::polar(1.0, theta);
  std::complex<double> z = step;
  double s = 0.0;
  for (double c : coeffs_) {
    s += c * z.real();
    z *= step;
  }
  return (1.0 + 2.0 * s) / (2.0 * kPi);
}

double FreeMeasureModel::cdf(double theta) const {
  if (theta <= -kPi) return 0.0;
  if (theta >= kPi) return 1.0;
  const std::complex<double> step = std::polar(1.0, theta);
  std::complex<double> z = step;
  double s = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    s += coeffs_[i] * z.imag() / static_cast<double>(i + 1);
    z *= step;
  }
  return (theta + kPi) / (2.0 * kPi) + s / kPi;
}

QuantileResult FreeMeasureModel::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::domain, "quantile level must lie in (0, 1)");
  // Bracketing cell of the tabulated (monotone) CDF.
  const auto it = std::lower_bound(grid_cdf_.begin(), grid_cdf_.end(), p);
  std::size_t hi = static_cast<std::size_t>(std::distance(grid_cdf_.begin(), it));
  hi = std::clamp<std::size_t>(hi, 1, grid_.size() - 1);
  const std::size_t lo = hi - 1;
  double a = grid_[lo], b = grid_[hi];
  const double fa = grid_cdf_[lo], fb = grid_cdf_[hi];
  double x = fb > fa ? a + (b - a) * (p - fa) / (fb - fa) : 0.5 * (a + b);

  // Safeguarded Newton on the exact antiderivative.
  double residual = cdf(x) - p;
  for (int iter = 0; iter < 100 && std::abs(residual) > 1e-15 && b - a > 1e-15; ++iter) {
    if (residual > 0.0) {
      b = x;
    } else {
      a = x;
    }
    const double rho = density(x);
    double next = rho > 0.0 ? x - residual / rho : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    x = next;
    residual = cdf(x) - p;
  }
  const double rho_min = std::min(grid_density_[lo], grid_density_[hi]);
  double error = grid_[hi] - grid_[lo];
  if (rho_min > 0.0) error = std::min(error, std::abs(residual) / rho_min + 1e-15);
  return {std::clamp(x, -kPi, kPi), error};
}

QuantileFunction FreeMeasureModel::quantile_function() const {
  auto self = std::make_shared<const FreeMeasureModel>(*this);
  return [self](double p) {
    if (p <= 0.0) return -kPi;
    if (p >= 1.0) return kPi;
    return self->quantile(p).angle;
  };
}

ContinuousTarget FreeMeasureModel::as_target() const {
  return {"free_t=" + std::to_string(t_), quantile_function()};
}

SupportEstimate FreeMeasureModel::support(double threshold) const {
  SupportEstimate s;
  bool found = false;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (grid_density_[i] > threshold) {
      if (!found) s.lower = grid_[i];
      s.upper = grid_[i];
      found = true;
    }
  }
  s.full_circle = found && grid_density_.front() > threshold && grid_density_.back() > threshold;
  if (s.full_circle) {
    s.lower = -kPi;
    s.upper = kPi;
  }
  return s;
}

double density(const FreeMeasureModel& model, double theta) { return model.density(theta); }

QuantileResult cdf_quantile(const FreeMeasureModel& model, double p) { return model.quantile(p); }

TransportResult w1_to_uniform(double t, int m) {
  if (!(t >= 1.0)) fail(ErrorCode::domain, "w1_to_uniform is defined for t >= 1");
  if (m < kMinUniformComparisonAtoms) {
    fail(ErrorCode::invalid_input, "w1_to_uniform needs at least 1024 atoms");
  }
  const FreeMeasureModel model = FreeMeasureModel::build(t);
  const Discretization free_atoms = quantile_discretize(model.quantile_function(), m);
  const Discretization uniform_atoms = quantile_discretize(uniform_target().quantile, m);
  TransportResult r = w1_discrete(free_atoms.measure, uniform_atoms.measure, CostKind::geodesic);
  r.discretization_error = free_atoms.discretization_error + uniform_atoms.discretization_error;
  r.upper += r.discretization_error;
  return r;
}

TransportResult w1_between_free(double t, double s, int m) {
  const FreeMeasureModel a = FreeMeasureModel::build(t);
  const FreeMeasureModel b = FreeMeasureModel::build(s);
  const Discretization da = quantile_discretize(a.quantile_function(), m);
  const Discretization db = quantile_discretize(b.quantile_function(), m);
  TransportResult r = w1_discrete(da.measure, db.measure, CostKind::geodesic);
  r.discretization_error = da.discretization_error + db.discretization_error;
  r.upper += r.discretization_error;
  return r;
}

}  // namespace ubm
