#include "mtdar/circular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mtdar/errors.hpp"

namespace mtdar {

double wrap_value(double x) {
  if (!std::isfinite(x)) throw std::domain_error("wrap: non-finite angle");
  double r = x - kTwoPi * std::floor((x + kPi) / kTwoPi);
  if (r >= kPi) r -= kTwoPi;
  if (r < -kPi) r += kTwoPi;
  return r;
}

std::string to_string(Family family) {
  return family == Family::WrappedCauchy ? "wrapped_cauchy" : "von_mises";
}

Family family_from_string(const std::string& name) {
  if (name == "wrapped_cauchy" || name == "wc") return Family::WrappedCauchy;
  if (name == "von_mises" || name == "vm") return Family::VonMises;
  throw std::invalid_argument("unknown binding family '" + name + "'");
}

namespace {

// I_{nu+1}(x) / I_nu(x) by the continued fraction 1/(2(nu+1)/x + 1/(2(nu+2)/x + ...)),
// evaluated with the modified Lentz algorithm.
double bessel_cf_ratio(int nu, double x) {
  constexpr double tiny = 1e-300;
  double f = tiny, c = tiny, d = 0.0;
  for (int j = 1; j < 1000000; ++j) {
    const double b = 2.0 * (nu + j) / x;
    d = b + d;
    if (d == 0.0) d = tiny;
    c = b + 1.0 / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) return f;
  }
  throw NumericError("Bessel continued fraction did not converge");
}

}  // namespace

double bessel_ratio(int m, double kappa) {
  if (m < 0) throw std::domain_error("bessel_ratio: negative order");
  if (m == 0) return 1.0;
  if (kappa < 0.0 || !std::isfinite(kappa)) throw std::domain_error("bessel_ratio: bad kappa");
  if (kappa == 0.0) return 0.0;
  // r_{m-1} from the continued fraction, then r_{nu-1} = 1 / (2 nu / x + r_nu) downward.
  double r = bessel_cf_ratio(m - 1, kappa);
  double product = r;
  for (int nu = m - 1; nu >= 1; --nu) {
    r = 1.0 / (2.0 * nu / kappa + r);
    product *= r;
  }
  return product;
}

double log_bessel_i0(double kappa) {
  if (kappa < 0.0 || !std::isfinite(kappa)) throw std::domain_error("log_bessel_i0: bad kappa");
  if (kappa < 600.0) return std::log(std::cyl_bessel_i(0.0, kappa));
  // Large-argument expansion of exp(-x) I_0(x).
  const double t = 1.0 / (8.0 * kappa);
  const double series = 1.0 + t * (1.0 + t * (9.0 / 2.0 + t * (225.0 / 6.0)));
  return kappa - 0.5 * std::log(kTwoPi * kappa) + std::log(series);
}

double kappa_from_mean_resultant_length(double r) {
  if (!(r >= 0.0 && r < 1.0)) throw std::domain_error("mean resultant length must lie in [0, 1)");
  if (r == 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (bessel_ratio(1, hi) < r) {
    hi *= 2.0;
    if (hi > 1e8) return hi;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (bessel_ratio(1, mid) < r ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

BindingDensity::BindingDensity(Family family, double concentration, double mean)
    : family_(family), concentration_(concentration), mean_(wrap_value(mean)) {
  if (!std::isfinite(concentration)) throw std::invalid_argument("concentration must be finite");
  if (family == Family::WrappedCauchy) {
    if (concentration < 0.0 || concentration >= 1.0)
      throw std::invalid_argument("wrapped Cauchy rho must lie in [0, 1)");
    log_norm_ = std::log1p(-concentration * concentration) - std::log(kTwoPi);
  } else {
    if (concentration < 0.0) throw std::invalid_argument("von Mises kappa must be >= 0");
    log_norm_ = -std::log(kTwoPi) - log_bessel_i0(concentration);
  }
}

BindingDensity BindingDensity::wrapped_cauchy(double rho, double mean_direction) {
  return BindingDensity(Family::WrappedCauchy, rho, mean_direction);
}

BindingDensity BindingDensity::von_mises(double kappa, double mean_direction) {
  return BindingDensity(Family::VonMises, kappa, mean_direction);
}

BindingDensity BindingDensity::make(Family family, double concentration, double mean_direction) {
  return BindingDensity(family, concentration, mean_direction);
}

bool BindingDensity::admissible() const {
  using B = ConcentrationBounds;
  if (family_ == Family::WrappedCauchy)
    return concentration_ >= B::delta_rho && concentration_ <= 1.0 - B::delta_rho;
  return concentration_ >= B::delta_kappa && concentration_ <= B::kappa_max;
}

double BindingDensity::log_density(double theta) const {
  const double c = std::cos(theta - mean_);
  if (family_ == Family::WrappedCauchy) {
    const double rho = concentration_;
    return log_norm_ - std::log(1.0 + rho * rho - 2.0 * rho * c);
  }
  return log_norm_ + concentration_ * c;
}

double BindingDensity::density(double theta) const { return std::exp(log_density(theta)); }

TrigMoment BindingDensity::trig_moment(int m) const {
  if (m <= 0) throw std::domain_error("trig_moment: order must be positive");
  const double rho = family_ == Family::WrappedCauchy ? std::pow(concentration_, m)
                                                      : bessel_ratio(m, concentration_);
  return {rho, wrap_value(m * mean_)};
}

double BindingDensity::draw(Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (family_ == Family::WrappedCauchy) {
    const double rho = concentration_;
    const double u = unif(rng);
    const double theta = 2.0 * std::atan((1.0 - rho) / (1.0 + rho) * std::tan(kPi * (u - 0.5)));
    return wrap_value(theta + mean_);
  }
  const double kappa = concentration_;
  if (kappa < 1e-8) return wrap_value(kTwoPi * unif(rng) - kPi + mean_);
  // Best & Fisher (1979).
  const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
  const double r = (1.0 + rho * rho) / (2.0 * rho);
  for (;;) {
    const double u1 = unif(rng), u2 = unif(rng), u3 = unif(rng);
    const double z = std::cos(kPi * u1);
    const double f = (1.0 + r * z) / (r + z);
    const double c = kappa * (r - f);
    if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
      const double theta = (u3 > 0.5 ? 1.0 : -1.0) * std::acos(std::clamp(f, -1.0, 1.0));
      return wrap_value(theta + mean_);
    }
  }
}

AngleSeries::AngleSeries(std::vector<double> radians) : values_(std::move(radians)) {
  if (values_.empty()) throw std::invalid_argument("an angle series needs at least one value");
  for (auto& v : values_) v = wrap_value(v);
}

AngleSeries AngleSeries::reversed() const {
  AngleSeries out(std::vector<double>(values_.rbegin(), values_.rend()));
  out.origin = origin;
  out.step = step;
  return out;
}

double density(const BindingDensity& g, Angle theta) { return g.density(theta.value()); }

TrigMoment trig_moment(const BindingDensity& g, int m) { return g.trig_moment(m); }

AngleSeries sample(const BindingDensity& g, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample: n must be positive");
  Rng rng = make_rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = g.draw(rng);
  return AngleSeries(std::move(out));
}

double sample_mean_resultant_length(std::span<const double> angles, int m) {
  if (angles.empty()) return 0.0;
  double c = 0.0, s = 0.0;
  for (double a : angles) {
    c += std::cos(m * a);
    s += std::sin(m * a);
  }
  const double n = static_cast<double>(angles.size());
  return std::hypot(c / n, s / n);
}

double rayleigh_test_pvalue(std::span<const double> angles) {
  const double n = static_cast<double>(angles.size());
  const double rbar = sample_mean_resultant_length(angles, 1);
  const double z = n * rbar * rbar;
  // Zar's small-sample correction of exp(-Z).
  const double p = std::exp(-z) * (1.0 + (2.0 * z - z * z) / (4.0 * n) -
                                   (24.0 * z - 132.0 * z * z + 76.0 * z * z * z -
                                    9.0 * z * z * z * z) / (288.0 * n * n));
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace mtdar
