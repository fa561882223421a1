#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mtdar/numeric.hpp"

namespace mtdar {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduces x modulo 2*pi into [-pi, pi). Throws std::domain_error for non-finite x.
double wrap_value(double x);

/// An angle in radians, always held in [-pi, pi).
class Angle {
 public:
  constexpr Angle() = default;
  explicit Angle(double radians) : value_(wrap_value(radians)) {}

  double value() const { return value_; }
  explicit operator double() const { return value_; }

  friend Angle operator+(Angle a, Angle b) { return Angle(a.value_ + b.value_); }
  friend Angle operator-(Angle a, Angle b) { return Angle(a.value_ - b.value_); }
  friend Angle operator-(Angle a) { return Angle(-a.value_); }
  friend bool operator==(Angle a, Angle b) = default;

 private:
  double value_ = 0.0;
};

inline Angle wrap(double x) { return Angle(x); }

/// Compact-parameter-space margins used by estimation.
struct ConcentrationBounds {
  static constexpr double delta_rho = 1e-4;
  static constexpr double delta_kappa = 1e-4;
  static constexpr double kappa_max = 500.0;
};

enum class Family { WrappedCauchy, VonMises };

std::string to_string(Family family);
Family family_from_string(const std::string& name);

/// m-th trigonometric moment phi_m = rho_m * exp(i mu_m).
struct TrigMoment {
  double rho = 0.0;
  double mu = 0.0;
};

/// I_m(kappa) / I_0(kappa) by Miller's backward recurrence (no overflow at large kappa).
double bessel_ratio(int m, double kappa);

/// log I_0(kappa), stable for kappa up to and beyond the estimation bound.
double log_bessel_i0(double kappa);

/// Solves I_1(kappa)/I_0(kappa) = r for kappa (0 <= r < 1).
double kappa_from_mean_resultant_length(double r);

/// Symmetric unimodal circular density used as the innovation of every mixture
/// component. Wrapped Cauchy is parameterised by rho in [0, 1), von Mises by
/// kappa >= 0; both may carry a mean direction for forward simulation.
class BindingDensity {
 public:
  static BindingDensity wrapped_cauchy(double rho, double mean_direction = 0.0);
  static BindingDensity von_mises(double kappa, double mean_direction = 0.0);
  static BindingDensity make(Family family, double concentration, double mean_direction = 0.0);

  Family family() const { return family_; }
  double concentration() const { return concentration_; }
  double mean_direction() const { return mean_; }

  /// Inside the compact estimation space ([delta, 1 - delta] or [delta_kappa, kappa_max]).
  bool admissible() const;

  double density(double theta) const;
  double log_density(double theta) const;
  TrigMoment trig_moment(int m) const;
  /// rho_1, the first mean resultant length.
  double mean_resultant_length() const { return trig_moment(1).rho; }

  /// One exact draw: inverse CDF (wrapped Cauchy) or Best-Fisher rejection (von Mises).
  double draw(Rng& rng) const;

 private:
  BindingDensity(Family family, double concentration, double mean);

  Family family_;
  double concentration_;
  double mean_;
  double log_norm_;  // log of the normalising constant
};

/// Ordered angles in radians, each wrapped into [-pi, pi).
class AngleSeries {
 public:
  AngleSeries() = default;
  explicit AngleSeries(std::vector<double> radians);

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  AngleSeries reversed() const;

  std::optional<double> origin;  ///< sampling metadata, not used by any analysis
  std::optional<double> step;

 private:
  std::vector<double> values_;
};

double density(const BindingDensity& g, Angle theta);
TrigMoment trig_moment(const BindingDensity& g, int m);

/// n i.i.d. draws from g, reproducible for a given seed.
AngleSeries sample(const BindingDensity& g, std::size_t n, std::uint64_t seed);

/// Length of the mean of exp(i m theta) over the series.
double sample_mean_resultant_length(std::span<const double> angles, int m = 1);

/// Rayleigh test of circular uniformity; returns the p-value.
double rayleigh_test_pvalue(std::span<const double> angles);

}  // namespace mtdar
