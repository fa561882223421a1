#include "mtdar/spectrum.hpp"

#include <cmath>
#include <limits>

#include "mtdar/errors.hpp"

namespace mtdar {

double ComponentSpectra::density(int component, double omega) const {
  const auto& c = component == 1 ? poly_coeffs_1 : poly_coeffs_2;
  const double vf = component == 1 ? variance_factor_1 : variance_factor_2;
  std::complex<double> phi = 0.0;
  const std::complex<double> z = std::polar(1.0, -omega);
  for (std::size_t k = c.size(); k-- > 0;) phi = phi * z + c[k];
  return vf / (kTwoPi * std::norm(phi));
}

ComponentSpectra component_spectra(const MtdArModel& model) {
  if (!model.zero_mean_direction())
    throw UnsupportedConfiguration("spectral density requires zero binding mean direction");
  const int p = model.order();
  const auto seq = gamma_sequence_diagonal(model, p);
  const auto c1 = component_ar_coefficients(model, 1);
  const auto c2 = component_ar_coefficients(model, 2);
  ComponentSpectra out;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 1; i <= p; ++i) {
    s1 += c1[i - 1] * seq[i](0, 0);
    s2 += c2[i - 1] * seq[i](1, 1);
  }
  out.variance_factor_1 = (1.0 - 2.0 * s1) / 2.0;
  out.variance_factor_2 = (1.0 - 2.0 * s2) / 2.0;
  out.poly_coeffs_1.push_back(1.0);
  out.poly_coeffs_2.push_back(1.0);
  for (int i = 0; i < p; ++i) {
    out.poly_coeffs_1.push_back(-c1[i]);
    out.poly_coeffs_2.push_back(-c2[i]);
  }
  return out;
}

SpectralDensity::SpectralDensity(const MtdArModel& model)
    : order_(model.order()), components_(component_spectra(model)) {
  const double rho1 = model.binding().mean_resultant_length();
  if (rho1 <= 0.0) {
    degenerate_ = true;
    return;
  }
  auto reciprocal_roots = [](const std::vector<double>& poly) {
    // G are the roots of z^p + poly[1] z^{p-1} + ... + poly[p].
    std::vector<double> lower(poly.begin() + 1, poly.end());
    return cluster_roots(monic_roots(lower), 1e-7);
  };
  roots_1_ = reciprocal_roots(components_.poly_coeffs_1);
  roots_2_ = reciprocal_roots(components_.poly_coeffs_2);
}

PoleSet SpectralDensity::poles(double omega) const {
  PoleSet set;
  set.omega = omega;
  const std::complex<double> shift = std::polar(1.0, omega);
  for (const auto& r : roots_1_) {
    set.inside.push_back({r.value, r.multiplicity, PoleOrigin::CosineRoot});
    set.outside.push_back({1.0 / std::conj(r.value), r.multiplicity, PoleOrigin::CosineReflection});
  }
  for (const auto& r : roots_2_) {
    set.inside.push_back({std::conj(r.value) * shift, r.multiplicity, PoleOrigin::ShiftedSineRoot});
    set.outside.push_back({1.0 / (r.value / shift), r.multiplicity, PoleOrigin::ShiftedSineReflection});
  }
  return set;
}

double SpectralDensity::convolution(double omega) const {
  const auto integrand = [&](double lambda) {
    return components_.density(1, lambda) * components_.density(2, omega - lambda);
  };
  const auto q = periodic_trapezoid(integrand, 1e-16, 1e-13);
  if (!q.converged)
    throw NumericError("spectral convolution did not converge (achieved " +
                       std::to_string(q.error_estimate) + ")");
  return q.value;
}

std::complex<double> SpectralDensity::residue_at(const Pole& pole, const PoleSet& set) const {
  // v(z) = z^{2p-1} / prod_{other poles} (z - o)^{d_o}; residue = v^{(d-1)}(c) / (d-1)!.
  const std::complex<double> c = pole.location;
  const int d = pole.order;
  const int numerator_power = 2 * order_ - 1;
  std::vector<const Pole*> others;
  for (const auto& o : set.inside)
    if (&o != &pole) others.push_back(&o);
  for (const auto& o : set.outside) others.push_back(&o);

  std::complex<double> v = std::pow(c, numerator_power);
  for (const Pole* o : others) v /= std::pow(c - o->location, o->order);
  if (d == 1) return v;

  // Logarithmic derivative w = v'/v and its derivatives at c:
  // w^{(k)}(c) = (-1)^k k! [ (2p-1) c^{-(k+1)} - sum_o d_o (c - o)^{-(k+1)} ].
  std::vector<std::complex<double>> w(static_cast<std::size_t>(d - 1));
  double factorial = 1.0;
  for (int k = 0; k < d - 1; ++k) {
    if (k > 0) factorial *= k;
    std::complex<double> bracket = static_cast<double>(numerator_power) * std::pow(c, -(k + 1));
    for (const Pole* o : others)
      bracket -= static_cast<double>(o->order) * std::pow(c - o->location, -(k + 1));
    w[k] = (k % 2 == 0 ? 1.0 : -1.0) * factorial * bracket;
  }
  // v^{(n)} = sum_{k=0}^{n-1} C(n-1, k) v^{(n-1-k)} w^{(k)}.
  std::vector<std::complex<double>> deriv(static_cast<std::size_t>(d));
  deriv[0] = v;
  for (int n = 1; n < d; ++n) {
    std::complex<double> sum = 0.0;
    double binom = 1.0;
    for (int k = 0; k <= n - 1; ++k) {
      sum += binom * deriv[n - 1 - k] * w[k];
      binom = binom * (n - 1 - k) / (k + 1);
    }
    deriv[n] = sum;
  }
  double fact = 1.0;
  for (int k = 2; k < d; ++k) fact *= k;
  return deriv[d - 1] / fact;
}

SpectralValue SpectralDensity::residue(double omega) const {
  SpectralValue out;
  if (degenerate_) {
    out.value = convolution(omega);
    out.fallback = true;
    return out;
  }
  const PoleSet set = poles(omega);
  out.min_pole_distance = std::numeric_limits<double>::infinity();
  for (const auto& a : set.inside)
    for (const auto& b : set.inside)
      if (a.origin == PoleOrigin::CosineRoot && b.origin == PoleOrigin::ShiftedSineRoot)
        out.min_pole_distance = std::min(out.min_pole_distance, std::abs(a.location - b.location));
  if (out.min_pole_distance < kCollisionTolerance) {
    out.value = convolution(omega);
    out.fallback = true;
    return out;
  }

  std::complex<double> denominator = 8.0 * kPi;
  for (const auto& r : roots_1_) denominator *= std::pow(-std::conj(r.value), r.multiplicity);
  const std::complex<double> shift = std::polar(1.0, -omega);
  for (const auto& r : roots_2_) denominator *= std::pow(-r.value * shift, r.multiplicity);
  const double numerator = 4.0 * components_.variance_factor_1 * components_.variance_factor_2;

  std::complex<double> sum = 0.0;
  for (const auto& pole : set.inside) sum += residue_at(pole, set);
  const std::complex<double> f = numerator / denominator * sum;
  out.value = f.real();
  out.imag_residual = f.imag();
  return out;
}

double spectral_density_convolution(const MtdArModel& model, double omega) {
  return SpectralDensity(model).convolution(omega);
}

SpectralValue spectral_density_residue(const MtdArModel& model, double omega) {
  return SpectralDensity(model).residue(omega);
}

std::vector<double> spectral_autocov_roundtrip(const MtdArModel& model, int max_lag) {
  if (max_lag < 0) throw ContractViolation("max_lag must be nonnegative");
  const SpectralDensity sd(model);
  std::vector<double> out;
  for (int k = 0; k <= max_lag; ++k) {
    // f is even, so the sine part integrates to zero.
    const auto q = periodic_trapezoid(
        [&](double w) { return std::cos(k * w) * sd.residue(w).value; }, 1e-15, 1e-12, 128);
    if (!q.converged) throw NumericError("round-trip quadrature did not converge");
    out.push_back(q.value);
  }
  return out;
}

double spectral_total_power(const MtdArModel& model) { return spectral_autocov_roundtrip(model, 0)[0]; }

std::vector<double> frequency_grid(int grid_size) {
  std::vector<double> grid(static_cast<std::size_t>(grid_size));
  for (int j = 0; j < grid_size; ++j) grid[j] = kTwoPi * j / grid_size - kPi;
  return grid;
}

namespace {

int window_lag(const AngleSeries& series, int grid_size, LagWindow window) {
  const int n = static_cast<int>(series.size());
  if (grid_size < 8) throw ContractViolation("periodogram grid_size must be >= 8");
  if (n < 2) throw ContractViolation("series too short for a periodogram");
  if (window.kind == LagWindow::Kind::None) return n - 1;
  if (window.lag < 0 || window.lag >= n) throw ContractViolation("Bartlett lag must satisfy 0 <= K < n");
  return window.lag;
}

double lag_weight(LagWindow window, int k) {
  return window.kind == LagWindow::Kind::Bartlett ? 1.0 - static_cast<double>(k) / (window.lag + 1)
                                                  : 1.0;
}

// (1/2pi) [c_0 + 2 sum_k w(k) c_k cos(omega k)] on the grid.
std::vector<SpectrumPoint> lag_window_transform(const std::vector<double>& acv, int grid_size,
                                                LagWindow window) {
  std::vector<SpectrumPoint> out;
  for (double w : frequency_grid(grid_size)) {
    double sum = acv[0];
    for (std::size_t k = 1; k < acv.size(); ++k)
      sum += 2.0 * lag_weight(window, static_cast<int>(k)) * acv[k] * std::cos(w * static_cast<double>(k));
    out.push_back({w, sum / kTwoPi});
  }
  return out;
}

}  // namespace

std::vector<SpectrumPoint> periodogram(const AngleSeries& series, int grid_size, LagWindow window) {
  const int lag = window_lag(series, grid_size, window);
  return lag_window_transform(sample_gamma(series, lag).determinants(), grid_size, window);
}

std::vector<SpectrumPoint> component_periodogram_convolution(const AngleSeries& series,
                                                             int grid_size, LagWindow window) {
  const int lag = window_lag(series, grid_size, window);
  const auto g = sample_gamma(series, lag);
  std::vector<double> acv_c, acv_s;
  for (int k = 0; k <= lag; ++k) {
    acv_c.push_back(g[k](0, 0));
    acv_s.push_back(g[k](1, 1));
  }
  const auto fc = lag_window_transform(acv_c, grid_size, window);
  const auto fs = lag_window_transform(acv_s, grid_size, window);
  std::vector<SpectrumPoint> out;
  const double h = kTwoPi / grid_size;
  for (int j = 0; j < grid_size; ++j) {
    // omega_j - lambda_l = omega_{j-l} - pi on the grid, i.e. index (j - l + grid/2) mod grid.
    double sum = 0.0;
    for (int l = 0; l < grid_size; ++l) {
      const int idx = ((j - l + grid_size / 2) % grid_size + grid_size) % grid_size;
      sum += fc[l].value * fs[idx].value;
    }
    out.push_back({fc[j].omega, sum * h});
  }
  return out;
}

}  // namespace mtdar
