#pragma once

#include <complex>
#include <vector>

#include "mtdar/correlation.hpp"

namespace mtdar {

/// Spectra of the cos and sin component processes: AR(p) spectra with
/// variance factors chosen so each component has variance 1/2.
struct ComponentSpectra {
  double variance_factor_1 = 0.0;  ///< (1 - 2 rho_1 sum a_i gamma_{i,11}) / 2
  double variance_factor_2 = 0.0;  ///< (1 - 2 rho_1 sum q_i a_i gamma_{i,22}) / 2
  std::vector<double> poly_coeffs_1, poly_coeffs_2;  ///< phi_j(z) = sum_k coeffs[k] z^k, coeffs[0] = 1

  /// variance_factor_j / (2 pi |phi_j(exp(-i omega))|^2).
  double density(int component, double omega) const;
};

ComponentSpectra component_spectra(const MtdArModel& model);

enum class PoleOrigin { CosineRoot, ShiftedSineRoot, CosineReflection, ShiftedSineReflection };

struct Pole {
  std::complex<double> location;
  int order = 1;
  PoleOrigin origin = PoleOrigin::CosineRoot;
};

/// Poles of the contour integrand at one frequency. `inside` holds the
/// residue-carrying poles G_{1,i} and conj(G_{2,i}) e^{i omega}.
struct PoleSet {
  double omega = 0.0;
  std::vector<Pole> inside;
  std::vector<Pole> outside;
};

struct SpectralValue {
  double value = 0.0;
  bool fallback = false;          ///< pole collision: value came from convolution quadrature
  double min_pole_distance = 0.0; ///< smallest distance between inside poles of different origin
  double imag_residual = 0.0;     ///< imaginary part discarded from the residue sum
};

/// Spectral density of a zero-mean-direction MTD-AR model,
/// f(omega) = (1/2pi) sum_k exp(-i omega k) det Gamma_k.
/// Precomputes everything that does not depend on omega.
class SpectralDensity {
 public:
  explicit SpectralDensity(const MtdArModel& model);

  const ComponentSpectra& components() const { return components_; }
  PoleSet poles(double omega) const;

  /// Integral of f_1(lambda) f_2(omega - lambda) over one period.
  double convolution(double omega) const;
  /// Residue-theorem evaluation; collisions closer than kCollisionTolerance fall back to quadrature.
  SpectralValue residue(double omega) const;

  static constexpr double kCollisionTolerance = 1e-8;

 private:
  std::complex<double> residue_at(const Pole& pole, const PoleSet& set) const;

  int order_;
  ComponentSpectra components_;
  std::vector<RootCluster> roots_1_, roots_2_;
  bool degenerate_ = false;  // uniform binding: no finite poles
};

double spectral_density_convolution(const MtdArModel& model, double omega);
SpectralValue spectral_density_residue(const MtdArModel& model, double omega);

/// Integrals of exp(i k omega) f(omega) for k = 0..K by quadrature (should equal det Gamma_k).
std::vector<double> spectral_autocov_roundtrip(const MtdArModel& model, int max_lag);

/// Integral of f over [-pi, pi) (should be det Gamma_0 = 1/4).
double spectral_total_power(const MtdArModel& model);

struct LagWindow {
  enum class Kind { None, Bartlett };
  Kind kind = Kind::None;
  int lag = 0;  ///< truncation lag K for Bartlett

  static LagWindow none() { return {}; }
  static LagWindow bartlett(int lag) { return {Kind::Bartlett, lag}; }
};

struct SpectrumPoint {
  double omega = 0.0;
  double value = 0.0;
};

/// omega_j = 2 pi j / grid_size - pi, j = 0..grid_size-1.
std::vector<double> frequency_grid(int grid_size);

/// Circular periodogram (1/2pi) sum_{|k|<=K} w(k) det Gamma-hat_k exp(-i omega k).
/// With no window K = n - 1 and w = 1; Bartlett uses w(k) = 1 - |k|/(K+1).
std::vector<SpectrumPoint> periodogram(const AngleSeries& series, int grid_size, LagWindow window);

/// Cross-check estimator: grid convolution of the lag-window spectra of the
/// cos and sin series.
std::vector<SpectrumPoint> component_periodogram_convolution(const AngleSeries& series,
                                                             int grid_size, LagWindow window);

}  // namespace mtdar
