#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mtdar/circular.hpp"

namespace mtdar {

/// rho * R(mu): the scaled rotation carried by the m-th trigonometric moment.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> scaled_rotation(Scalar rho, Scalar mu) {
  using std::cos;
  using std::sin;
  Eigen::Matrix<Scalar, 2, 2> d;
  d << rho * cos(mu), -rho * sin(mu), rho * sin(mu), rho * cos(mu);
  return d;
}

/// diag(1, q) with q in {-1, +1}.
template <typename Scalar = double>
Eigen::Matrix<Scalar, 2, 2> sign_matrix(int q) {
  Eigen::Matrix<Scalar, 2, 2> m = Eigen::Matrix<Scalar, 2, 2>::Identity();
  m(1, 1) = static_cast<Scalar>(q);
  return m;
}

/// D_m of the binding density g.
inline Eigen::Matrix2d rotation_kernel(const BindingDensity& g, int m) {
  const TrigMoment phi = g.trig_moment(m);
  return scaled_rotation(phi.rho, phi.mu);
}

/// Mixture-transition-distribution autoregression of order p on the circle:
/// f(theta_t | past) = sum_i a_i g(theta_t - q_i theta_{t-i}).
class MtdArModel {
 public:
  /// Weights must be nonnegative with a positive last entry and sum to one within 1e-8
  /// (they are renormalised); signs must be +-1 and have the same length.
  MtdArModel(std::vector<double> weights, std::vector<int> signs, BindingDensity binding);

  int order() const { return static_cast<int>(weights_.size()); }
  std::span<const double> weights() const { return weights_; }
  std::span<const int> signs() const { return signs_; }
  const BindingDensity& binding() const { return binding_; }
  bool zero_mean_direction() const { return binding_.mean_direction() == 0.0; }

  MtdArModel with_signs(std::vector<int> signs) const;
  MtdArModel with_binding(BindingDensity binding) const;

 private:
  std::vector<double> weights_;
  std::vector<int> signs_;
  BindingDensity binding_;
};

/// Transition density at theta given the p previous angles, most recent first.
double transition_density(const MtdArModel& model, Angle theta, std::span<const double> history);

/// E[(cos m Theta_t, sin m Theta_t) | history] = sum_i a_i D_m Q_i (cos m theta_{t-i}, sin m theta_{t-i}).
Eigen::Vector2d conditional_trig_moment(const MtdArModel& model, int m,
                                        std::span<const double> history);

inline constexpr std::size_t kDefaultBurnIn = 200;

/// Forward simulation. The first p angles are i.i.d. uniform (the stationary
/// marginal); the first burn_in generated values are discarded.
AngleSeries simulate(const MtdArModel& model, std::size_t n, std::size_t burn_in,
                     std::uint64_t seed);

/// 2p x 2p companion of the mean recursion, first block row a_i D_1 Q_i.
Eigen::MatrixXd mean_companion(const MtdArModel& model);

struct StationarityReport {
  bool stationary = false;
  double spectral_radius = 0.0;
};

inline constexpr double kStationarityMargin = 1e-12;

StationarityReport first_order_stationary(const MtdArModel& model);

struct SecondOrderReport {
  bool stationary = false;
  /// Spectral radius of the exact 4p x 4p second-moment recursion
  /// vec V_t = sum_i a_i (Q_i (x) D_2 Q_i) vec V_{t-i} + c. Decides `stationary`.
  double spectral_radius = 0.0;
  /// max |lambda_i nu_j| over the spectra of the sqrt(a)-weighted block companions
  /// calQ and calD calQ, i.e. the spectral radius of calQ (x) calD calQ.
  double kronecker_radius = 0.0;
  /// Same quantity from a dense 4p^2 x 4p^2 Kronecker product (p <= 3 only, else NaN).
  double kronecker_radius_dense = 0.0;
};

SecondOrderReport second_order_stationary(const MtdArModel& model);

/// Exact second-moment companion (4p x 4p).
Eigen::MatrixXd second_moment_companion(const MtdArModel& model);
/// calQ (blocks sqrt(a_i) Q_i) and calD calQ (first block row sqrt(a_i) D_2 Q_i).
Eigen::MatrixXd sqrt_weight_companion(const MtdArModel& model, bool with_d2);

}  // namespace mtdar
