#include "mtdar/model.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unsupported/Eigen/KroneckerProduct>

#include "mtdar/errors.hpp"

namespace mtdar {

MtdArModel::MtdArModel(std::vector<double> weights, std::vector<int> signs, BindingDensity binding)
    : weights_(std::move(weights)), signs_(std::move(signs)), binding_(binding) {
  if (weights_.empty()) throw ContractViolation("model order must be at least 1");
  if (signs_.size() != weights_.size())
    throw ContractViolation("signs and weights must have the same length");
  for (int q : signs_)
    if (q != 1 && q != -1) throw ContractViolation("signs must be +1 or -1");
  for (double a : weights_)
    if (!std::isfinite(a) || a < 0.0) throw ContractViolation("weights must be nonnegative");
  if (!(weights_.back() > 0.0)) throw ContractViolation("the last weight must be positive");
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-8) throw ContractViolation("weights must sum to one");
  for (double& a : weights_) a /= total;
}

MtdArModel MtdArModel::with_signs(std::vector<int> signs) const {
  return MtdArModel(weights_, std::move(signs), binding_);
}

MtdArModel MtdArModel::with_binding(BindingDensity binding) const {
  return MtdArModel(weights_, signs_, binding);
}

namespace {

void check_history(const MtdArModel& model, std::span<const double> history) {
  if (history.size() != static_cast<std::size_t>(model.order()))
    throw ContractViolation("history length must equal the model order");
}

}  // namespace

double transition_density(const MtdArModel& model, Angle theta, std::span<const double> history) {
  check_history(model, history);
  const auto a = model.weights();
  const auto q = model.signs();
  double f = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    f += a[i] * model.binding().density(wrap_value(theta.value() - q[i] * history[i]));
  }
  return f;
}

Eigen::Vector2d conditional_trig_moment(const MtdArModel& model, int m,
                                        std::span<const double> history) {
  check_history(model, history);
  const Eigen::Matrix2d d = rotation_kernel(model.binding(), m);
  const auto a = model.weights();
  const auto q = model.signs();
  Eigen::Vector2d out = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Eigen::Vector2d u(std::cos(m * history[i]), std::sin(m * history[i]));
    out += a[i] * d * sign_matrix(q[i]) * u;
  }
  return out;
}

AngleSeries simulate(const MtdArModel& model, std::size_t n, std::size_t burn_in,
                     std::uint64_t seed) {
  if (n == 0) throw ContractViolation("simulate: n must be positive");
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto p = static_cast<std::size_t>(model.order());
  const auto a = model.weights();
  const auto q = model.signs();

  std::vector<double> cumulative(p);
  std::partial_sum(a.begin(), a.end(), cumulative.begin());
  cumulative.back() = 1.0;

  std::vector<double> path;
  path.reserve(p + burn_in + n);
  for (std::size_t i = 0; i < p; ++i) path.push_back(kTwoPi * unif(rng) - kPi);
  while (path.size() < p + burn_in + n) {
    const double u = unif(rng);
    std::size_t i = 0;
    // Zero-weight components have zero-width intervals and are never chosen.
    while (i + 1 < p && (u >= cumulative[i] || a[i] == 0.0)) ++i;
    const double eps = model.binding().draw(rng);
    const double lagged = path[path.size() - 1 - i];
    path.push_back(wrap_value(q[i] * lagged + eps));
  }
  return AngleSeries(std::vector<double>(path.end() - static_cast<std::ptrdiff_t>(n), path.end()));
}

Eigen::MatrixXd mean_companion(const MtdArModel& model) {
  const int p = model.order();
  const Eigen::Matrix2d d1 = rotation_kernel(model.binding(), 1);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * p, 2 * p);
  for (int i = 0; i < p; ++i)
    a.block<2, 2>(0, 2 * i) = model.weights()[i] * d1 * sign_matrix(model.signs()[i]);
  for (int i = 1; i < p; ++i) a.block<2, 2>(2 * i, 2 * (i - 1)).setIdentity();
  return a;
}

StationarityReport first_order_stationary(const MtdArModel& model) {
  StationarityReport r;
  r.spectral_radius = spectral_radius(mean_companion(model));
  r.stationary = r.spectral_radius < 1.0 - kStationarityMargin;
  return r;
}

Eigen::MatrixXd second_moment_companion(const MtdArModel& model) {
  const int p = model.order();
  const Eigen::Matrix2d d2 = rotation_kernel(model.binding(), 2);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(4 * p, 4 * p);
  for (int i = 0; i < p; ++i) {
    const Eigen::Matrix2d qi = sign_matrix(model.signs()[i]);
    const Eigen::Matrix2d dq = d2 * qi;
    c.block<4, 4>(0, 4 * i) = model.weights()[i] * Eigen::kroneckerProduct(qi, dq).eval();
  }
  for (int i = 1; i < p; ++i) c.block<4, 4>(4 * i, 4 * (i - 1)).setIdentity();
  return c;
}

Eigen::MatrixXd sqrt_weight_companion(const MtdArModel& model, bool with_d2) {
  const int p = model.order();
  const Eigen::Matrix2d lead =
      with_d2 ? rotation_kernel(model.binding(), 2) : Eigen::Matrix2d::Identity().eval();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2 * p, 2 * p);
  for (int i = 0; i < p; ++i)
    c.block<2, 2>(0, 2 * i) = std::sqrt(model.weights()[i]) * lead * sign_matrix(model.signs()[i]);
  for (int i = 1; i < p; ++i) c.block<2, 2>(2 * i, 2 * (i - 1)).setIdentity();
  return c;
}

SecondOrderReport second_order_stationary(const MtdArModel& model) {
  SecondOrderReport r;
  r.spectral_radius = spectral_radius(second_moment_companion(model));
  r.stationary = r.spectral_radius < 1.0 - kStationarityMargin;

  const Eigen::MatrixXd q = sqrt_weight_companion(model, false);
  const Eigen::MatrixXd dq = sqrt_weight_companion(model, true);
  // Eigenvalues of a Kronecker product are the pairwise products of the factor spectra.
  r.kronecker_radius = spectral_radius(q) * spectral_radius(dq);
  if (model.order() <= 3) {
    const Eigen::MatrixXd dense = Eigen::kroneckerProduct(q, dq).eval();
    r.kronecker_radius_dense = spectral_radius(dense);
  } else {
    r.kronecker_radius_dense = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

}  // namespace mtdar
