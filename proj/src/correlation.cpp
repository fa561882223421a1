#include "mtdar/correlation.hpp"

#include <cmath>
#include <limits>

#include "mtdar/errors.hpp"

namespace mtdar {

std::vector<double> LagCovSequence::determinants() const {
  std::vector<double> out;
  out.reserve(matrices.size());
  for (const auto& m : matrices) out.push_back(m.determinant());
  return out;
}

namespace {

void require_stationary(const MtdArModel& model) {
  if (!first_order_stationary(model).stationary)
    throw NumericError("model is not first-order stationary");
}

void extend_by_recursion(const MtdArModel& model, LagCovSequence& seq, int max_lag) {
  const int p = model.order();
  const Eigen::Matrix2d d1 = rotation_kernel(model.binding(), 1);
  std::vector<Eigen::Matrix2d> mi;
  for (int i = 0; i < p; ++i) mi.push_back(model.weights()[i] * d1 * sign_matrix(model.signs()[i]));
  while (seq.max_lag() < max_lag) {
    const int k = seq.max_lag() + 1;
    Eigen::Matrix2d next = Eigen::Matrix2d::Zero();
    for (int i = 1; i <= p; ++i) next += mi[i - 1] * seq.at(k - i);
    seq.matrices.push_back(next);
  }
  seq.matrices.resize(static_cast<std::size_t>(max_lag) + 1);
}

}  // namespace

LagCovSequence gamma_sequence_block(const MtdArModel& model, int max_lag) {
  if (max_lag < 0) throw ContractViolation("max_lag must be nonnegative");
  require_stationary(model);
  const int p = model.order();
  LagCovSequence seq;
  seq.matrices.push_back(0.5 * Eigen::Matrix2d::Identity());

  if (p > 1) {
    const Eigen::Matrix2d d1 = rotation_kernel(model.binding(), 1);
    // vec(X^T) = T vec(X) for 2x2 column-major vec.
    Eigen::Matrix4d t = Eigen::Matrix4d::Zero();
    t(0, 0) = t(1, 2) = t(2, 1) = t(3, 3) = 1.0;
    const int m = 4 * (p - 1);
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (int k = 1; k <= p - 1; ++k) {
      for (int i = 1; i <= p; ++i) {
        const Eigen::Matrix2d mi = model.weights()[i - 1] * d1 * sign_matrix(model.signs()[i - 1]);
        Eigen::Matrix4d left = Eigen::Matrix4d::Zero();  // I_2 (x) M_i
        left.block<2, 2>(0, 0) = mi;
        left.block<2, 2>(2, 2) = mi;
        const int j = k - i;
        if (j == 0) {
          const Eigen::Matrix2d known = mi * seq[0];
          rhs.segment<4>(4 * (k - 1)) += Eigen::Map<const Eigen::Vector4d>(known.data());
        } else if (j > 0) {
          lhs.block<4, 4>(4 * (k - 1), 4 * (j - 1)) -= left;
        } else {
          lhs.block<4, 4>(4 * (k - 1), 4 * (-j - 1)) -= left * t;
        }
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
    if (!lu.isInvertible())
      throw NumericError("singular initial-lag system for model of order " + std::to_string(p));
    const Eigen::VectorXd x = lu.solve(rhs);
    for (int k = 1; k <= p - 1; ++k) {
      Eigen::Matrix2d g;
      g = Eigen::Map<const Eigen::Matrix2d>(x.data() + 4 * (k - 1));
      seq.matrices.push_back(g);
    }
  }
  extend_by_recursion(model, seq, max_lag);
  return seq;
}

std::vector<double> component_ar_coefficients(const MtdArModel& model, int component) {
  if (component != 1 && component != 2) throw ContractViolation("component must be 1 or 2");
  const double rho1 = model.binding().mean_resultant_length();
  std::vector<double> c(static_cast<std::size_t>(model.order()));
  for (int i = 0; i < model.order(); ++i)
    c[i] = (component == 1 ? 1.0 : model.signs()[i]) * model.weights()[i] * rho1;
  return c;
}

namespace {

// Autocovariances gamma_0..gamma_K of a scalar AR(p) with gamma_0 = 1/2.
std::vector<double> scalar_autocovariances(const std::vector<double>& c, int max_lag) {
  const int p = static_cast<int>(c.size());
  std::vector<double> g(static_cast<std::size_t>(std::max(max_lag, p - 1)) + 1, 0.0);
  g[0] = 0.5;
  if (p > 1) {
    const int m = p - 1;
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (int k = 1; k <= m; ++k) {
      for (int i = 1; i <= p; ++i) {
        const int j = std::abs(k - i);
        if (j == 0)
          rhs(k - 1) += c[i - 1] * g[0];
        else
          lhs(k - 1, j - 1) -= c[i - 1];
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
    if (!lu.isInvertible()) throw NumericError("singular Yule-Walker system");
    const Eigen::VectorXd x = lu.solve(rhs);
    for (int k = 1; k <= m; ++k) g[k] = x(k - 1);
  }
  for (int k = p; k <= max_lag; ++k) {
    double v = 0.0;
    for (int i = 1; i <= p; ++i) v += c[i - 1] * g[std::abs(k - i)];
    g[k] = v;
  }
  g.resize(static_cast<std::size_t>(max_lag) + 1);
  return g;
}

}  // namespace

LagCovSequence gamma_sequence_diagonal(const MtdArModel& model, int max_lag) {
  if (max_lag < 0) throw ContractViolation("max_lag must be nonnegative");
  if (!model.zero_mean_direction())
    throw UnsupportedConfiguration("diagonal route requires zero binding mean direction");
  require_stationary(model);
  const auto g11 = scalar_autocovariances(component_ar_coefficients(model, 1), max_lag);
  const auto g22 = scalar_autocovariances(component_ar_coefficients(model, 2), max_lag);
  LagCovSequence seq;
  for (int k = 0; k <= max_lag; ++k) {
    Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
    g(0, 0) = g11[k];
    g(1, 1) = g22[k];
    seq.matrices.push_back(g);
  }
  return seq;
}

LagCovSequence gamma_sequence(const MtdArModel& model, int max_lag) {
  return model.zero_mean_direction() ? gamma_sequence_diagonal(model, max_lag)
                                     : gamma_sequence_block(model, max_lag);
}

std::vector<double> cacf(const MtdArModel& model, int max_lag) {
  const auto dets = gamma_sequence(model, max_lag).determinants();
  std::vector<double> r(dets.size());
  for (std::size_t k = 0; k < dets.size(); ++k) r[k] = dets[k] / dets[0];
  return r;
}

std::complex<double> CacfClosedForm::component(int j, int k) const {
  const auto& roots = j == 1 ? roots_1 : roots_2;
  const auto& coeffs = j == 1 ? coeffs_1 : coeffs_2;
  std::complex<double> sum = 0.0;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    std::complex<double> poly = 0.0;
    for (std::size_t l = coeffs[i].size(); l-- > 0;) poly = poly * static_cast<double>(k) + coeffs[i][l];
    sum += std::pow(roots[i].value, k) * poly;
  }
  return sum;
}

namespace {

void fit_component(const std::vector<double>& c, const std::vector<double>& targets,
                   std::vector<RootCluster>& roots,
                   std::vector<std::vector<std::complex<double>>>& coeffs, bool& confluent,
                   bool& ambiguous) {
  const int p = static_cast<int>(c.size());
  std::vector<double> lower(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) lower[i] = -c[i];
  roots = cluster_roots(monic_roots(lower), 1e-7);
  for (std::size_t a = 0; a < roots.size(); ++a) {
    if (roots[a].multiplicity > 1) confluent = true;
    if (std::abs(roots[a].value) == 0.0) throw NumericError("zero characteristic root");
    for (std::size_t b = a + 1; b < roots.size(); ++b)
      if (std::abs(roots[a].value - roots[b].value) < 1e-4) ambiguous = true;
  }
  // Confluent Vandermonde system matched at lags 1..p.
  Eigen::MatrixXcd v(p, p);
  Eigen::VectorXcd rhs(p);
  for (int k = 1; k <= p; ++k) {
    int col = 0;
    for (const auto& r : roots) {
      const std::complex<double> gk = std::pow(r.value, k);
      double kl = 1.0;
      for (int l = 0; l < r.multiplicity; ++l, ++col) {
        v(k - 1, col) = kl * gk;
        kl *= k;
      }
    }
    rhs(k - 1) = targets[static_cast<std::size_t>(k)];
  }
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(v);
  if (!lu.isInvertible()) throw NumericError("singular closed-form coefficient system");
  const Eigen::VectorXcd x = lu.solve(rhs);
  coeffs.clear();
  int col = 0;
  for (const auto& r : roots) {
    std::vector<std::complex<double>> a;
    for (int l = 0; l < r.multiplicity; ++l) a.push_back(x(col++));
    coeffs.push_back(std::move(a));
  }
}

}  // namespace

CacfClosedForm cacf_closed_form(const MtdArModel& model) {
  if (!model.zero_mean_direction())
    throw UnsupportedConfiguration("closed-form CACF requires zero binding mean direction");
  if (model.binding().mean_resultant_length() <= 0.0)
    throw NumericError("closed-form CACF is undefined for a uniform binding density");
  const int p = model.order();
  const auto seq = gamma_sequence_diagonal(model, p);
  std::vector<double> t1, t2;
  for (int k = 0; k <= p; ++k) {
    t1.push_back(2.0 * seq[k](0, 0));
    t2.push_back(2.0 * seq[k](1, 1));
  }
  CacfClosedForm out;
  fit_component(component_ar_coefficients(model, 1), t1, out.roots_1, out.coeffs_1, out.confluent,
                out.ambiguous);
  fit_component(component_ar_coefficients(model, 2), t2, out.roots_2, out.coeffs_2, out.confluent,
                out.ambiguous);
  return out;
}

LagCovSequence sample_gamma(const AngleSeries& series, int max_lag) {
  const auto n = static_cast<int>(series.size());
  if (max_lag < 0 || max_lag >= n) throw ContractViolation("sample_gamma: need 0 <= K < n");
  std::vector<double> c(series.size()), s(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) {
    c[t] = std::cos(series[t]);
    s[t] = std::sin(series[t]);
  }
  LagCovSequence seq;
  seq.kind = CovKind::Sample;
  for (int k = 0; k <= max_lag; ++k) {
    double cc = 0, cs = 0, sc = 0, ss = 0;
    for (int t = k; t < n; ++t) {
      cc += c[t] * c[t - k];
      cs += c[t] * s[t - k];
      sc += s[t] * c[t - k];
      ss += s[t] * s[t - k];
    }
    Eigen::Matrix2d g;
    g << cc, cs, sc, ss;
    seq.matrices.push_back(g / static_cast<double>(n - k));
  }
  return seq;
}

std::vector<double> sample_cacf(const AngleSeries& series, int max_lag) {
  const auto dets = sample_gamma(series, max_lag).determinants();
  std::vector<double> r(dets.size());
  for (std::size_t k = 0; k < dets.size(); ++k) r[k] = dets[k] / dets[0];
  return r;
}

}  // namespace mtdar
