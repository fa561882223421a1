#pragma once

#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mtdar/model.hpp"

namespace testing {

inline double integrate(const std::function<double(double)>& f, double a = -mtdar::kPi,
                        double b = mtdar::kPi) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13);
}

inline std::vector<double> random_weights(mtdar::Rng& rng, int p) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(static_cast<std::size_t>(p));
  double s = 0;
  for (auto& v : w) s += (v = e(rng) + 0.02);
  for (auto& v : w) v /= s;
  return w;
}

inline std::vector<int> random_signs(mtdar::Rng& rng, int p) {
  std::vector<int> q(static_cast<std::size_t>(p));
  for (auto& v : q) v = (rng() & 1u) ? -1 : 1;
  return q;
}

/// Random zero-mean-direction model, p in [1, max_p], rho in [0.05, 0.95].
inline mtdar::MtdArModel random_model(mtdar::Rng& rng, int max_p = 4,
                                      mtdar::Family family = mtdar::Family::WrappedCauchy) {
  std::uniform_int_distribution<int> pd(1, max_p);
  std::uniform_real_distribution<double> rd(0.05, 0.95);
  const int p = pd(rng);
  const double rho = rd(rng);
  const double c = family == mtdar::Family::WrappedCauchy ? rho : mtdar::kappa_from_mean_resultant_length(rho);
  return mtdar::MtdArModel(random_weights(rng, p), random_signs(rng, p), mtdar::BindingDensity::make(family, c));
}

using cpoly = std::vector<std::complex<double>>;  // ascending powers

inline cpoly poly_mul(const cpoly& a, const cpoly& b) {
  cpoly r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

/// Durand-Kerner simultaneous iteration; independent of any eigen solver.
inline std::vector<std::complex<double>> durand_kerner(cpoly c) {
  while (c.size() > 1 && std::abs(c.back()) == 0.0) c.pop_back();
  const std::size_t n = c.size() - 1;
  const auto lead = c.back();
  for (auto& v : c) v /= lead;
  std::vector<std::complex<double>> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = std::pow(std::complex<double>(0.4, 0.9), double(i));
  auto eval = [&](std::complex<double> x) {
    std::complex<double> s = 0;
    for (std::size_t k = c.size(); k-- > 0;) s = s * x + c[k];
    return s;
  };
  for (int it = 0; it < 5000; ++it) {
    double change = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::complex<double> d = 1;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) d *= z[i] - z[j];
      const auto step = eval(z[i]) / d;
      z[i] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-15) break;
  }
  return z;
}

}  // namespace testing
