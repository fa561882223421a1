#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mtdar/errors.hpp"
#include "mtdar/correlation.hpp"
#include "mtdar/model.hpp"
#include "support.hpp"

using namespace mtdar;

namespace {

MtdArModel fig1a(std::vector<int> q = {1, 1}) {
  return MtdArModel({0.3, 0.7}, std::move(q), BindingDensity::wrapped_cauchy(0.9));
}

std::vector<double> random_history(Rng& rng, int p) {
  std::uniform_real_distribution<double> u(-kPi, kPi);
  std::vector<double> h(static_cast<std::size_t>(p));
  for (auto& v : h) v = u(rng);
  return h;
}

// det(lambda^p I - sum lambda^{p-i} a_i D Q_i) as a polynomial, then Durand-Kerner.
std::vector<double> determinant_root_moduli(const MtdArModel& m) {
  const int p = m.order();
  testing::cpoly e[2][2];
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) e[r][c].assign(static_cast<std::size_t>(p + 1), 0.0);
  e[0][0][static_cast<std::size_t>(p)] = e[1][1][static_cast<std::size_t>(p)] = 1.0;
  for (int i = 1; i <= p; ++i) {
    const Eigen::Matrix2d b = m.weights()[i - 1] * rotation_kernel(m.binding(), 1) * sign_matrix<double>(m.signs()[i - 1]);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) e[r][c][static_cast<std::size_t>(p - i)] -= b(r, c);
  }
  auto det = testing::poly_mul(e[0][0], e[1][1]);
  const auto off = testing::poly_mul(e[0][1], e[1][0]);
  for (std::size_t k = 0; k < off.size(); ++k) det[k] -= off[k];
  std::vector<double> mod;
  for (auto z : testing::durand_kerner(det)) mod.push_back(std::abs(z));
  std::sort(mod.begin(), mod.end());
  return mod;
}

}  // namespace

TEST_CASE("rotation kernels") {
  Rng rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0), a(-kPi, kPi);
  for (int i = 0; i < 20; ++i) {
    const double rho = u(rng), mu = a(rng);
    const Eigen::Matrix2d D = scaled_rotation(rho, mu);
    CHECK(D.determinant() == doctest::Approx(rho * rho).epsilon(1e-12));
    const Eigen::Matrix2d R = D / rho;
    CHECK((R.transpose() * R - Eigen::Matrix2d::Identity()).norm() < 1e-12);
    for (int q : {-1, 1}) CHECK((sign_matrix<double>(q) * sign_matrix<double>(q)).isIdentity(0.0));
  }
  CHECK(scaled_rotation<float>(0.5f, 0.0f)(0, 0) == 0.5f);
}

TEST_CASE("model construction") {
  CHECK_THROWS_AS(MtdArModel({0.3, 0.6}, {1, 1}, BindingDensity::wrapped_cauchy(0.5)), ContractViolation);
  CHECK_THROWS_AS(MtdArModel({0.3, 0.7}, {1}, BindingDensity::wrapped_cauchy(0.5)), ContractViolation);
  CHECK_THROWS_AS(MtdArModel({0.3, 0.7}, {1, 2}, BindingDensity::wrapped_cauchy(0.5)), ContractViolation);
  CHECK_THROWS_AS(MtdArModel({1.0, 0.0}, {1, 1}, BindingDensity::wrapped_cauchy(0.5)), ContractViolation);
  CHECK_THROWS_AS(MtdArModel({-0.1, 1.1}, {1, 1}, BindingDensity::wrapped_cauchy(0.5)), ContractViolation);
  CHECK_THROWS_AS(MtdArModel({}, {}, BindingDensity::wrapped_cauchy(0.5)), ContractViolation);
  const MtdArModel m({0.3 + 1e-10, 0.7}, {1, -1}, BindingDensity::wrapped_cauchy(0.5));
  CHECK(std::abs(m.weights()[0] + m.weights()[1] - 1.0) < 1e-15);
  const MtdArModel z({0.0, 1.0}, {1, 1}, BindingDensity::wrapped_cauchy(0.5));
  CHECK(z.order() == 2);
}

TEST_CASE("transition density") {
  const auto g = BindingDensity::wrapped_cauchy(0.6);
  const MtdArModel one({1.0}, {1}, g);
  const std::vector<double> h1{0.4};
  CHECK(transition_density(one, Angle(1.5), h1) == doctest::Approx(g.density(wrap_value(1.1))).epsilon(1e-14));

  const auto m = fig1a();
  const std::vector<double> same{2.0, 2.0};
  for (double t : {-3.0, 0.1, 2.9})
    CHECK(transition_density(m, Angle(t), same) == doctest::Approx(m.binding().density(wrap_value(t - 2.0))).epsilon(1e-14));
  CHECK_THROWS_AS(transition_density(m, Angle(0.0), h1), ContractViolation);

  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    const auto model = testing::random_model(rng, 4, i % 2 ? Family::VonMises : Family::WrappedCauchy);
    const auto h = random_history(rng, model.order());
    const double total = testing::integrate([&](double t) { return transition_density(model, Angle(t), h); });
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
    for (int mm = 1; mm <= 2; ++mm) {
      const Eigen::Vector2d v = conditional_trig_moment(model, mm, h);
      const double c = testing::integrate([&](double t) { return std::cos(mm * t) * transition_density(model, Angle(t), h); });
      const double s = testing::integrate([&](double t) { return std::sin(mm * t) * transition_density(model, Angle(t), h); });
      CHECK(std::abs(v(0) - c) < 1e-8);
      CHECK(std::abs(v(1) - s) < 1e-8);
    }
  }
}

TEST_CASE("conditional trigonometric moment examples") {
  const auto g = BindingDensity::wrapped_cauchy(0.7);
  const std::vector<double> zero{0.0}, half{kPi / 2};
  const Eigen::Vector2d v = conditional_trig_moment(MtdArModel({1.0}, {1}, g), 2, zero);
  CHECK(v(0) == doctest::Approx(0.49).epsilon(1e-14));
  CHECK(v(1) == doctest::Approx(0.0));
  const Eigen::Vector2d w = conditional_trig_moment(MtdArModel({1.0}, {-1}, g), 1, half);
  CHECK(std::abs(w(0)) < 1e-15);
  CHECK(w(1) == doctest::Approx(-0.7).epsilon(1e-14));
  const Eigen::Vector2d u = conditional_trig_moment(MtdArModel({1.0}, {1}, BindingDensity::wrapped_cauchy(0.0)), 1, half);
  CHECK(u.norm() == 0.0);
  CHECK_THROWS_AS(conditional_trig_moment(MtdArModel({1.0}, {1}, g), 0, half), std::domain_error);
}

TEST_CASE("conditional second-moment matrix identity by quadrature") {
  Rng rng(13);
  std::uniform_real_distribution<double> u(-kPi, kPi), r(0.05, 0.95);
  std::uniform_int_distribution<int> mi(1, 4);
  for (int i = 0; i < 20; ++i) {
    const int m = mi(rng);
    const int q = (rng() & 1u) ? 1 : -1;
    const double th = u(rng);
    const auto g = i % 2 ? BindingDensity::von_mises(kappa_from_mean_resultant_length(r(rng)), u(rng))
                         : BindingDensity::wrapped_cauchy(r(rng), u(rng));
    auto M = [m](double t) {
      Eigen::Matrix2d x;
      x << std::cos(m * t), std::sin(m * t), std::sin(m * t), -std::cos(m * t);
      return x;
    };
    Eigen::Matrix2d lhs;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        lhs(a, b) = testing::integrate([&](double t) { return M(t)(a, b) * g.density(wrap_value(t - q * th)); });
    const Eigen::Matrix2d Q = sign_matrix<double>(q);
    const Eigen::Matrix2d rhs = rotation_kernel(g, m) * Q * M(th) * Q;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("simulation") {
  const auto m = fig1a();
  const auto a = simulate(m, 500, 200, 9);
  const auto b = simulate(m, 500, 200, 9);
  CHECK(a.size() == 500);
  CHECK(std::equal(a.begin(), a.end(), b.begin()));
  for (double v : a) CHECK((v >= -kPi && v < kPi));

  const auto flat = simulate(MtdArModel({0.5, 0.5}, {1, -1}, BindingDensity::wrapped_cauchy(0.0)), 5000, 200, 4);
  CHECK(rayleigh_test_pvalue(flat.values()) > 0.01);

  const auto ar1 = simulate(MtdArModel({1.0}, {1}, BindingDensity::wrapped_cauchy(0.9)), 100000, 200, 21);
  CHECK(std::abs(sample_cacf(ar1, 1)[1] - 0.81) < 0.02);
  CHECK(sample_mean_resultant_length(ar1.values()) < 0.05);

  const auto alt = fig1a({1, -1});
  const auto s = simulate(alt, 100000, 200, 22);
  const auto rs = sample_cacf(s, 6);
  const auto rt = cacf(alt, 6);
  for (int k = 1; k <= 6; ++k) CHECK((rs[k] > 0) == (rt[k] > 0));
  CHECK(sample_mean_resultant_length(s.values()) < 0.02);

  const auto skip = simulate(MtdArModel({0.0, 1.0}, {1, 1}, BindingDensity::wrapped_cauchy(0.9)), 2000, 0, 3);
  CHECK(skip.size() == 2000);
}

TEST_CASE("first-order stationarity") {
  for (double rho : {0.1, 0.5, 0.9}) {
    const auto r = first_order_stationary(MtdArModel({1.0}, {-1}, BindingDensity::wrapped_cauchy(rho)));
    CHECK(r.stationary);
    CHECK(r.spectral_radius == doctest::Approx(rho).epsilon(1e-12));
  }
  CHECK(first_order_stationary(MtdArModel({0.4, 0.6}, {1, 1}, BindingDensity::wrapped_cauchy(0.0))).spectral_radius < 1e-12);
  const auto r = first_order_stationary(fig1a());
  CHECK(r.stationary);
  CHECK(r.spectral_radius < 1.0);

  Rng rng(17);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int i = 0; i < 40; ++i) {
    auto m = testing::random_model(rng, 3);
    if (i % 2) m = m.with_binding(BindingDensity::wrapped_cauchy(m.binding().concentration(), u(rng)));
    const auto comp = Eigen::EigenSolver<Eigen::MatrixXd>(mean_companion(m)).eigenvalues();
    std::vector<double> mods;
    for (Eigen::Index k = 0; k < comp.size(); ++k) mods.push_back(std::abs(comp(k)));
    std::sort(mods.begin(), mods.end());
    const auto oracle = determinant_root_moduli(m);
    REQUIRE(oracle.size() == mods.size());
    for (std::size_t k = 0; k < mods.size(); ++k) CHECK(std::abs(mods[k] - oracle[k]) < 1e-8);
    CHECK(first_order_stationary(m).spectral_radius == doctest::Approx(oracle.back()).epsilon(1e-8));
  }
}

TEST_CASE("second-order stationarity") {
  for (int q : {-1, 1}) {
    const auto r = second_order_stationary(MtdArModel({1.0}, {q}, BindingDensity::wrapped_cauchy(0.95)));
    CHECK(r.stationary);
    CHECK(r.spectral_radius == doctest::Approx(0.95 * 0.95).epsilon(1e-12));
  }
  CHECK(second_order_stationary(MtdArModel({0.5, 0.5}, {1, -1}, BindingDensity::wrapped_cauchy(0.0))).stationary);

  const auto r = second_order_stationary(fig1a());
  CHECK(r.stationary);
  CHECK(r.spectral_radius < 1.0);
  // the product-of-spectra and dense Kronecker evaluations agree
  CHECK(std::abs(r.kronecker_radius - r.kronecker_radius_dense) < 1e-10);

  Rng rng(19);
  for (int i = 0; i < 30; ++i) {
    const auto m = testing::random_model(rng, 3, i % 2 ? Family::VonMises : Family::WrappedCauchy);
    const auto s = second_order_stationary(m);
    CHECK(s.stationary);
    CHECK(std::abs(s.kronecker_radius - s.kronecker_radius_dense) < 1e-8 * std::max(1.0, s.kronecker_radius));
  }
  const MtdArModel p4({0.1, 0.2, 0.3, 0.4}, {1, -1, 1, -1}, BindingDensity::wrapped_cauchy(0.8));
  CHECK(std::isnan(second_order_stationary(p4).kronecker_radius_dense));
}
