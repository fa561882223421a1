#include "mtdar/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mtdar/correlation.hpp"

namespace mtdar {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kWeightBudget = 1.0 - WeightMargins::delta_a2;

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logit(double u) {
  if (!(u > 0.0 && u < 1.0)) throw ContractViolation("parameter lies on or outside the boundary of H");
  return std::log(u) - std::log1p(-u);
}

std::pair<double, double> concentration_range(Family family) {
  if (family == Family::WrappedCauchy)
    return {ConcentrationBounds::delta_rho, 1.0 - ConcentrationBounds::delta_rho};
  return {ConcentrationBounds::delta_kappa, ConcentrationBounds::kappa_max};
}

void check_signs(int order, const std::vector<int>& signs) {
  if (order < 1) throw ContractViolation("order must be at least 1");
  if (static_cast<int>(signs.size()) != order) throw ContractViolation("sign vector length must equal p");
  for (int q : signs)
    if (q != 1 && q != -1) throw ContractViolation("signs must be +1 or -1");
}

void check_length(const AngleSeries& series, int order) {
  if (series.size() < static_cast<std::size_t>(10 * order))
    throw ContractViolation("series needs at least 10*p observations");
}

double step_for(double x, double rel) { return rel * std::max(std::abs(x), 1e-2); }

FitResult finish(FitResult r, Family family, int order, std::size_t n, std::size_t n_eff) {
  r.family = family;
  r.order = order;
  r.n = n;
  r.n_eff = n_eff;
  const double k = order;
  const double logn = std::log(static_cast<double>(n));
  r.aic = -2.0 * r.loglik + 2.0 * k;
  r.bic = -2.0 * r.loglik + k * logn;
  r.aic_with_signs = -2.0 * r.loglik + 4.0 * k;
  r.bic_with_signs = -2.0 * r.loglik + 2.0 * k * logn;
  return r;
}

std::vector<ParamVector> starting_points(const AngleSeries& series, int order, Family family,
                                         const FitOptions& options) {
  std::vector<ParamVector> starts;
  const auto to_concentration = [family](double rho) {
    return family == Family::WrappedCauchy ? rho : kappa_from_mean_resultant_length(rho);
  };

  const double r1 = sample_cacf(series, 1)[1];
  const double rho0 = std::clamp(std::sqrt(std::abs(r1)), 0.05, 0.95);
  ParamVector mm;
  mm.free_weights.assign(static_cast<std::size_t>(order - 1), 1.0 / order);
  mm.concentration = to_concentration(rho0);
  starts.push_back(mm);

  Rng rng = make_rng(options.seed);
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  for (int s = 1; s < options.multistarts; ++s) {
    std::vector<double> e(static_cast<std::size_t>(order));
    for (auto& v : e) v = expo(rng) + 1e-3;
    double total = 0.0;
    for (double v : e) total += v;
    ParamVector pv;
    for (int i = 0; i + 1 < order; ++i) pv.free_weights.push_back(kWeightBudget * e[static_cast<std::size_t>(i)] / total);
    pv.concentration = to_concentration(unif(rng));
    starts.push_back(pv);
  }
  return starts;
}

FitResult optimize(const LikelihoodWorkspace& ws, const AngleSeries& series, const FitOptions& options) {
  const int order = ws.order();
  const Family family = ws.family();
  const double scale = static_cast<double>(ws.terms());

  const auto objective = [&](const Eigen::VectorXd& z) {
    const double ll = ws.log_likelihood(from_unconstrained(z, family).as_vector());
    return std::isfinite(ll) ? -ll / scale : std::numeric_limits<double>::infinity();
  };

  FitResult best;
  best.loglik = -std::numeric_limits<double>::infinity();
  best.signs = ws.signs();
  bool have_best = false;
  bool best_converged = false;
  Eigen::VectorXd z;

  for (const auto& start : starting_points(series, order, family, options)) {
    const SimplexResult sr = nelder_mead(objective, to_unconstrained(start, family), options.simplex);
    best.trace.evaluations += sr.evaluations;
    best.trace.starts += 1;
    if (sr.converged) best.trace.converged_starts += 1;
    const double ll = std::isfinite(sr.value) ? -sr.value * scale : -std::numeric_limits<double>::infinity();
    best.trace.start_logliks.push_back(ll);
    if (!have_best || ll > best.loglik) {
      have_best = true;
      best.loglik = ll;
      best.params = from_unconstrained(sr.x, family);
      z = sr.x;
      best_converged = sr.converged;
    }
  }
  best.converged = best_converged;
  best.loglik = ws.log_likelihood(best.params.as_vector());

  // score in the unconstrained coordinates
  double max_score = 0.0;
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    const double h = 1e-5 * std::max(1.0, std::abs(z(j)));
    Eigen::VectorXd zp = z, zm = z;
    zp(j) += h;
    zm(j) -= h;
    const double g = (objective(zm) - objective(zp)) * scale / (2.0 * h);
    max_score = std::max(max_score, std::abs(g));
  }
  best.max_score = max_score / static_cast<double>(series.size());

  return finish(std::move(best), family, order, series.size(), ws.terms());
}

void attach_covariance(FitResult& r, const LikelihoodWorkspace& ws) {
  const SandwichParts parts = sandwich_covariance(ws, r.params.as_vector());
  r.covariance = parts.covariance;
  r.covariance_reliable = parts.finite && parts.positive_definite;
  r.std_errors.resize(static_cast<std::size_t>(parts.covariance.rows()));
  for (Eigen::Index j = 0; j < parts.covariance.rows(); ++j) {
    const double v = parts.covariance(j, j);
    r.std_errors[static_cast<std::size_t>(j)] =
        v >= 0.0 ? std::sqrt(v) : std::numeric_limits<double>::quiet_NaN();
  }
}

FitResult fit_without_covariance(const AngleSeries& series, const std::vector<int>& signs,
                                 Family family, const FitOptions& options, bool& failed) {
  const LikelihoodWorkspace ws(series, signs, family);
  FitResult r = optimize(ws, series, options);
  failed = r.trace.converged_starts == 0;
  return r;
}

}  // namespace

std::vector<double> ParamVector::weights() const {
  std::vector<double> w(free_weights);
  double total = 0.0;
  for (double a : free_weights) total += a;
  w.push_back(1.0 - total);
  return w;
}

Eigen::VectorXd ParamVector::as_vector() const {
  Eigen::VectorXd eta(dimension());
  for (std::size_t i = 0; i < free_weights.size(); ++i) eta(static_cast<Eigen::Index>(i)) = free_weights[i];
  eta(eta.size() - 1) = concentration;
  return eta;
}

ParamVector ParamVector::from_vector(const Eigen::VectorXd& eta) {
  if (eta.size() < 1) throw ContractViolation("parameter vector is empty");
  ParamVector pv;
  pv.free_weights.assign(eta.data(), eta.data() + eta.size() - 1);
  pv.concentration = eta(eta.size() - 1);
  return pv;
}

Eigen::VectorXd to_unconstrained(const ParamVector& params, Family family) {
  Eigen::VectorXd z(params.dimension());
  double remaining = kWeightBudget;
  for (std::size_t i = 0; i < params.free_weights.size(); ++i) {
    z(static_cast<Eigen::Index>(i)) = logit(params.free_weights[i] / remaining);
    remaining -= params.free_weights[i];
  }
  const auto [lo, hi] = concentration_range(family);
  z(z.size() - 1) = logit((params.concentration - lo) / (hi - lo));
  return z;
}

ParamVector from_unconstrained(const Eigen::VectorXd& z, Family family) {
  if (z.size() < 1) throw ContractViolation("parameter vector is empty");
  ParamVector pv;
  double remaining = kWeightBudget;
  for (Eigen::Index i = 0; i + 1 < z.size(); ++i) {
    const double a = remaining * sigmoid(z(i));
    pv.free_weights.push_back(a);
    remaining -= a;
  }
  const auto [lo, hi] = concentration_range(family);
  pv.concentration = lo + (hi - lo) * sigmoid(z(z.size() - 1));
  return pv;
}

double log_likelihood(const AngleSeries& series, const MtdArModel& model) {
  const auto p = static_cast<std::size_t>(model.order());
  if (series.size() <= p) throw ContractViolation("series must be longer than the model order");
  std::vector<double> history(p);
  double total = 0.0;
  for (std::size_t t = p; t < series.size(); ++t) {
    for (std::size_t i = 0; i < p; ++i) history[i] = series[t - 1 - i];
    total += std::log(transition_density(model, Angle(series[t]), history));
  }
  return total;
}

LikelihoodWorkspace::LikelihoodWorkspace(const AngleSeries& series, std::vector<int> signs, Family family)
    : order_(static_cast<int>(signs.size())), terms_(0), signs_(std::move(signs)), family_(family) {
  check_signs(order_, signs_);
  const auto p = static_cast<std::size_t>(order_);
  if (series.size() <= p) throw ContractViolation("series must be longer than the model order");
  terms_ = series.size() - p;
  cosines_.resize(static_cast<Eigen::Index>(terms_), order_);
  for (std::size_t t = 0; t < terms_; ++t)
    for (std::size_t i = 0; i < p; ++i)
      cosines_(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) =
          std::cos(series[p + t] - signs_[i] * series[p + t - 1 - i]);
}

void LikelihoodWorkspace::observation_log_likelihoods(const Eigen::VectorXd& eta,
                                                      std::vector<double>& out) const {
  if (eta.size() != order_) throw ContractViolation("parameter vector has the wrong dimension");
  out.resize(terms_);
  std::vector<double> a(static_cast<std::size_t>(order_));
  double total = 0.0;
  for (int i = 0; i + 1 < order_; ++i) {
    a[static_cast<std::size_t>(i)] = eta(i);
    total += eta(i);
  }
  a.back() = 1.0 - total;
  const double c = eta(order_ - 1);
  const auto p = static_cast<std::size_t>(order_);

  if (family_ == Family::WrappedCauchy) {
    if (!(std::abs(c) < 1.0)) {
      std::fill(out.begin(), out.end(), std::numeric_limits<double>::quiet_NaN());
      return;
    }
    const double base = std::log1p(-c * c) - kLog2Pi;
    const double one_plus = 1.0 + c * c, two_rho = 2.0 * c;
    for (std::size_t t = 0; t < terms_; ++t) {
      double s = 0.0;
      for (std::size_t i = 0; i < p; ++i)
        s += a[i] / (one_plus - two_rho * cosines_(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)));
      out[t] = base + std::log(s);
    }
  } else {
    const double base = c - log_bessel_i0(std::abs(c)) - kLog2Pi;
    for (std::size_t t = 0; t < terms_; ++t) {
      double s = 0.0;
      for (std::size_t i = 0; i < p; ++i)
        s += a[i] * std::exp(c * (cosines_(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) - 1.0));
      out[t] = base + std::log(s);
    }
  }
}

double LikelihoodWorkspace::log_likelihood(const Eigen::VectorXd& eta) const {
  thread_local std::vector<double> buffer;
  observation_log_likelihoods(eta, buffer);
  double total = 0.0;
  for (double v : buffer) total += v;
  return total;
}

Eigen::VectorXd numerical_gradient(const LikelihoodWorkspace& ws, const Eigen::VectorXd& eta) {
  Eigen::VectorXd g(eta.size());
  for (Eigen::Index j = 0; j < eta.size(); ++j) {
    const double h = step_for(eta(j), 1e-6);
    Eigen::VectorXd ep = eta, em = eta;
    ep(j) += h;
    em(j) -= h;
    g(j) = (ws.log_likelihood(ep) - ws.log_likelihood(em)) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixXd numerical_hessian(const LikelihoodWorkspace& ws, const Eigen::VectorXd& eta) {
  const Eigen::Index d = eta.size();
  Eigen::MatrixXd H(d, d);
  Eigen::VectorXd h(d);
  for (Eigen::Index j = 0; j < d; ++j) h(j) = step_for(eta(j), 1e-4);
  const double f0 = ws.log_likelihood(eta);
  for (Eigen::Index j = 0; j < d; ++j) {
    Eigen::VectorXd ep = eta, em = eta;
    ep(j) += h(j);
    em(j) -= h(j);
    H(j, j) = (ws.log_likelihood(ep) - 2.0 * f0 + ws.log_likelihood(em)) / (h(j) * h(j));
    for (Eigen::Index k = j + 1; k < d; ++k) {
      Eigen::VectorXd pp = eta, pm = eta, mp = eta, mm = eta;
      pp(j) += h(j); pp(k) += h(k);
      pm(j) += h(j); pm(k) -= h(k);
      mp(j) -= h(j); mp(k) += h(k);
      mm(j) -= h(j); mm(k) -= h(k);
      H(j, k) = H(k, j) = (ws.log_likelihood(pp) - ws.log_likelihood(pm) - ws.log_likelihood(mp) +
                           ws.log_likelihood(mm)) / (4.0 * h(j) * h(k));
    }
  }
  return H;
}

SandwichParts sandwich_covariance(const LikelihoodWorkspace& ws, const Eigen::VectorXd& eta) {
  const Eigen::Index d = eta.size();
  const auto n_eff = static_cast<double>(ws.terms());
  SandwichParts parts;

  Eigen::MatrixXd scores(static_cast<Eigen::Index>(ws.terms()), d);
  std::vector<double> up, down;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double h = step_for(eta(j), 1e-6);
    Eigen::VectorXd ep = eta, em = eta;
    ep(j) += h;
    em(j) -= h;
    ws.observation_log_likelihoods(ep, up);
    ws.observation_log_likelihoods(em, down);
    for (std::size_t t = 0; t < ws.terms(); ++t)
      scores(static_cast<Eigen::Index>(t), j) = (up[t] - down[t]) / (2.0 * h);
  }
  parts.score_outer = scores.transpose() * scores / n_eff;
  parts.information = -numerical_hessian(ws, eta) / n_eff;
  parts.information = 0.5 * (parts.information + parts.information.transpose()).eval();

  parts.finite = parts.score_outer.allFinite() && parts.information.allFinite();
  if (!parts.finite) {
    parts.positive_definite = false;
    parts.covariance = Eigen::MatrixXd::Constant(d, d, std::numeric_limits<double>::quiet_NaN());
    return parts;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(parts.information);
  parts.positive_definite = eig.eigenvalues().minCoeff() > 0.0;
  const Eigen::MatrixXd inv = parts.information.fullPivLu().inverse();
  Eigen::MatrixXd cov = inv * parts.score_outer * inv / n_eff;
  parts.covariance = 0.5 * (cov + cov.transpose());
  return parts;
}

MtdArModel FitResult::model() const {
  return MtdArModel(params.weights(), signs, BindingDensity::make(family, params.concentration));
}

double FitResult::mean_resultant_length() const {
  return family == Family::WrappedCauchy ? params.concentration : bessel_ratio(1, params.concentration);
}

FitResult fit_given_q(const AngleSeries& series, int order, const std::vector<int>& signs, Family family,
                      const FitOptions& options) {
  check_signs(order, signs);
  check_length(series, order);
  const LikelihoodWorkspace ws(series, signs, family);
  FitResult r = optimize(ws, series, options);
  attach_covariance(r, ws);
  if (r.trace.converged_starts == 0)
    throw FitFailure("optimizer did not converge from any starting point", std::move(r));
  return r;
}

std::vector<std::vector<int>> enumerate_signs(int order) {
  if (order < 1 || order > 12) throw ContractViolation("sign enumeration needs 1 <= p <= 12");
  std::vector<std::vector<int>> all;
  for (unsigned mask = 0; mask < (1u << order); ++mask) {
    std::vector<int> q(static_cast<std::size_t>(order));
    for (int i = 0; i < order; ++i) q[static_cast<std::size_t>(i)] = (mask >> i) & 1u ? -1 : 1;
    all.push_back(std::move(q));
  }
  return all;
}

FitResult fit(const AngleSeries& series, int order, Family family, const FitOptions& options) {
  const auto candidates = enumerate_signs(order);
  check_length(series, order);

  FitResult best;
  bool have_best = false;
  bool best_failed = true;
  bool all_failed = true;
  std::vector<double> logliks;
  int evaluations = 0;
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    FitOptions opts = options;
    opts.seed = derive_seed(options.seed, j);
    bool failed = false;
    FitResult r = fit_without_covariance(series, candidates[j], family, opts, failed);
    logliks.push_back(r.loglik);
    evaluations += r.trace.evaluations;
    all_failed = all_failed && failed;
    if (!have_best || r.loglik > best.loglik) {
      best = std::move(r);
      best_failed = failed;
      have_best = true;
    }
  }
  best.trace.candidate_signs = candidates;
  best.trace.candidate_logliks = logliks;
  best.trace.evaluations = evaluations;
  const LikelihoodWorkspace ws(series, best.signs, family);
  attach_covariance(best, ws);
  if (best_failed) best.converged = false;
  if (all_failed) throw FitFailure("optimizer did not converge for any sign vector", std::move(best));
  return best;
}

std::string to_string(Criterion c) { return c == Criterion::Aic ? "aic" : "bic"; }

Criterion criterion_from_string(const std::string& name) {
  if (name == "aic" || name == "AIC") return Criterion::Aic;
  if (name == "bic" || name == "BIC") return Criterion::Bic;
  throw ContractViolation("unknown criterion: " + name);
}

OrderSelection select_order(const AngleSeries& series, int max_order, Family family, Criterion criterion,
                            const FitOptions& options) {
  if (max_order < 1) throw ContractViolation("p_max must be at least 1");
  check_length(series, max_order);
  OrderSelection sel;
  sel.criterion = criterion;
  double best = std::numeric_limits<double>::infinity();
  for (int p = 1; p <= max_order; ++p) {
    FitOptions opts = options;
    opts.seed = derive_seed(options.seed, 1000u + static_cast<unsigned>(p));
    FitResult r = fit(series, p, family, opts);
    const double value = criterion == Criterion::Aic ? r.aic : r.bic;
    if (value < best) {
      best = value;
      sel.selected_order = p;
    }
    sel.fits.push_back(std::move(r));
  }
  return sel;
}

}  // namespace mtdar
