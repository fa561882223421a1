#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mtdar/errors.hpp"
#include "mtdar/model.hpp"
#include "mtdar/numeric.hpp"

namespace mtdar {

/// Margins of the weight space A: a_i <= 1 - delta_a1, sum_{i<p} a_i <= 1 - delta_a2.
struct WeightMargins {
  static constexpr double delta_a1 = 1e-4;
  static constexpr double delta_a2 = 1e-4;
};

/// eta = (a_1, ..., a_{p-1}, concentration); a_p = 1 - sum.
struct ParamVector {
  std::vector<double> free_weights;
  double concentration = 0.0;

  int dimension() const { return static_cast<int>(free_weights.size()) + 1; }
  std::vector<double> weights() const;
  Eigen::VectorXd as_vector() const;
  static ParamVector from_vector(const Eigen::VectorXd& eta);
};

/// Stick-breaking logit for the weights and (scaled) logit for the concentration.
Eigen::VectorXd to_unconstrained(const ParamVector& params, Family family);
ParamVector from_unconstrained(const Eigen::VectorXd& z, Family family);

/// Sum over t = p+1..n of log sum_i a_i g(theta_t - q_i theta_{t-i}).
double log_likelihood(const AngleSeries& series, const MtdArModel& model);

/// Cached cos(theta_t - q_i theta_{t-i}) for one series and sign vector; evaluates
/// the zero-mean-direction log-likelihood quickly for any eta.
class LikelihoodWorkspace {
 public:
  LikelihoodWorkspace(const AngleSeries& series, std::vector<int> signs, Family family);

  int order() const { return order_; }
  std::size_t terms() const { return terms_; }
  Family family() const { return family_; }
  const std::vector<int>& signs() const { return signs_; }

  /// Total log-likelihood; may return -inf/NaN for eta outside the density's domain.
  double log_likelihood(const Eigen::VectorXd& eta) const;
  /// Per-observation log densities (length terms()).
  void observation_log_likelihoods(const Eigen::VectorXd& eta, std::vector<double>& out) const;

 private:
  int order_;
  std::size_t terms_;
  std::vector<int> signs_;
  Family family_;
  Eigen::MatrixXd cosines_;  // terms x p
};

struct FitOptions {
  int multistarts = 5;  ///< moment-matched start plus (multistarts - 1) random interior starts
  std::uint64_t seed = 0;
  SimplexOptions simplex{};
};

struct FitTrace {
  int evaluations = 0;
  int starts = 0;
  int converged_starts = 0;
  std::vector<double> start_logliks;
  /// Filled by sign enumeration: every candidate q and its maximised log-likelihood.
  std::vector<std::vector<int>> candidate_signs;
  std::vector<double> candidate_logliks;
};

struct FitResult {
  int order = 0;
  Family family = Family::WrappedCauchy;
  ParamVector params;
  std::vector<int> signs;
  double loglik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  /// Alternatives counting the p signs as parameters too (reported, not used for selection).
  double aic_with_signs = 0.0;
  double bic_with_signs = 0.0;
  Eigen::MatrixXd covariance;  ///< I^{-1} J I^{-1} / n_eff in eta coordinates
  std::vector<double> std_errors;
  bool converged = false;
  bool covariance_reliable = false;
  std::size_t n = 0;
  std::size_t n_eff = 0;
  double max_score = 0.0;  ///< ||grad l_n||_inf / n in the unconstrained coordinates
  FitTrace trace;

  MtdArModel model() const;
  /// rho_1 of the fitted binding density (I_1/I_0(kappa) for von Mises).
  double mean_resultant_length() const;
};

class FitFailure : public NumericError {
 public:
  FitFailure(const std::string& what, FitResult best)
      : NumericError(what), best_(std::move(best)) {}
  const FitResult& best() const { return best_; }

 private:
  FitResult best_;
};

/// Maximum-likelihood fit for a fixed sign vector. Throws FitFailure if no start converged.
FitResult fit_given_q(const AngleSeries& series, int order, const std::vector<int>& signs,
                      Family family, const FitOptions& options = {});

/// All 2^p sign vectors in enumeration order (+1 before -1, lag 1 fastest).
std::vector<std::vector<int>> enumerate_signs(int order);

/// Fits every sign vector and keeps the highest likelihood (first wins ties).
FitResult fit(const AngleSeries& series, int order, Family family, const FitOptions& options = {});

enum class Criterion { Aic, Bic };
std::string to_string(Criterion c);
Criterion criterion_from_string(const std::string& name);

struct OrderSelection {
  int selected_order = 0;
  Criterion criterion = Criterion::Bic;
  std::vector<FitResult> fits;  ///< index p-1
};

OrderSelection select_order(const AngleSeries& series, int max_order, Family family,
                            Criterion criterion, const FitOptions& options = {});

/// Sandwich pieces at eta in the original coordinates.
struct SandwichParts {
  Eigen::MatrixXd information;  ///< I: -Hessian of l_n / n_eff
  Eigen::MatrixXd score_outer;  ///< J: mean outer product of per-observation scores
  Eigen::MatrixXd covariance;   ///< I^{-1} J I^{-1} / n_eff
  bool finite = true;
  bool positive_definite = true;
};

SandwichParts sandwich_covariance(const LikelihoodWorkspace& ws, const Eigen::VectorXd& eta);

/// Central-difference Hessian of l_n from function values.
Eigen::MatrixXd numerical_hessian(const LikelihoodWorkspace& ws, const Eigen::VectorXd& eta);
/// Central-difference gradient of l_n.
Eigen::VectorXd numerical_gradient(const LikelihoodWorkspace& ws, const Eigen::VectorXd& eta);

}  // namespace mtdar
