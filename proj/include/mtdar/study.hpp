#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mtdar/inference.hpp"

namespace mtdar {

enum class StudyKind { Estimation, Selection };
std::string to_string(StudyKind kind);
StudyKind study_kind_from_string(const std::string& name);

/// Replication grid for the Monte Carlo tables. The truth's signs are replaced
/// by each entry of q_grid in turn.
struct StudyConfig {
  StudyKind kind = StudyKind::Estimation;
  std::vector<double> weights{0.3, 0.7};
  Family truth_family = Family::WrappedCauchy;
  double truth_concentration = 0.9;
  Family fit_family = Family::WrappedCauchy;
  std::vector<std::size_t> sample_sizes{250, 500, 1000};
  std::vector<std::vector<int>> q_grid{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
  int replications = 1000;
  std::uint64_t seed = 20240601;
  std::size_t burn_in = kDefaultBurnIn;
  int max_order = 4;          ///< selection studies only
  bool known_signs = true;    ///< estimation: fit with the true q instead of enumerating
  FitOptions fit{};
  int workers = 0;            ///< 0: MTDAR_WORKERS or the hardware concurrency

  MtdArModel truth(const std::vector<int>& signs) const;
  /// Throws ContractViolation on an empty grid, replications < 1 or n < 10 p.
  void validate() const;
};

struct ReplicationRecord {
  std::size_t n = 0;
  std::size_t q_index = 0;
  int replication = 0;
  double a1 = 0.0;
  double concentration = 0.0;
  double rho = 0.0;  ///< mean resultant length of the fitted binding density
  double se_a1 = 0.0;
  double loglik = 0.0;
  bool converged = false;
  std::vector<int> selected_signs;
  int aic_order = 0;
  int bic_order = 0;
};

struct EstimationSummary {
  std::size_t n = 0;
  std::vector<int> signs;
  int replications = 0;
  int failures = 0;
  double mean_a1 = 0.0;
  double rmse_a1 = 0.0;
  double mean_rho = 0.0;
  double rmse_rho = 0.0;
  double coverage_a1 = 0.0;  ///< share of 95% sandwich intervals containing the true a_1
  double sign_recovery = 0.0;
};

struct SelectionSummary {
  std::size_t n = 0;
  std::vector<int> signs;
  int replications = 0;
  int failures = 0;
  std::vector<int> aic_counts;  ///< index p - 1
  std::vector<int> bic_counts;
};

struct StudyResult {
  std::vector<EstimationSummary> estimation;
  std::vector<SelectionSummary> selection;
  std::vector<ReplicationRecord> records;
  int workers = 1;
};

/// Worker count from the request, else MTDAR_WORKERS, else hardware concurrency.
int resolve_workers(int requested);

/// Runs fn(i) for i in [0, count) on `workers` threads. Results must be written by index.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

StudyResult run_study(const StudyConfig& config);

/// One cell of the misspecification table: wrapped Cauchy truth fitted with another family.
EstimationSummary misspecified_fit_study(const MtdArModel& truth, Family fit_family, std::size_t n,
                                         int replications, std::uint64_t seed, int workers = 0);

}  // namespace mtdar
