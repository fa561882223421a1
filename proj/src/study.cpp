#include "mtdar/study.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace mtdar {

namespace {

constexpr double kZ975 = 1.959963984540054;

std::uint64_t stream_index(std::size_t cell, int replication) {
  return (static_cast<std::uint64_t>(cell) << 32) | static_cast<std::uint64_t>(replication);
}

template <typename Fit>
FitResult guarded(Fit&& f, bool& failed) {
  try {
    failed = false;
    return f();
  } catch (const FitFailure& e) {
    failed = true;
    return e.best();
  }
}

ReplicationRecord estimation_replication(const StudyConfig& c, std::size_t n, std::size_t qi, int rep,
                                         std::uint64_t stream) {
  const auto& q = c.q_grid[qi];
  const AngleSeries series = simulate(c.truth(q), n, c.burn_in, derive_seed(stream, 0));
  FitOptions opts = c.fit;
  opts.seed = derive_seed(stream, 1);
  const int p = static_cast<int>(q.size());
  bool failed = false;
  const FitResult r = guarded(
      [&] { return c.known_signs ? fit_given_q(series, p, q, c.fit_family, opts) : fit(series, p, c.fit_family, opts); },
      failed);
  ReplicationRecord rec;
  rec.n = n;
  rec.q_index = qi;
  rec.replication = rep;
  rec.a1 = r.params.weights().front();
  rec.concentration = r.params.concentration;
  rec.rho = r.mean_resultant_length();
  rec.se_a1 = r.std_errors.empty() ? std::nan("") : r.std_errors.front();
  rec.loglik = r.loglik;
  rec.converged = !failed && r.converged;
  rec.selected_signs = r.signs;
  return rec;
}

ReplicationRecord selection_replication(const StudyConfig& c, std::size_t n, std::size_t qi, int rep,
                                        std::uint64_t stream) {
  const auto& q = c.q_grid[qi];
  const AngleSeries series = simulate(c.truth(q), n, c.burn_in, derive_seed(stream, 0));
  ReplicationRecord rec;
  rec.n = n;
  rec.q_index = qi;
  rec.replication = rep;
  rec.converged = true;
  double best_aic = INFINITY, best_bic = INFINITY;
  for (int p = 1; p <= c.max_order; ++p) {
    FitOptions opts = c.fit;
    opts.seed = derive_seed(stream, static_cast<std::uint64_t>(p));
    bool failed = false;
    const FitResult r = guarded([&] { return fit(series, p, c.fit_family, opts); }, failed);
    if (failed) rec.converged = false;
    if (r.aic < best_aic) {
      best_aic = r.aic;
      rec.aic_order = p;
    }
    if (r.bic < best_bic) {
      best_bic = r.bic;
      rec.bic_order = p;
      rec.selected_signs = r.signs;
      rec.loglik = r.loglik;
      rec.a1 = r.params.weights().front();
      rec.concentration = r.params.concentration;
      rec.rho = r.mean_resultant_length();
    }
  }
  return rec;
}

}  // namespace

std::string to_string(StudyKind kind) { return kind == StudyKind::Estimation ? "estimation" : "selection"; }

StudyKind study_kind_from_string(const std::string& name) {
  if (name == "estimation") return StudyKind::Estimation;
  if (name == "selection") return StudyKind::Selection;
  throw ContractViolation("unknown study kind: " + name);
}

MtdArModel StudyConfig::truth(const std::vector<int>& signs) const {
  return MtdArModel(weights, signs, BindingDensity::make(truth_family, truth_concentration));
}

void StudyConfig::validate() const {
  if (replications < 1) throw ContractViolation("replications must be at least 1");
  if (sample_sizes.empty()) throw ContractViolation("sample_sizes is empty");
  if (q_grid.empty()) throw ContractViolation("q_grid is empty");
  if (kind == StudyKind::Selection && max_order < 1) throw ContractViolation("p_max must be at least 1");
  const std::size_t p = weights.size();
  const std::size_t need = 10 * std::max<std::size_t>(p, kind == StudyKind::Selection ? max_order : 0);
  for (const auto& q : q_grid) {
    if (q.size() != p) throw ContractViolation("every q in q_grid must have length p");
    (void)truth(q);
  }
  for (std::size_t n : sample_sizes)
    if (n < need) throw ContractViolation("sample sizes must be at least 10*p");
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MTDAR_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, workers)), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

StudyResult run_study(const StudyConfig& config) {
  config.validate();
  StudyResult result;
  result.workers = resolve_workers(config.workers);

  const std::size_t cells = config.sample_sizes.size() * config.q_grid.size();
  const auto reps = static_cast<std::size_t>(config.replications);
  result.records.resize(cells * reps);
  parallel_for(cells * reps, result.workers, [&](std::size_t job) {
    const std::size_t cell = job / reps;
    const int rep = static_cast<int>(job % reps);
    const std::size_t ni = cell / config.q_grid.size(), qi = cell % config.q_grid.size();
    const std::uint64_t stream = derive_seed(config.seed, stream_index(cell, rep));
    const std::size_t n = config.sample_sizes[ni];
    result.records[job] = config.kind == StudyKind::Estimation
                              ? estimation_replication(config, n, qi, rep, stream)
                              : selection_replication(config, n, qi, rep, stream);
  });

  const double a1_true = config.weights.front();
  const double rho_true = BindingDensity::make(config.truth_family, config.truth_concentration).mean_resultant_length();
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const std::size_t ni = cell / config.q_grid.size(), qi = cell % config.q_grid.size();
    const auto first = result.records.begin() + static_cast<std::ptrdiff_t>(cell * reps);
    const auto last = first + static_cast<std::ptrdiff_t>(reps);
    if (config.kind == StudyKind::Estimation) {
      EstimationSummary s;
      s.n = config.sample_sizes[ni];
      s.signs = config.q_grid[qi];
      s.replications = config.replications;
      double sa = 0, sa2 = 0, sr = 0, sr2 = 0;
      int covered = 0, recovered = 0;
      for (auto it = first; it != last; ++it) {
        if (!it->converged) ++s.failures;
        sa += it->a1;
        sa2 += (it->a1 - a1_true) * (it->a1 - a1_true);
        sr += it->rho;
        sr2 += (it->rho - rho_true) * (it->rho - rho_true);
        if (std::abs(it->a1 - a1_true) <= kZ975 * it->se_a1) ++covered;
        if (it->selected_signs == s.signs) ++recovered;
      }
      const double m = static_cast<double>(reps);
      s.mean_a1 = sa / m;
      s.rmse_a1 = std::sqrt(sa2 / m);
      s.mean_rho = sr / m;
      s.rmse_rho = std::sqrt(sr2 / m);
      s.coverage_a1 = covered / m;
      s.sign_recovery = recovered / m;
      result.estimation.push_back(std::move(s));
    } else {
      SelectionSummary s;
      s.n = config.sample_sizes[ni];
      s.signs = config.q_grid[qi];
      s.replications = config.replications;
      s.aic_counts.assign(static_cast<std::size_t>(config.max_order), 0);
      s.bic_counts.assign(static_cast<std::size_t>(config.max_order), 0);
      for (auto it = first; it != last; ++it) {
        if (!it->converged) ++s.failures;
        ++s.aic_counts[static_cast<std::size_t>(it->aic_order - 1)];
        ++s.bic_counts[static_cast<std::size_t>(it->bic_order - 1)];
      }
      result.selection.push_back(std::move(s));
    }
  }
  return result;
}

EstimationSummary misspecified_fit_study(const MtdArModel& truth, Family fit_family, std::size_t n,
                                         int replications, std::uint64_t seed, int workers) {
  if (!truth.zero_mean_direction()) throw UnsupportedConfiguration("estimation assumes a zero mean direction");
  StudyConfig c;
  c.kind = StudyKind::Estimation;
  c.weights.assign(truth.weights().begin(), truth.weights().end());
  c.truth_family = truth.binding().family();
  c.truth_concentration = truth.binding().concentration();
  c.fit_family = fit_family;
  c.sample_sizes = {n};
  c.q_grid = {std::vector<int>(truth.signs().begin(), truth.signs().end())};
  c.replications = replications;
  c.seed = seed;
  c.workers = workers;
  return run_study(c).estimation.front();
}

}  // namespace mtdar
