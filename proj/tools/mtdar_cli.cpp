// mtdar: simulate, analyse and fit MTD-AR(p) models on the circle.

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mtdar/correlation.hpp"
#include "mtdar/errors.hpp"
#include "mtdar/inference.hpp"
#include "mtdar/io.hpp"
#include "mtdar/partial.hpp"
#include "mtdar/spectrum.hpp"
#include "mtdar/study.hpp"

#ifndef MTDAR_VERSION
#define MTDAR_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace mtdar;

namespace {

enum Exit { kOk = 0, kUsage = 2, kNumeric = 3, kIo = 4 };

struct Globals {
  std::uint64_t seed = 1;
  std::string unit = "rad";
  std::string out;
};

struct Input {
  std::string model;
  std::string series;
};

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty() || g.out == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    write_text_file(g.out, text);
  }
}

void add_input(CLI::App* cmd, Input& in) {
  auto* m = cmd->add_option("--model", in.model, "model JSON file");
  auto* s = cmd->add_option("--series", in.series, "angle series CSV file");
  m->excludes(s);
  s->excludes(m);
}

void require_one(const Input& in) {
  if (in.model.empty() == in.series.empty()) throw ContractViolation("give exactly one of --model or --series");
}

MtdArModel load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

AngleSeries load_series(const Globals& g, const std::string& path) {
  return read_angles(path, angle_unit_from_string(g.unit));
}

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

std::string signs_label(const std::vector<int>& q) {
  std::string s = "(";
  for (std::size_t i = 0; i < q.size(); ++i) s += (i ? "," : "") + std::to_string(q[i]);
  return s + ")";
}

void write_svg(const std::string& path, const std::vector<PlotSeries>& series, const std::string& title,
               const std::string& xl, const std::string& yl) {
  if (!path.empty()) write_text_file(path, svg_plot(series, title, xl, yl));
}

int run_simulate(const Globals& g, const std::string& model_path, std::size_t n, std::size_t burn_in) {
  const MtdArModel model = load_model(model_path);
  std::ostringstream o;
  write_series_csv(o, simulate(model, n, burn_in, g.seed));
  emit(g, o.str());
  return kOk;
}

int run_acf(const Globals& g, const Input& in, int lags, bool gamma, const std::string& svg) {
  require_one(in);
  std::ostringstream o;
  std::vector<double> r;
  if (!in.model.empty()) {
    const MtdArModel model = load_model(in.model);
    if (gamma) write_gamma_csv(o, gamma_sequence(model, lags));
    r = cacf(model, lags);
  } else {
    const AngleSeries series = load_series(g, in.series);
    if (gamma) write_gamma_csv(o, sample_gamma(series, lags));
    r = sample_cacf(series, lags);
  }
  if (!gamma) write_lag_csv(o, r, 0, "cacf");
  emit(g, o.str());
  PlotSeries ps{"CACF", {}, r, true};
  for (std::size_t k = 0; k < r.size(); ++k) ps.x.push_back(static_cast<double>(k));
  write_svg(svg, {ps}, "Circular autocorrelation", "lag", "r_k");
  return kOk;
}

int run_pacf(const Globals& g, const Input& in, int lags, const std::string& svg) {
  require_one(in);
  const CpacfResult res = !in.model.empty() ? cpacf(load_model(in.model), lags)
                                            : sample_cpacf(load_series(g, in.series), lags);
  std::ostringstream o;
  write_lag_csv(o, res.values, 1, "cpacf");
  emit(g, o.str());
  PlotSeries ps{"CPACF", {}, res.values, true};
  for (std::size_t k = 0; k < res.values.size(); ++k) ps.x.push_back(static_cast<double>(k + 1));
  write_svg(svg, {ps}, "Circular partial autocorrelation", "lag", "psi_k");
  return kOk;
}

int run_spectrum(const Globals& g, const Input& in, int grid, const std::string& window, int window_lag,
                 const std::string& svg) {
  require_one(in);
  std::ostringstream o;
  std::vector<SpectrumPoint> pts;
  if (!in.model.empty()) {
    const SpectralDensity sd(load_model(in.model));
    std::vector<bool> fallback;
    for (double w : frequency_grid(grid)) {
      const SpectralValue v = sd.residue(w);
      pts.push_back({w, v.value});
      fallback.push_back(v.fallback);
    }
    write_spectrum_csv(o, pts, &fallback);
  } else {
    const AngleSeries series = load_series(g, in.series);
    LagWindow lw = LagWindow::none();
    if (window == "bartlett") {
      const int K = window_lag > 0 ? window_lag : static_cast<int>(std::floor(std::sqrt(double(series.size()))));
      lw = LagWindow::bartlett(K);
    }
    pts = periodogram(series, grid, lw);
    write_spectrum_csv(o, pts);
  }
  emit(g, o.str());
  PlotSeries ps{"f(omega)", {}, {}, false};
  for (const auto& p : pts) ps.x.push_back(p.omega), ps.y.push_back(p.value);
  write_svg(svg, {ps}, "Spectral density", "omega", "f");
  return kOk;
}

int run_fit(const Globals& g, const std::string& series_path, int p, int p_max, const std::string& family_name,
            const std::string& criterion, const std::vector<int>& signs, int multistarts) {
  if ((p > 0) == (p_max > 0)) throw ContractViolation("give exactly one of --p or --p-max");
  const AngleSeries series = load_series(g, series_path);
  const Family family = family_from_string(family_name);
  FitOptions opts;
  opts.seed = g.seed;
  opts.multistarts = multistarts;
  nlohmann::json j;
  try {
    if (p > 0) {
      const FitResult r = signs.empty() ? fit(series, p, family, opts) : fit_given_q(series, p, signs, family, opts);
      j = fit_to_json(r);
    } else {
      if (!signs.empty()) throw ContractViolation("--signs only applies with --p");
      j = selection_to_json(select_order(series, p_max, family, criterion_from_string(criterion), opts));
    }
  } catch (const FitFailure& e) {
    std::cerr << "fit failed: " << e.what() << '\n' << fit_to_json(e.best()).dump(2) << '\n';
    return kNumeric;
  }
  emit(g, j.dump(2) + "\n");
  return kOk;
}

int run_study(const Globals& g, const std::string& config_path, std::string out_dir, bool seed_given) {
  if (out_dir.empty()) out_dir = g.out;
  if (out_dir.empty()) throw ContractViolation("study needs an output directory (--out-dir or --out)");
  StudyConfig config = study_config_from_json(read_json_file(config_path));
  if (seed_given) config.seed = g.seed;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());

  const auto t0 = std::chrono::steady_clock::now();
  const StudyResult res = run_study(config);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::vector<std::string> files;
  std::ostringstream table;
  if (config.kind == StudyKind::Estimation) {
    table << "n,q,replications,failures,mean_a1,rmse_a1,mean_rho,rmse_rho,coverage_a1,sign_recovery\n";
    for (const auto& s : res.estimation)
      table << s.n << ',' << csv_field(signs_label(s.signs)) << ',' << s.replications << ',' << s.failures << ','
            << format_number(s.mean_a1) << ',' << format_number(s.rmse_a1) << ',' << format_number(s.mean_rho)
            << ',' << format_number(s.rmse_rho) << ',' << format_number(s.coverage_a1) << ','
            << format_number(s.sign_recovery) << '\n';
    write_text_file((fs::path(out_dir) / "estimation.csv").string(), table.str());
    files.push_back("estimation.csv");
  } else {
    table << "n,q,criterion";
    for (int p = 1; p <= config.max_order; ++p) table << ",p" << p;
    table << ",failures\n";
    for (const auto& s : res.selection) {
      for (int c = 0; c < 2; ++c) {
        const auto& counts = c == 0 ? s.aic_counts : s.bic_counts;
        table << s.n << ',' << csv_field(signs_label(s.signs)) << ',' << (c == 0 ? "aic" : "bic");
        for (int v : counts) table << ',' << v;
        table << ',' << s.failures << '\n';
      }
    }
    write_text_file((fs::path(out_dir) / "selection.csv").string(), table.str());
    files.push_back("selection.csv");
  }

  std::ostringstream reps;
  reps << "n,q,replication,a1,concentration,rho,se_a1,loglik,converged,selected_q,aic_p,bic_p\n";
  for (const auto& r : res.records)
    reps << r.n << ',' << csv_field(signs_label(config.q_grid[r.q_index])) << ',' << r.replication << ','
         << format_number(r.a1) << ',' << format_number(r.concentration) << ',' << format_number(r.rho) << ','
         << format_number(r.se_a1) << ',' << format_number(r.loglik) << ',' << (r.converged ? 1 : 0) << ','
         << csv_field(signs_label(r.selected_signs)) << ',' << r.aic_order << ',' << r.bic_order << '\n';
  write_text_file((fs::path(out_dir) / "replications.csv").string(), reps.str());
  files.push_back("replications.csv");

  nlohmann::json manifest;
  manifest["tool"] = "mtdar";
  manifest["version"] = MTDAR_VERSION;
  manifest["seed"] = config.seed;
  manifest["config"] = study_config_to_json(config);
  manifest["workers"] = res.workers;
  manifest["wall_time_seconds"] = wall;
  manifest["created"] = timestamp();
  manifest["files"] = files;
  write_text_file((fs::path(out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
  std::cout << table.str();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MTD-AR(p) processes on the circle"};
  app.set_version_flag("--version", MTDAR_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "random seed");
  app.add_option("--unit", g.unit, "angle unit of input series")->check(CLI::IsMember({"rad", "deg"}));
  app.add_option("--out", g.out, "output file (directory for study); default stdout");

  auto* sim = app.add_subcommand("simulate", "simulate a series from a model");
  std::string sim_model;
  std::size_t sim_n = 0, burn_in = kDefaultBurnIn;
  sim->add_option("--model", sim_model, "model JSON file")->required();
  sim->add_option("-n,--n", sim_n, "series length")->required()->check(CLI::PositiveNumber);
  sim->add_option("--burn-in", burn_in, "discarded warm-up draws");

  Input acf_in, pacf_in, spec_in;
  int acf_lags = 20, pacf_lags = 20, grid = 512, window_lag = 0;
  bool gamma = false;
  std::string acf_svg, pacf_svg, spec_svg, window = "bartlett";
  auto* acf = app.add_subcommand("acf", "circular autocorrelation (theoretical or sample)");
  add_input(acf, acf_in);
  acf->add_option("-K,--lags", acf_lags, "largest lag")->check(CLI::NonNegativeNumber);
  acf->add_flag("--gamma", gamma, "write the 2x2 lag covariance matrices instead");
  acf->add_option("--svg", acf_svg, "also write an SVG plot");

  auto* pacf = app.add_subcommand("pacf", "circular partial autocorrelation");
  add_input(pacf, pacf_in);
  pacf->add_option("-K,--lags", pacf_lags, "largest lag")->check(CLI::PositiveNumber);
  pacf->add_option("--svg", pacf_svg, "also write an SVG plot");

  auto* spec = app.add_subcommand("spectrum", "spectral density or circular periodogram");
  add_input(spec, spec_in);
  spec->add_option("--grid", grid, "number of frequencies on [-pi, pi)")->check(CLI::Range(8, 1 << 20));
  spec->add_option("--window", window, "periodogram lag window")->check(CLI::IsMember({"none", "bartlett"}));
  spec->add_option("--window-lag", window_lag, "Bartlett truncation lag (default floor(sqrt(n)))");
  spec->add_option("--svg", spec_svg, "also write an SVG plot");

  auto* fitc = app.add_subcommand("fit", "maximum-likelihood fit or order selection");
  std::string fit_series, family = "wrapped_cauchy", criterion = "bic";
  int fit_p = 0, fit_pmax = 0, multistarts = 5;
  std::vector<int> signs;
  fitc->add_option("--series", fit_series, "angle series CSV file")->required();
  fitc->add_option("-p,--p", fit_p, "fixed order")->check(CLI::Range(1, 12));
  fitc->add_option("--p-max", fit_pmax, "select the order among 1..p_max")->check(CLI::Range(1, 12));
  fitc->add_option("--family", family, "binding density")
      ->check(CLI::IsMember({"wrapped_cauchy", "wc", "von_mises", "vm"}));
  fitc->add_option("--criterion", criterion, "aic or bic")->check(CLI::IsMember({"aic", "bic"}));
  fitc->add_option("--signs", signs, "fix q instead of enumerating (with --p)")->delimiter(',');
  fitc->add_option("--multistarts", multistarts, "optimizer starts per sign vector")->check(CLI::PositiveNumber);

  auto* study = app.add_subcommand("study", "Monte Carlo estimation or order-selection study");
  std::string config_path, out_dir;
  study->add_option("--config", config_path, "study config JSON")->required();
  study->add_option("--out-dir", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sim) return run_simulate(g, sim_model, sim_n, burn_in);
    if (*acf) return run_acf(g, acf_in, acf_lags, gamma, acf_svg);
    if (*pacf) return run_pacf(g, pacf_in, pacf_lags, pacf_svg);
    if (*spec) return run_spectrum(g, spec_in, grid, window, window_lag, spec_svg);
    if (*fitc) return run_fit(g, fit_series, fit_p, fit_pmax, family, criterion, signs, multistarts);
    if (*study) return run_study(g, config_path, out_dir, seed_opt->count() > 0);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const UnsupportedConfiguration& e) {
    std::cerr << "unsupported: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  }
  return kUsage;
}
