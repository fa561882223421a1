#include "mtdar/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mtdar/errors.hpp"

namespace mtdar {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

QuadratureResult periodic_trapezoid(const std::function<double(double)>& f, double abs_tol,
                                    double rel_tol, int min_nodes, int max_nodes) {
  constexpr double pi = std::numbers::pi;
  QuadratureResult out;
  int n = std::max(min_nodes, 4);
  double h = 2.0 * pi / n;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) sum += f(-pi + j * h);
  out.evaluations = n;
  double estimate = sum * h;
  bool agreed_once = false;  // symmetric integrands can make two levels agree by accident
  while (n < max_nodes) {
    // Midpoints of the current grid refine it to 2n nodes.
    double mid = 0.0;
    for (int j = 0; j < n; ++j) mid += f(-pi + (j + 0.5) * h);
    out.evaluations += n;
    sum += mid;
    n *= 2;
    h *= 0.5;
    const double refined = sum * h;
    const double diff = std::abs(refined - estimate);
    estimate = refined;
    const bool agreed = diff <= std::max(abs_tol, rel_tol * std::abs(refined));
    if (agreed && agreed_once) {
      out.value = refined;
      out.error_estimate = diff;
      out.converged = true;
      return out;
    }
    agreed_once = agreed;
    out.error_estimate = diff;
  }
  out.value = estimate;
  return out;
}

std::vector<std::complex<double>> monic_roots(std::span<const double> lower_coeffs) {
  const auto n = static_cast<Eigen::Index>(lower_coeffs.size());
  if (n == 0) return {};
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) companion(0, j) = -lower_coeffs[static_cast<std::size_t>(j)];
  for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success) throw NumericError("companion eigenvalue solver failed");
  std::vector<std::complex<double>> roots(solver.eigenvalues().data(),
                                          solver.eigenvalues().data() + n);
  // A few Newton steps on the polynomial tighten eigenvalue-based roots.
  for (auto& z : roots) {
    for (int it = 0; it < 3; ++it) {
      std::complex<double> p = 1.0, dp = 0.0;
      for (double c : lower_coeffs) {
        dp = dp * z + p;
        p = p * z + c;
      }
      if (std::abs(dp) < 1e-10 * std::max(1.0, std::abs(p))) break;
      const auto step = p / dp;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      if (std::abs(step) > 1e-6 * std::max(1.0, std::abs(z))) break;  // not in the quadratic basin
      z -= step;
    }
  }
  return roots;
}

std::vector<RootCluster> cluster_roots(const std::vector<std::complex<double>>& roots, double tol) {
  std::vector<RootCluster> clusters;
  std::vector<std::vector<std::complex<double>>> members;
  for (const auto& z : roots) {
    bool placed = false;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      const auto& ref = members[c].front();
      const double dmod = std::abs(std::abs(z) - std::abs(ref));
      double darg = std::abs(std::arg(z) - std::arg(ref));
      darg = std::min(darg, 2.0 * std::numbers::pi - darg);
      if (std::abs(z - ref) < tol || (dmod < tol && darg * std::abs(ref) < tol)) {
        members[c].push_back(z);
        placed = true;
        break;
      }
    }
    if (!placed) {
      members.push_back({z});
      clusters.push_back({z, 1});
    }
  }
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    std::complex<double> mean = 0.0;
    for (const auto& z : members[c]) mean += z;
    clusters[c].value = mean / static_cast<double>(members[c].size());
    clusters[c].multiplicity = static_cast<int>(members[c].size());
    // A real polynomial's cluster of real roots must stay real.
    if (std::abs(clusters[c].value.imag()) < tol) clusters[c].value.imag(0.0);
  }
  return clusters;
}

SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                          const Eigen::VectorXd& start, const SimplexOptions& options) {
  const auto n = start.size();
  SimplexResult result;
  result.x = start;
  int evaluations = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  Eigen::VectorXd best = start;
  double best_value = eval(best);
  bool converged = false;

  for (int round = 0; round <= options.restarts; ++round) {
    std::vector<Eigen::VectorXd> simplex(static_cast<std::size_t>(n + 1), best);
    std::vector<double> values(static_cast<std::size_t>(n + 1), best_value);
    const double step = round == 0 ? options.initial_step : 0.1 * options.initial_step;
    for (Eigen::Index i = 0; i < n; ++i) {
      auto& v = simplex[static_cast<std::size_t>(i + 1)];
      v(i) += step;
      values[static_cast<std::size_t>(i + 1)] = eval(v);
    }
    std::vector<std::size_t> order(simplex.size());
    converged = false;
    while (evaluations < options.max_evaluations) {
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
      const std::size_t lo = order.front(), hi = order.back(), second = order[order.size() - 2];

      double diameter = 0.0;
      for (const auto& v : simplex) diameter = std::max(diameter, (v - simplex[lo]).lpNorm<Eigen::Infinity>());
      const double spread = std::abs(values[hi] - values[lo]);
      const bool flat = spread <= 4.0 * std::numeric_limits<double>::epsilon() * (std::abs(values[lo]) + 1.0);
      if (flat || (spread <= options.f_tol * (std::abs(values[lo]) + 1e-300) + 1e-300 &&
                   diameter <= options.x_tol * (1.0 + simplex[lo].lpNorm<Eigen::Infinity>()))) {
        converged = true;
        break;
      }

      Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
      for (std::size_t i = 0; i < simplex.size(); ++i)
        if (i != hi) centroid += simplex[i];
      centroid /= static_cast<double>(n);

      const Eigen::VectorXd reflected = centroid + (centroid - simplex[hi]);
      const double fr = eval(reflected);
      if (fr < values[lo]) {
        const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[hi]);
        const double fe = eval(expanded);
        if (fe < fr) {
          simplex[hi] = expanded;
          values[hi] = fe;
        } else {
          simplex[hi] = reflected;
          values[hi] = fr;
        }
        continue;
      }
      if (fr < values[second]) {
        simplex[hi] = reflected;
        values[hi] = fr;
        continue;
      }
      const bool outside = fr < values[hi];
      const Eigen::VectorXd contracted =
          outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                  : Eigen::VectorXd(centroid + 0.5 * (simplex[hi] - centroid));
      const double fc = eval(contracted);
      if (fc < (outside ? fr : values[hi])) {
        simplex[hi] = contracted;
        values[hi] = fc;
        continue;
      }
      for (std::size_t i = 0; i < simplex.size(); ++i) {
        if (i == lo) continue;
        simplex[i] = simplex[lo] + 0.5 * (simplex[i] - simplex[lo]);
        values[i] = eval(simplex[i]);
      }
    }
    const auto it = std::min_element(values.begin(), values.end());
    const auto idx = static_cast<std::size_t>(it - values.begin());
    if (values[idx] <= best_value) {
      best_value = values[idx];
      best = simplex[idx];
    }
    if (evaluations >= options.max_evaluations) break;
  }
  result.x = best;
  result.value = best_value;
  result.evaluations = evaluations;
  result.converged = converged;
  return result;
}

double spectral_radius(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  if (solver.info() != Eigen::Success) throw NumericError("eigenvalue solver failed");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace mtdar
