#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mtdar {

using Rng = std::mt19937_64;

/// SplitMix64 finaliser; used to derive independent stream seeds from a master seed.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for stream `index` of a master seed. Independent of how streams are scheduled.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Trapezoid rule for a 2*pi-periodic integrand over [-pi, pi), doubling the
/// node count until successive estimates agree. For integrands analytic in a
/// strip around the real axis the error decays geometrically in the node count.
QuadratureResult periodic_trapezoid(const std::function<double(double)>& f, double abs_tol = 1e-15,
                                    double rel_tol = 1e-13, int min_nodes = 64,
                                    int max_nodes = 1 << 20);

/// Roots of the monic polynomial z^n + c[0] z^{n-1} + ... + c[n-1], from the
/// eigenvalues of its companion matrix.
std::vector<std::complex<double>> monic_roots(std::span<const double> lower_coeffs);

struct RootCluster {
  std::complex<double> value;
  int multiplicity = 1;
};

/// Groups roots closer than `tol` (in both modulus and argument) into one
/// cluster whose value is the member mean.
std::vector<RootCluster> cluster_roots(const std::vector<std::complex<double>>& roots,
                                       double tol = 1e-7);

struct SimplexOptions {
  int max_evaluations = 4000;
  double f_tol = 1e-11;   ///< relative spread of simplex values
  double x_tol = 1e-9;    ///< simplex diameter
  double initial_step = 0.5;
  int restarts = 1;       ///< restarts from the best vertex after convergence
};

struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Nelder-Mead minimisation with adaptive coefficients.
SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                          const Eigen::VectorXd& start, const SimplexOptions& options = {});

/// Spectral radius of a real square matrix.
double spectral_radius(const Eigen::MatrixXd& m);

}  // namespace mtdar
