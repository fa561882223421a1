#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/StdVector>

#include "mtdar/model.hpp"
#include "mtdar/numeric.hpp"

namespace mtdar {

enum class CovKind { Theoretical, Sample };

/// Gamma_0 .. Gamma_K, the lag covariance matrices E[U_{t+k} U_t^T] of U_t = (cos, sin).
struct LagCovSequence {
  std::vector<Eigen::Matrix2d, Eigen::aligned_allocator<Eigen::Matrix2d>> matrices;
  CovKind kind = CovKind::Theoretical;

  int max_lag() const { return static_cast<int>(matrices.size()) - 1; }
  const Eigen::Matrix2d& operator[](int k) const { return matrices[static_cast<std::size_t>(k)]; }
  /// Gamma_k for negative k as Gamma_{-k}^T.
  Eigen::Matrix2d at(int k) const { return k >= 0 ? Eigen::Matrix2d((*this)[k]) : Eigen::Matrix2d((*this)[-k].transpose()); }
  std::vector<double> determinants() const;
};

/// Theoretical sequence. Uses the scalar route when the binding mean direction is zero
/// and the block route otherwise.
LagCovSequence gamma_sequence(const MtdArModel& model, int max_lag);

/// Block route: Gamma_1..Gamma_{p-1} from the 4(p-1) linear system obtained by
/// vectorising Gamma_k = sum_i a_i D_1 Q_i Gamma_{k-i} with Gamma_{-j} = Gamma_j^T.
LagCovSequence gamma_sequence_block(const MtdArModel& model, int max_lag);

/// Zero-mean-direction route: two scalar Yule-Walker systems for gamma_11 and gamma_22.
LagCovSequence gamma_sequence_diagonal(const MtdArModel& model, int max_lag);

/// AR coefficients of the cos (component 1) or sin (component 2) process:
/// c_i = a_i rho_1 or q_i a_i rho_1, so phi(z) = 1 - sum c_i z^i.
std::vector<double> component_ar_coefficients(const MtdArModel& model, int component);

/// CACF r_0..r_K with r_k = det Gamma_k / det Gamma_0.
std::vector<double> cacf(const MtdArModel& model, int max_lag);

/// r_k = (sum_i G_{1,i}^k sum_j A_{1,ij} k^j)(sum_i G_{2,i}^k sum_j A_{2,ij} k^j).
struct CacfClosedForm {
  std::vector<RootCluster> roots_1, roots_2;
  std::vector<std::vector<std::complex<double>>> coeffs_1, coeffs_2;
  bool confluent = false;  ///< some root cluster has multiplicity > 1
  bool ambiguous = false;  ///< distinct clusters closer than 1e-4; the basis is ill-conditioned

  /// 2 gamma_{k,jj} for component j in {1, 2}.
  std::complex<double> component(int j, int k) const;
  std::complex<double> evaluate_complex(int k) const { return component(1, k) * component(2, k); }
  double evaluate(int k) const { return evaluate_complex(k).real(); }
};

CacfClosedForm cacf_closed_form(const MtdArModel& model);

/// Gamma-hat_k = 1/(n-k) sum_{t>k} U_t U_{t-k}^T (no centring).
LagCovSequence sample_gamma(const AngleSeries& series, int max_lag);

std::vector<double> sample_cacf(const AngleSeries& series, int max_lag);

}  // namespace mtdar
