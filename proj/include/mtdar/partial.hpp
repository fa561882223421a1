#pragma once

#include <span>
#include <vector>

#include "mtdar/correlation.hpp"

namespace mtdar {

/// psi_1..psi_K (values[0] is lag 1).
struct CpacfResult {
  std::vector<double> values;
  CovKind kind = CovKind::Theoretical;
};

/// Scalar PACF phi_{11}..phi_{KK} from autocorrelations acf[0..K] (acf[0] = 1)
/// by the Durbin-Levinson recursion.
std::vector<double> durbin_levinson_pacf(std::span<const double> acf, int max_lag);

/// Theoretical CPACF for a zero-mean-direction model, as the product of the
/// cos- and sin-component PACFs.
CpacfResult cpacf(const MtdArModel& model, int max_lag);

/// psi_s as the ratio of 2s x 2s block determinants built from Gamma_0..Gamma_s
/// (theoretical layout, Gamma_{|i-j|} blocks). Used as a cross-check for small s.
double cpacf_determinant_ratio(const LagCovSequence& gammas, int lag);

/// Sample CPACF: the block-determinant ratio with Gamma-hat blocks, transposed
/// below the diagonal. Requires K < n / 2.
CpacfResult sample_cpacf(const AngleSeries& series, int max_lag);

}  // namespace mtdar
