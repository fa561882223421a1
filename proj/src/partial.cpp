#include "mtdar/partial.hpp"

#include <cmath>

#include "mtdar/errors.hpp"

namespace mtdar {

std::vector<double> durbin_levinson_pacf(std::span<const double> acf, int max_lag) {
  if (max_lag < 1 || static_cast<std::size_t>(max_lag) >= acf.size())
    throw ContractViolation("durbin_levinson_pacf: need 1 <= K < acf.size()");
  std::vector<double> pacf;
  std::vector<double> phi, prev;
  double v = acf[0];
  for (int k = 1; k <= max_lag; ++k) {
    if (v <= 1e-14 * std::abs(acf[0]))
      throw NumericError("Durbin-Levinson: innovation variance vanished at lag " + std::to_string(k));
    double num = acf[static_cast<std::size_t>(k)];
    for (int j = 1; j < k; ++j) num -= prev[j - 1] * acf[static_cast<std::size_t>(k - j)];
    const double kk = num / v;
    phi.assign(static_cast<std::size_t>(k), 0.0);
    for (int j = 1; j < k; ++j) phi[j - 1] = prev[j - 1] - kk * prev[k - j - 1];
    phi[k - 1] = kk;
    v *= 1.0 - kk * kk;
    pacf.push_back(kk);
    prev = phi;
  }
  return pacf;
}

CpacfResult cpacf(const MtdArModel& model, int max_lag) {
  if (max_lag < 1) throw ContractViolation("cpacf: max_lag must be positive");
  if (!model.zero_mean_direction())
    throw UnsupportedConfiguration("theoretical CPACF requires zero binding mean direction");
  const auto seq = gamma_sequence_diagonal(model, max_lag);
  std::vector<double> rc, rs;
  for (int k = 0; k <= max_lag; ++k) {
    rc.push_back(2.0 * seq[k](0, 0));
    rs.push_back(2.0 * seq[k](1, 1));
  }
  const auto pc = durbin_levinson_pacf(rc, max_lag);
  const auto ps = durbin_levinson_pacf(rs, max_lag);
  CpacfResult out;
  for (int k = 0; k < max_lag; ++k) out.values.push_back(pc[k] * ps[k]);
  return out;
}

namespace {

// (i, j) block of the s x s block matrix; `last` supplies the final column.
template <typename Block, typename Last>
double block_determinant(int s, Block block, Last last) {
  Eigen::MatrixXd m(2 * s, 2 * s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      m.block<2, 2>(2 * i, 2 * j) = j + 1 < s ? block(i, j) : last(i);
  return m.determinant();
}

}  // namespace

double cpacf_determinant_ratio(const LagCovSequence& gammas, int lag) {
  if (lag < 1 || lag > gammas.max_lag()) throw ContractViolation("lag out of range");
  const int s = lag;
  auto block = [&](int i, int j) { return gammas[std::abs(i - j)]; };
  const double num = block_determinant(s, block, [&](int i) { return gammas[i + 1]; });
  const double den = block_determinant(s, block, [&](int i) { return gammas[std::abs(i - s + 1)]; });
  if (std::abs(den) < 1e-300) throw NumericError("singular CPACF denominator");
  return num / den;
}

CpacfResult sample_cpacf(const AngleSeries& series, int max_lag) {
  if (max_lag < 1 || 2 * static_cast<std::size_t>(max_lag) >= series.size())
    throw ContractViolation("sample_cpacf: need 1 <= K < n/2");
  const auto g = sample_gamma(series, max_lag);
  CpacfResult out;
  out.kind = CovKind::Sample;
  for (int s = 1; s <= max_lag; ++s) {
    auto block = [&](int i, int j) -> Eigen::Matrix2d {
      return i <= j ? Eigen::Matrix2d(g[j - i]) : Eigen::Matrix2d(g[i - j].transpose());
    };
    const double num = block_determinant(s, block, [&](int i) { return g[i + 1]; });
    const double den = block_determinant(s, block, [&](int i) { return block(i, s - 1); });
    if (std::abs(den) < 1e-300) throw NumericError("singular sample CPACF denominator");
    out.values.push_back(num / den);
  }
  return out;
}

}  // namespace mtdar
