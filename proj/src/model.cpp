#include "jtd/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "jtd/error.hpp"
#include "jtd/rng.hpp"

namespace jtd {

AmplitudeRule parse_amplitude_rule(std::string_view name) {
  if (name == "constant") return AmplitudeRule::kConstant;
  if (name == "uniform_above_mu") return AmplitudeRule::kUniformAboveMu;
  throw Error(ErrorKind::kInvalidConfig, "unknown amplitude rule '" + std::string(name) + "'");
}

std::string_view to_string(AmplitudeRule rule) {
  return rule == AmplitudeRule::kConstant ? "constant" : "uniform_above_mu";
}

MeasurementMatrix gen_gaussian_matrix(int n, int m, std::uint64_t seed, std::uint64_t element_budget) {
  if (n < 1 || m < 1) throw Error(ErrorKind::kShapeMismatch, "matrix dimensions must be positive");
  const auto elements = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(m);
  if (elements > element_budget)
    throw Error(ErrorKind::kDimensionOverflow,
                std::to_string(n) + "x" + std::to_string(m) + " exceeds element budget " +
                    std::to_string(element_budget));
  Stream stream(derive_seed(seed, {0x4d41545249ULL}));
  Matrix entries(n, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) entries(i, j) = stream.normal();
  return MeasurementMatrix{std::move(entries), seed};
}

MeasurementMatrix make_matrix(Matrix entries) {
  if (entries.rows() < 1 || entries.cols() < 1)
    throw Error(ErrorKind::kShapeMismatch, "matrix dimensions must be positive");
  return MeasurementMatrix{std::move(entries), std::nullopt};
}

SparseSignal gen_sparse_signal(int m, int l, double mu, AmplitudeRule rule, std::uint64_t seed) {
  if (m < 1 || l < 0 || l >= m)
    throw Error(ErrorKind::kInvalidSparsity, "need 0 <= l < m, got l=" + std::to_string(l) +
                                                 " m=" + std::to_string(m));
  if (!(mu > 0.0) || !std::isfinite(mu)) throw Error(ErrorKind::kDomain, "mu must be positive");

  Stream stream(derive_seed(seed, {0x5349474eULL}));
  // Partial Fisher-Yates: the first l slots are a uniform size-l subset.
  std::vector<int> pool(static_cast<std::size_t>(m));
  std::iota(pool.begin(), pool.end(), 0);
  for (int k = 0; k < l; ++k) {
    const auto pick = k + static_cast<int>(stream.below(static_cast<std::uint64_t>(m - k)));
    std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(pick)]);
  }
  std::vector<int> chosen(pool.begin(), pool.begin() + l);
  std::sort(chosen.begin(), chosen.end());

  Vector values = Vector::Zero(m);
  double min_mag = std::numeric_limits<double>::infinity();
  for (int index : chosen) {
    const double sign = stream.below(2) == 0 ? 1.0 : -1.0;
    const double mag = rule == AmplitudeRule::kConstant ? mu : mu * (1.0 + stream.uniform());
    values(index) = sign * mag;
    min_mag = std::min(min_mag, mag);
  }
  return SparseSignal{std::move(values), SupportSet(std::move(chosen)), l > 0 ? min_mag : 0.0};
}

SparseSignal make_signal(Vector values) {
  std::vector<int> support;
  double min_mag = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) != 0.0) {
      support.push_back(static_cast<int>(i));
      min_mag = std::min(min_mag, std::abs(values(i)));
    }
  }
  const double mu = support.empty() ? 0.0 : min_mag;
  return SparseSignal{std::move(values), SupportSet(std::move(support)), mu};
}

ProblemInstance measure(const MeasurementMatrix& matrix, const SparseSignal& signal, double sigma2,
                        std::uint64_t seed) {
  if (matrix.n_cols() != signal.length())
    throw Error(ErrorKind::kShapeMismatch, "matrix has " + std::to_string(matrix.n_cols()) +
                                               " columns, signal has length " +
                                               std::to_string(signal.length()));
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2))
    throw Error(ErrorKind::kDomain, "sigma2 must be finite and >= 0");

  Vector y = matrix.entries * signal.values;
  if (sigma2 > 0.0) {
    Stream stream(derive_seed(seed, {0x4e4f495345ULL}));
    const double sd = std::sqrt(sigma2);
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += sd * stream.normal();
  }

  const int n = matrix.n_rows();
  const int l = signal.sparsity();
  ProblemInstance out{matrix, signal, sigma2, std::move(y), 0.0, 0.0, seed};
  out.alpha = static_cast<double>(l) / n;
  out.beta = l > 0 ? static_cast<double>(matrix.n_cols()) / l : std::numeric_limits<double>::infinity();
  return out;
}

SparsityParams sparsity_params(int n, int m, int l) {
  if (l < 1 || l > n) throw Error(ErrorKind::kInvalidSparsity, "need 1 <= l <= n");
  if (m <= 2 * l)
    throw Error(ErrorKind::kRegime, "beta = m/l = " + std::to_string(static_cast<double>(m) / l) +
                                        " is not > 2");
  return {static_cast<double>(l) / n, static_cast<double>(m) / l};
}

}  // namespace jtd
