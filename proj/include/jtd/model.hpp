#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "jtd/support_set.hpp"

namespace jtd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Matrices larger than this many entries are refused by the generator.
inline constexpr std::uint64_t kDefaultElementBudget = std::uint64_t{1} << 27;

struct MeasurementMatrix {
  Matrix entries;
  /// Seed the entries were drawn from; absent for user-supplied matrices.
  std::optional<std::uint64_t> seed;

  int n_rows() const noexcept { return static_cast<int>(entries.rows()); }
  int n_cols() const noexcept { return static_cast<int>(entries.cols()); }
};

struct SparseSignal {
  Vector values;
  SupportSet support;
  double mu = 0.0;  // min nonzero magnitude

  int length() const noexcept { return static_cast<int>(values.size()); }
  int sparsity() const noexcept { return support.size(); }
};

enum class AmplitudeRule { kConstant, kUniformAboveMu };

AmplitudeRule parse_amplitude_rule(std::string_view name);
std::string_view to_string(AmplitudeRule rule);

struct ProblemInstance {
  MeasurementMatrix matrix;
  SparseSignal signal;
  double sigma2 = 0.0;
  Vector observation;
  double alpha = 0.0;  // L / N
  double beta = 0.0;   // M / L, +inf when L = 0
  std::uint64_t noise_seed = 0;

  int n() const noexcept { return matrix.n_rows(); }
  int m() const noexcept { return matrix.n_cols(); }
  int l() const noexcept { return signal.sparsity(); }
};

/// i.i.d. N(0,1) entries, filled column by column from one stream.
MeasurementMatrix gen_gaussian_matrix(int n, int m, std::uint64_t seed,
                                      std::uint64_t element_budget = kDefaultElementBudget);

/// Wraps caller-provided entries (no seed).
MeasurementMatrix make_matrix(Matrix entries);

/// Support uniform over size-l subsets. `constant` gives ±mu entries;
/// `uniform_above_mu` draws magnitudes uniformly from [mu, 2 mu]. Signs are
/// fair coin flips. The stored mu is the realized minimum magnitude.
SparseSignal gen_sparse_signal(int m, int l, double mu, AmplitudeRule rule, std::uint64_t seed);

/// Builds a signal from explicit values; support and mu are read off.
SparseSignal make_signal(Vector values);

/// y = A x + n with n ~ N(0, sigma2 I). sigma2 = 0 gives y = A x exactly.
ProblemInstance measure(const MeasurementMatrix& matrix, const SparseSignal& signal, double sigma2,
                        std::uint64_t seed);

struct SparsityParams {
  double alpha;
  double beta;
};

/// (l/n, m/l). Throws kRegime unless m > 2l, and kInvalidSparsity unless 1 <= l <= n.
SparsityParams sparsity_params(int n, int m, int l);

}  // namespace jtd
