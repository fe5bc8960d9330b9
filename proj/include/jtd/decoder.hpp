#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "jtd/model.hpp"
#include "jtd/subspace.hpp"
#include "jtd/support_set.hpp"

namespace jtd {

inline constexpr std::uint64_t kDefaultMaxSubsets = 50'000'000;
inline constexpr double kDefaultZeta = 0.8;

enum class SelectionRule { kMinDeviation, kFirstLexicographic };

SelectionRule parse_selection_rule(std::string_view name);
std::string_view to_string(SelectionRule rule);

struct DecoderConfig {
  std::optional<double> delta;
  std::optional<double> zeta;
  double rank_tol = kDefaultRankTol;
  SelectionRule selection_rule = SelectionRule::kMinDeviation;
  std::uint64_t max_subsets = kDefaultMaxSubsets;

  static DecoderConfig with_delta(double delta);
  static DecoderConfig with_zeta(double zeta);

  /// Exactly one of delta / zeta, delta > 0, 2/3 < zeta < 1, rank_tol in [0, 1).
  /// Throws kInvalidConfig.
  void validate() const;

  /// The typicality slack. A zeta-configured decoder needs mu(x).
  double resolve_delta(std::optional<double> mu, int n, int l) const;
};

struct DecodeResult {
  Vector estimate;
  std::optional<SupportSet> chosen_support;
  bool e0 = true;
  /// Deviation of the chosen support; under e0 the smallest deviation seen
  /// over full-rank candidates (+inf if there were none).
  double deviation = 0.0;
  std::uint64_t typical_count = 0;
  std::uint64_t subsets_examined = 0;
};

struct ScanOptions {
  int threads = 1;
  /// Needed only when the config carries zeta instead of delta.
  std::optional<double> mu;
};

/// |(1/N)‖Π⊥_J y‖² − ((N−L)/N) σ²| with L = |J|. Throws kRankDeficient.
double typicality_deviation(const MeasurementMatrix& a, const SupportSet& j, const Vector& y, double sigma2,
                            double rank_tol = kDefaultRankTol);

/// Full rank at rank_tol and deviation strictly below delta.
bool is_jointly_typical(const MeasurementMatrix& a, const SupportSet& j, const Vector& y, double sigma2,
                        double delta, double rank_tol = kDefaultRankTol);

/// Least squares on the true support, zero elsewhere.
Vector genie_estimate(const MeasurementMatrix& a, const SupportSet& i, const Vector& y,
                      double rank_tol = kDefaultRankTol);

/// Exhaustive scan over every size-l support. Result does not depend on
/// opts.threads.
DecodeResult joint_typicality_decode(const MeasurementMatrix& a, const Vector& y, int l, double sigma2,
                                     const DecoderConfig& config, const ScanOptions& opts = {});

struct SubsetVerdict {
  SupportSet support;
  bool full_rank = false;
  bool typical = false;
  double deviation = 0.0;  // +inf when rank deficient
};

/// Per-support verdicts exactly as the decoder's scan decides them, in
/// lexicographic order, with deviations from the orthogonal factorization.
std::vector<SubsetVerdict> scan_verdicts(const MeasurementMatrix& a, const Vector& y, int l, double sigma2,
                                         double delta, double rank_tol = kDefaultRankTol,
                                         std::uint64_t max_subsets = kDefaultMaxSubsets);

}  // namespace jtd
