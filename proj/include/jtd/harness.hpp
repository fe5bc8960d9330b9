#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "jtd/bounds.hpp"
#include "jtd/decoder.hpp"
#include "jtd/model.hpp"

namespace jtd {

enum class OutputFormat { kJson, kCsv };

OutputFormat parse_output_format(std::string_view name);
std::string_view to_string(OutputFormat format);

struct ExperimentConfig {
  int n = 0;
  int m = 0;
  int l = 0;
  double sigma2 = 0.0;
  double mu = 1.0;
  AmplitudeRule amplitude_rule = AmplitudeRule::kConstant;
  std::optional<double> zeta;
  std::optional<double> delta;
  int trials = 1;
  std::uint64_t master_seed = 0;
  SelectionRule selection_rule = SelectionRule::kMinDeviation;
  OutputFormat output_format = OutputFormat::kJson;
  /// Worker threads. Not part of the experiment's identity: reports do not
  /// echo it and do not depend on it.
  int parallelism = 1;

  /// Pin A (resp. x) across trials instead of redrawing per trial.
  std::optional<std::uint64_t> matrix_seed;
  std::optional<std::uint64_t> signal_seed;

  double kappa = 1.0;
  double epsilon = 0.3;
  double growth_threshold = kDefaultGrowthThreshold;
  double rank_tol = kDefaultRankTol;
  std::uint64_t max_subsets = kDefaultMaxSubsets;

  /// Throws kInvalidConfig / kBudget.
  void validate() const;
  DecoderConfig decoder_config() const;
};

struct TrialRecord {
  int trial_index = 0;
  double decoder_sq_err = 0.0;
  double gae_sq_err = 0.0;
  double crb_value = 0.0;
  double signal_energy = 0.0;  // ‖x‖²
  bool support_recovered = false;
  bool e0 = false;
  /// The true support failed the typicality test.
  bool miss_typicality = false;
  double deviation = 0.0;
  std::uint64_t typical_count = 0;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// Sample mean and its standard error (sample sd / sqrt(count); 0 for one sample).
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;

  friend bool operator==(const Estimate&, const Estimate&) = default;
};

/// Analytical bounds at the configured parameters. Entries whose
/// preconditions fail at this configuration are left empty.
struct BoundValues {
  double delta = 0.0;
  double delta_prime = 0.0;
  std::optional<double> miss_typicality;
  /// Impostor sharing L-1 support entries (missed energy mu²).
  std::optional<double> false_typicality_one_missed;
  /// Fully disjoint impostor (missed energy L mu²).
  std::optional<double> false_typicality_disjoint;
  std::optional<double> eig_deviation_one_sided;
  std::optional<double> union_bound_constant;
  std::optional<double> f_at_inv_l;
  std::optional<double> f_at_one;

  friend bool operator==(const BoundValues&, const BoundValues&) = default;
};

struct ExperimentReport {
  ExperimentConfig config;
  double alpha = 0.0;
  double beta = 0.0;
  Estimate mse_decoder;
  Estimate mse_gae;
  Estimate mean_crb;
  /// |mse_decoder - mean_crb|
  double gap = 0.0;
  /// Median over trials of |decoder_sq_err - crb_value|.
  double median_trial_gap = 0.0;
  Estimate freq_e0;
  Estimate freq_miss_typicality;
  Estimate freq_support_recovered;
  BoundValues bounds;
  RegimeReport regime;
  std::vector<TrialRecord> records;
};

/// Pure function of (config, trial_index).
TrialRecord run_trial(const ExperimentConfig& config, int trial_index);

/// Runs config.trials trials on config.parallelism threads.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Summary statistics from per-trial records (index order).
ExperimentReport summarize(const ExperimentConfig& config, std::vector<TrialRecord> records);

BoundValues evaluate_bounds(const ExperimentConfig& config);
RegimeReport evaluate_regime(const ExperimentConfig& config, double x_norm_sq);

struct Dims {
  int n;
  int m;
  int l;
};

/// One report per size; every size is budget-checked before any trial runs.
std::vector<ExperimentReport> run_size_sweep(const ExperimentConfig& base, const std::vector<Dims>& sizes);

/// Multiplies (n, m, l) by each factor, which keeps alpha and beta fixed.
std::vector<ExperimentReport> run_gap_sweep(const ExperimentConfig& base, const std::vector<int>& scale_factors);

}  // namespace jtd
