#include "jtd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "jtd/error.hpp"
#include "jtd/rng.hpp"

namespace jtd {

OutputFormat parse_output_format(std::string_view name) {
  if (name == "json") return OutputFormat::kJson;
  if (name == "csv") return OutputFormat::kCsv;
  throw Error(ErrorKind::kInvalidConfig, "unknown output format '" + std::string(name) + "'");
}

std::string_view to_string(OutputFormat format) { return format == OutputFormat::kJson ? "json" : "csv"; }

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::kInvalidConfig, what); };
  if (n < 1 || m < 1) fail("n and m must be positive");
  if (l < 1 || l >= m || l > n) fail("need 1 <= l <= n and l < m");
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) fail("sigma2 must be finite and >= 0");
  if (!(mu > 0.0) || !std::isfinite(mu)) fail("mu must be positive");
  if (trials < 1) fail("trials must be >= 1");
  if (parallelism < 1) fail("parallelism must be >= 1");
  if (!(kappa > 0.0)) fail("kappa must be positive");
  if (!(epsilon >= 0.0)) fail("epsilon must be >= 0");
  decoder_config().validate();
  if (zeta && l >= n) fail("zeta-derived delta needs l < n");
  const auto count = binomial(m, l);
  if (!count || *count > max_subsets)
    throw Error(ErrorKind::kBudget, "C(" + std::to_string(m) + ", " + std::to_string(l) +
                                        ") exceeds max_subsets=" + std::to_string(max_subsets));
}

DecoderConfig ExperimentConfig::decoder_config() const {
  DecoderConfig c;
  c.delta = delta;
  c.zeta = zeta;
  c.rank_tol = rank_tol;
  c.selection_rule = selection_rule;
  c.max_subsets = max_subsets;
  return c;
}

TrialRecord run_trial(const ExperimentConfig& config, int trial_index) {
  const std::uint64_t trial_seed = derive_seed(config.master_seed, {static_cast<std::uint64_t>(trial_index)});
  const std::uint64_t matrix_seed = config.matrix_seed.value_or(derive_seed(trial_seed, {1}));
  const std::uint64_t signal_seed = config.signal_seed.value_or(derive_seed(trial_seed, {2}));
  const std::uint64_t noise_seed = derive_seed(trial_seed, {3});

  const MeasurementMatrix a = gen_gaussian_matrix(config.n, config.m, matrix_seed);
  const SparseSignal x = gen_sparse_signal(config.m, config.l, config.mu, config.amplitude_rule, signal_seed);
  const ProblemInstance inst = measure(a, x, config.sigma2, noise_seed);

  const DecoderConfig dc = config.decoder_config();
  const double delta = dc.resolve_delta(x.mu, config.n, config.l);
  const DecodeResult decoded =
      joint_typicality_decode(a, inst.observation, config.l, config.sigma2, dc, ScanOptions{1, x.mu});
  const Vector gae = genie_estimate(a, x.support, inst.observation, config.rank_tol);

  TrialRecord r;
  r.trial_index = trial_index;
  r.decoder_sq_err = (decoded.estimate - x.values).squaredNorm();
  r.gae_sq_err = (gae - x.values).squaredNorm();
  r.crb_value = crb_gae(a, x.support, config.sigma2);
  r.signal_energy = x.values.squaredNorm();
  r.support_recovered = decoded.chosen_support && *decoded.chosen_support == x.support;
  r.e0 = decoded.e0;
  r.miss_typicality = !is_jointly_typical(a, x.support, inst.observation, config.sigma2, delta, config.rank_tol);
  r.deviation = decoded.deviation;
  r.typical_count = decoded.typical_count;
  return r;
}

namespace {

template <typename Field>
Estimate estimate(const std::vector<TrialRecord>& records, Field field) {
  Estimate e;
  const double count = static_cast<double>(records.size());
  double sum = 0.0;
  for (const auto& r : records) sum += field(r);
  e.mean = sum / count;
  if (records.size() > 1) {
    double ss = 0.0;
    for (const auto& r : records) {
      const double d = field(r) - e.mean;
      ss += d * d;
    }
    e.std_error = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
  }
  return e;
}

double median(std::vector<double> values) {
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

template <typename F>
std::optional<double> attempt(F f) {
  try {
    return f();
  } catch (const Error&) {
    return std::nullopt;
  }
}

DeltaPair config_deltas(const ExperimentConfig& c) {
  if (c.delta) return {*c.delta, *c.delta * c.n / (c.n - c.l)};
  return delta_from_zeta(*c.zeta, c.mu, c.n, c.l);
}

}  // namespace

BoundValues evaluate_bounds(const ExperimentConfig& c) {
  BoundValues b;
  if (c.l >= c.n) return b;
  const DeltaPair d = config_deltas(c);
  b.delta = d.delta;
  b.delta_prime = d.delta_prime;
  const double mu2 = c.mu * c.mu;
  const double alpha = static_cast<double>(c.l) / c.n;
  const double beta = static_cast<double>(c.m) / c.l;

  b.miss_typicality = attempt([&] { return miss_typicality_bound(c.n, c.l, c.sigma2, d.delta); });
  b.false_typicality_one_missed =
      attempt([&] { return false_typicality_bound(c.n, c.l, mu2, c.sigma2, d.delta_prime); });
  if (c.m >= 2 * c.l)
    b.false_typicality_disjoint =
        attempt([&] { return false_typicality_bound(c.n, c.l, c.l * mu2, c.sigma2, d.delta_prime); });
  b.eig_deviation_one_sided = attempt([&] { return eig_deviation_bound(c.m, alpha, beta, c.epsilon); });
  b.union_bound_constant = attempt([&] { return union_bound_constant(c.l * mu2, alpha, c.sigma2); });
  if (beta > 1.0) {
    const ExponentParams p{c.l, beta, (c.n - c.l) / (4.0 * c.l), mu2, d.delta_prime, c.sigma2};
    const auto [at_inv_l, at_one] = f_endpoints(p);
    b.f_at_inv_l = at_inv_l;
    b.f_at_one = at_one;
  }
  return b;
}

RegimeReport evaluate_regime(const ExperimentConfig& c, double x_norm_sq) {
  RegimeParams p;
  p.n = c.n;
  p.m = c.m;
  p.l = c.l;
  p.sigma2 = c.sigma2;
  p.mu = c.mu;
  p.kappa = c.kappa;
  p.epsilon = c.epsilon;
  p.growth_threshold = c.growth_threshold;
  p.zeta = c.zeta ? *c.zeta : (c.l < c.n ? config_deltas(c).delta_prime / (c.mu * c.mu) : 0.0);
  return validate_regime(p, x_norm_sq);
}

ExperimentReport summarize(const ExperimentConfig& config, std::vector<TrialRecord> records) {
  if (records.empty()) throw Error(ErrorKind::kInvalidConfig, "no trial records");
  ExperimentReport rep;
  rep.config = config;
  rep.alpha = static_cast<double>(config.l) / config.n;
  rep.beta = static_cast<double>(config.m) / config.l;
  rep.mse_decoder = estimate(records, [](const TrialRecord& r) { return r.decoder_sq_err; });
  rep.mse_gae = estimate(records, [](const TrialRecord& r) { return r.gae_sq_err; });
  rep.mean_crb = estimate(records, [](const TrialRecord& r) { return r.crb_value; });
  rep.gap = std::abs(rep.mse_decoder.mean - rep.mean_crb.mean);
  rep.freq_e0 = estimate(records, [](const TrialRecord& r) { return r.e0 ? 1.0 : 0.0; });
  rep.freq_miss_typicality = estimate(records, [](const TrialRecord& r) { return r.miss_typicality ? 1.0 : 0.0; });
  rep.freq_support_recovered =
      estimate(records, [](const TrialRecord& r) { return r.support_recovered ? 1.0 : 0.0; });

  std::vector<double> gaps;
  gaps.reserve(records.size());
  double max_energy = 0.0;
  for (const auto& r : records) {
    gaps.push_back(std::abs(r.decoder_sq_err - r.crb_value));
    max_energy = std::max(max_energy, r.signal_energy);
  }
  rep.median_trial_gap = median(std::move(gaps));
  rep.bounds = evaluate_bounds(config);
  rep.regime = evaluate_regime(config, max_energy);
  rep.records = std::move(records);
  return rep;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<TrialRecord> records(static_cast<std::size_t>(config.trials));

  std::atomic<int> next{0};
  std::mutex failure_mutex;
  int failed_index = config.trials;
  std::exception_ptr failure;
  auto worker = [&] {
    for (int t = next++; t < config.trials; t = next++) {
      try {
        records[static_cast<std::size_t>(t)] = run_trial(config, t);
      } catch (...) {
        // Report the lowest failing trial so the error is schedule independent.
        std::lock_guard lock(failure_mutex);
        if (t < failed_index) {
          failed_index = t;
          failure = std::current_exception();
        }
      }
    }
  };
  const int pool = std::min(config.parallelism, config.trials);
  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::jthread> workers;
    for (int k = 0; k < pool; ++k) workers.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return summarize(config, std::move(records));
}

std::vector<ExperimentReport> run_size_sweep(const ExperimentConfig& base, const std::vector<Dims>& sizes) {
  std::vector<ExperimentConfig> configs;
  for (const Dims& d : sizes) {
    ExperimentConfig c = base;
    c.n = d.n;
    c.m = d.m;
    c.l = d.l;
    c.validate();
    configs.push_back(c);
  }
  std::vector<ExperimentReport> out;
  for (const auto& c : configs) out.push_back(run_experiment(c));
  return out;
}

std::vector<ExperimentReport> run_gap_sweep(const ExperimentConfig& base, const std::vector<int>& scale_factors) {
  std::vector<Dims> sizes;
  for (int f : scale_factors) {
    if (f < 1) throw Error(ErrorKind::kInvalidConfig, "scale factors must be positive");
    sizes.push_back({base.n * f, base.m * f, base.l * f});
  }
  return run_size_sweep(base, sizes);
}

}  // namespace jtd
