#include "jtd/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>

#include "jtd/error.hpp"

namespace jtd {

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorKind::kInvalidConfig, what); }

const Json& field(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) malformed(std::string("missing key '") + key + "'");
  return doc.at(key);
}

template <typename T>
T get(const Json& doc, const char* key) {
  try {
    return field(doc, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    malformed(std::string("bad value for '") + key + "': " + e.what());
  }
}

// Non-finite doubles are written as null; null reads back as +inf.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number_or_inf(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

Json optional_number(const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); }

std::optional<double> read_optional(const Json& doc, const char* key) {
  const Json& j = field(doc, key);
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

Json support_json(const SupportSet& s) { return Json(std::vector<int>(s.indices().begin(), s.indices().end())); }

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector vector_from(const Json& j) {
  const auto values = j.get<std::vector<double>>();
  Vector out(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) out(static_cast<Eigen::Index>(i)) = values[i];
  return out;
}

Json estimate_mean(const Estimate& e) { return number(e.mean); }

}  // namespace

Json instance_to_json(const ProblemInstance& inst, std::uint64_t inline_limit) {
  Json doc;
  doc["n"] = inst.n();
  doc["m"] = inst.m();
  doc["l"] = inst.l();
  doc["sigma2"] = inst.sigma2;
  doc["seed"] = inst.noise_seed;
  doc["matrix_seed"] = inst.matrix.seed ? Json(*inst.matrix.seed) : Json(nullptr);
  doc["support"] = support_json(inst.signal.support);
  doc["values"] = vector_json(inst.signal.values);
  doc["y"] = vector_json(inst.observation);
  const auto entries = static_cast<std::uint64_t>(inst.matrix.entries.size());
  if (!inst.matrix.seed || entries <= inline_limit) {
    Json rows = Json::array();
    for (int i = 0; i < inst.n(); ++i) rows.push_back(vector_json(inst.matrix.entries.row(i).transpose()));
    doc["matrix"] = std::move(rows);
  }
  return doc;
}

ProblemInstance instance_from_json(const Json& doc) {
  static const std::set<std::string> known{"n", "m", "l", "sigma2", "seed", "matrix_seed",
                                           "support", "values", "y", "matrix"};
  if (!doc.is_object()) malformed("instance must be a JSON object");
  for (const auto& [key, value] : doc.items())
    if (!known.contains(key)) malformed("unknown instance key '" + key + "'");

  const int n = get<int>(doc, "n");
  const int m = get<int>(doc, "m");
  const int l = get<int>(doc, "l");
  if (n < 1 || m < 1) malformed("n and m must be positive");

  MeasurementMatrix a;
  if (doc.contains("matrix")) {
    const auto rows = get<std::vector<std::vector<double>>>(doc, "matrix");
    if (static_cast<int>(rows.size()) != n) malformed("matrix row count != n");
    Matrix entries(n, m);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != m) malformed("matrix row length != m");
      for (int j = 0; j < m; ++j) entries(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    a = make_matrix(std::move(entries));
    if (!field(doc, "matrix_seed").is_null()) a.seed = get<std::uint64_t>(doc, "matrix_seed");
  } else {
    if (field(doc, "matrix_seed").is_null()) malformed("instance has neither matrix nor matrix_seed");
    a = gen_gaussian_matrix(n, m, get<std::uint64_t>(doc, "matrix_seed"));
  }

  Vector values = vector_from(field(doc, "values"));
  if (values.size() != m) malformed("values length != m");
  SparseSignal x = make_signal(std::move(values));
  const auto support = get<std::vector<int>>(doc, "support");
  if (SupportSet::from_unsorted(support) != x.support) malformed("support does not match nonzero values");
  if (x.sparsity() != l) malformed("l does not match support size");

  const Vector y = vector_from(field(doc, "y"));
  if (y.size() != n) malformed("y length != n");

  // Rebuild with sigma2 = 0 for the derived fields, then install the stored observation.
  ProblemInstance inst = measure(a, x, 0.0, get<std::uint64_t>(doc, "seed"));
  inst.sigma2 = get<double>(doc, "sigma2");
  if (!(inst.sigma2 >= 0.0)) malformed("sigma2 must be >= 0");
  inst.observation = y;
  return inst;
}

Json decode_result_to_json(const DecodeResult& r) {
  Json doc;
  doc["support"] = r.chosen_support ? support_json(*r.chosen_support) : Json(nullptr);
  doc["e0"] = r.e0;
  doc["deviation"] = number(r.deviation);
  doc["typical_count"] = r.typical_count;
  doc["subsets_examined"] = r.subsets_examined;
  doc["estimate"] = vector_json(r.estimate);
  return doc;
}

Json regime_to_json(const RegimeReport& r) {
  Json doc;
  doc["pass"] = r.pass();
  doc["c0"] = number(r.c0);
  doc["c1"] = number(r.c1);
  doc["c2"] = number(r.c2);
  doc["c_exponent"] = number(r.c_exponent);
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"margin", number(c.margin)}});
  doc["checks"] = std::move(checks);
  return doc;
}

RegimeReport regime_from_json(const Json& doc) {
  RegimeReport r;
  r.c0 = number_or_inf(field(doc, "c0"));
  r.c1 = number_or_inf(field(doc, "c1"));
  r.c2 = number_or_inf(field(doc, "c2"));
  r.c_exponent = number_or_inf(field(doc, "c_exponent"));
  for (const auto& c : field(doc, "checks"))
    r.checks.push_back({get<std::string>(c, "name"), get<bool>(c, "pass"), number_or_inf(field(c, "margin"))});
  return r;
}

Json bounds_to_json(const BoundValues& b) {
  Json doc;
  doc["delta"] = number(b.delta);
  doc["delta_prime"] = number(b.delta_prime);
  doc["miss_typicality"] = optional_number(b.miss_typicality);
  doc["false_typicality_one_missed"] = optional_number(b.false_typicality_one_missed);
  doc["false_typicality_disjoint"] = optional_number(b.false_typicality_disjoint);
  doc["eig_deviation_one_sided"] = optional_number(b.eig_deviation_one_sided);
  doc["union_bound_constant"] = optional_number(b.union_bound_constant);
  doc["f_at_inv_l"] = optional_number(b.f_at_inv_l);
  doc["f_at_one"] = optional_number(b.f_at_one);
  return doc;
}

namespace {

BoundValues bounds_from_json(const Json& doc) {
  BoundValues b;
  b.delta = get<double>(doc, "delta");
  b.delta_prime = get<double>(doc, "delta_prime");
  b.miss_typicality = read_optional(doc, "miss_typicality");
  b.false_typicality_one_missed = read_optional(doc, "false_typicality_one_missed");
  b.false_typicality_disjoint = read_optional(doc, "false_typicality_disjoint");
  b.eig_deviation_one_sided = read_optional(doc, "eig_deviation_one_sided");
  b.union_bound_constant = read_optional(doc, "union_bound_constant");
  b.f_at_inv_l = read_optional(doc, "f_at_inv_l");
  b.f_at_one = read_optional(doc, "f_at_one");
  return b;
}

Json record_to_json(const TrialRecord& r) {
  return {{"trial_index", r.trial_index},
          {"decoder_sq_err", number(r.decoder_sq_err)},
          {"gae_sq_err", number(r.gae_sq_err)},
          {"crb_value", number(r.crb_value)},
          {"signal_energy", number(r.signal_energy)},
          {"support_recovered", r.support_recovered},
          {"e0", r.e0},
          {"miss_typicality", r.miss_typicality},
          {"deviation", number(r.deviation)},
          {"typical_count", r.typical_count}};
}

TrialRecord record_from_json(const Json& doc) {
  TrialRecord r;
  r.trial_index = get<int>(doc, "trial_index");
  r.decoder_sq_err = get<double>(doc, "decoder_sq_err");
  r.gae_sq_err = get<double>(doc, "gae_sq_err");
  r.crb_value = get<double>(doc, "crb_value");
  r.signal_energy = get<double>(doc, "signal_energy");
  r.support_recovered = get<bool>(doc, "support_recovered");
  r.e0 = get<bool>(doc, "e0");
  r.miss_typicality = get<bool>(doc, "miss_typicality");
  r.deviation = number_or_inf(field(doc, "deviation"));
  r.typical_count = get<std::uint64_t>(doc, "typical_count");
  return r;
}

}  // namespace

Json config_to_json(const ExperimentConfig& c) {
  Json doc;
  doc["n"] = c.n;
  doc["m"] = c.m;
  doc["l"] = c.l;
  doc["sigma2"] = c.sigma2;
  doc["mu"] = c.mu;
  doc["amplitude_rule"] = std::string(to_string(c.amplitude_rule));
  if (c.zeta) doc["zeta"] = *c.zeta;
  if (c.delta) doc["delta"] = *c.delta;
  doc["trials"] = c.trials;
  doc["master_seed"] = c.master_seed;
  doc["selection_rule"] = std::string(to_string(c.selection_rule));
  if (c.matrix_seed) doc["matrix_seed"] = *c.matrix_seed;
  if (c.signal_seed) doc["signal_seed"] = *c.signal_seed;
  doc["kappa"] = c.kappa;
  doc["epsilon"] = c.epsilon;
  doc["growth_threshold"] = c.growth_threshold;
  doc["rank_tol"] = c.rank_tol;
  doc["max_subsets"] = c.max_subsets;
  return doc;
}

ExperimentConfig config_from_json(const Json& doc) {
  static const std::set<std::string> known{
      "n",      "m",           "l",           "sigma2",        "mu",          "amplitude_rule",
      "zeta",   "delta",       "trials",      "master_seed",   "selection_rule", "output_format",
      "parallelism", "matrix_seed", "signal_seed", "kappa",   "epsilon",     "growth_threshold",
      "rank_tol", "max_subsets"};
  if (!doc.is_object()) malformed("config must be a JSON object");
  for (const auto& [key, value] : doc.items())
    if (!known.contains(key)) malformed("unknown config key '" + key + "'");

  ExperimentConfig c;
  c.n = get<int>(doc, "n");
  c.m = get<int>(doc, "m");
  c.l = get<int>(doc, "l");
  c.sigma2 = get<double>(doc, "sigma2");
  if (doc.contains("mu")) c.mu = get<double>(doc, "mu");
  if (doc.contains("amplitude_rule")) c.amplitude_rule = parse_amplitude_rule(get<std::string>(doc, "amplitude_rule"));
  if (doc.contains("zeta")) c.zeta = get<double>(doc, "zeta");
  if (doc.contains("delta")) c.delta = get<double>(doc, "delta");
  if (doc.contains("trials")) c.trials = get<int>(doc, "trials");
  if (doc.contains("master_seed")) c.master_seed = get<std::uint64_t>(doc, "master_seed");
  if (doc.contains("selection_rule")) c.selection_rule = parse_selection_rule(get<std::string>(doc, "selection_rule"));
  if (doc.contains("output_format")) c.output_format = parse_output_format(get<std::string>(doc, "output_format"));
  if (doc.contains("parallelism")) c.parallelism = get<int>(doc, "parallelism");
  if (doc.contains("matrix_seed")) c.matrix_seed = get<std::uint64_t>(doc, "matrix_seed");
  if (doc.contains("signal_seed")) c.signal_seed = get<std::uint64_t>(doc, "signal_seed");
  if (doc.contains("kappa")) c.kappa = get<double>(doc, "kappa");
  if (doc.contains("epsilon")) c.epsilon = get<double>(doc, "epsilon");
  if (doc.contains("growth_threshold")) c.growth_threshold = get<double>(doc, "growth_threshold");
  if (doc.contains("rank_tol")) c.rank_tol = get<double>(doc, "rank_tol");
  if (doc.contains("max_subsets")) c.max_subsets = get<std::uint64_t>(doc, "max_subsets");
  return c;
}

Json report_to_json(const ExperimentReport& r) {
  Json doc;
  doc["config"] = config_to_json(r.config);
  doc["alpha"] = number(r.alpha);
  doc["beta"] = number(r.beta);
  doc["empirical_mse_decoder"] = estimate_mean(r.mse_decoder);
  doc["empirical_mse_gae"] = estimate_mean(r.mse_gae);
  doc["mean_crb"] = estimate_mean(r.mean_crb);
  doc["gap"] = number(r.gap);
  doc["median_trial_gap"] = number(r.median_trial_gap);
  doc["freq_e0"] = estimate_mean(r.freq_e0);
  doc["freq_miss_typicality"] = estimate_mean(r.freq_miss_typicality);
  doc["freq_support_recovered"] = estimate_mean(r.freq_support_recovered);
  doc["standard_errors"] = {{"empirical_mse_decoder", number(r.mse_decoder.std_error)},
                            {"empirical_mse_gae", number(r.mse_gae.std_error)},
                            {"mean_crb", number(r.mean_crb.std_error)},
                            {"freq_e0", number(r.freq_e0.std_error)},
                            {"freq_miss_typicality", number(r.freq_miss_typicality.std_error)},
                            {"freq_support_recovered", number(r.freq_support_recovered.std_error)}};
  doc["bound_values"] = bounds_to_json(r.bounds);
  doc["regime"] = regime_to_json(r.regime);
  Json trials = Json::array();
  for (const auto& rec : r.records) trials.push_back(record_to_json(rec));
  doc["trials"] = std::move(trials);
  return doc;
}

ExperimentReport report_from_json(const Json& doc) {
  ExperimentReport r;
  r.config = config_from_json(field(doc, "config"));
  r.alpha = get<double>(doc, "alpha");
  r.beta = get<double>(doc, "beta");
  const Json& se = field(doc, "standard_errors");
  auto est = [&](const char* key) { return Estimate{get<double>(doc, key), get<double>(se, key)}; };
  r.mse_decoder = est("empirical_mse_decoder");
  r.mse_gae = est("empirical_mse_gae");
  r.mean_crb = est("mean_crb");
  r.freq_e0 = est("freq_e0");
  r.freq_miss_typicality = est("freq_miss_typicality");
  r.freq_support_recovered = est("freq_support_recovered");
  r.gap = get<double>(doc, "gap");
  r.median_trial_gap = get<double>(doc, "median_trial_gap");
  r.bounds = bounds_from_json(field(doc, "bound_values"));
  r.regime = regime_from_json(field(doc, "regime"));
  for (const auto& t : field(doc, "trials")) r.records.push_back(record_from_json(t));
  return r;
}

std::string format_double(double value) {
  if (!std::isfinite(value)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

void write_csv(const ExperimentReport& r, std::ostream& out) {
  out << "trial_index,decoder_sq_err,gae_sq_err,crb_value,gap,signal_energy,"
         "support_recovered,e0,miss_typicality,deviation,typical_count\n";
  double energy = 0.0;
  double typical = 0.0;
  for (const auto& t : r.records) {
    out << t.trial_index << ',' << format_double(t.decoder_sq_err) << ',' << format_double(t.gae_sq_err) << ','
        << format_double(t.crb_value) << ',' << format_double(std::abs(t.decoder_sq_err - t.crb_value)) << ','
        << format_double(t.signal_energy) << ',' << int(t.support_recovered) << ',' << int(t.e0) << ','
        << int(t.miss_typicality) << ',' << format_double(t.deviation) << ',' << t.typical_count << '\n';
    energy += t.signal_energy;
    typical += static_cast<double>(t.typical_count);
  }
  const double count = static_cast<double>(r.records.size());
  // Summary row: means in the per-trial columns, |mean decoder - mean crb| under gap.
  out << "summary," << format_double(r.mse_decoder.mean) << ',' << format_double(r.mse_gae.mean) << ','
      << format_double(r.mean_crb.mean) << ',' << format_double(r.gap) << ',' << format_double(energy / count)
      << ',' << format_double(r.freq_support_recovered.mean) << ',' << format_double(r.freq_e0.mean) << ','
      << format_double(r.freq_miss_typicality.mean) << ",," << format_double(typical / count) << '\n';
}

}  // namespace

void emit_report(const ExperimentReport& report, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::kJson) {
    out << report_to_json(report).dump(2) << '\n';
  } else {
    write_csv(report, out);
  }
  if (!out) throw Error(ErrorKind::kIo, "failed writing report");
}

void emit_report(const ExperimentReport& report, OutputFormat format, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  emit_report(report, format, out);
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kInvalidConfig, path.string() + ": " + e.what());
  }
}

}  // namespace jtd
