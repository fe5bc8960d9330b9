// Command-line front end: decode single instances, run Monte Carlo
// experiments and size sweeps, and print regime checks and bound values.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "jtd/bounds.hpp"
#include "jtd/decoder.hpp"
#include "jtd/error.hpp"
#include "jtd/harness.hpp"
#include "jtd/model.hpp"
#include "jtd/rng.hpp"
#include "jtd/serialize.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

bool is_validation_error(jtd::ErrorKind kind) {
  switch (kind) {
    case jtd::ErrorKind::kInvalidConfig:
    case jtd::ErrorKind::kBudget:
    case jtd::ErrorKind::kRegime:
    case jtd::ErrorKind::kInvalidSparsity:
    case jtd::ErrorKind::kRange:
      return true;
    default:
      return false;
  }
}

void write_json(const jtd::Json& doc, const std::string& out) {
  if (out.empty()) {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::ofstream file(out);
  if (!file) throw jtd::Error(jtd::ErrorKind::kIo, "cannot open " + out + " for writing");
  file << doc.dump(2) << '\n';
}

std::vector<jtd::Dims> parse_sizes(const std::string& text) {
  std::vector<jtd::Dims> out;
  std::stringstream list(text);
  std::string item;
  while (std::getline(list, item, ',')) {
    jtd::Dims d{};
    char x1 = 0, x2 = 0;
    std::istringstream parts(item);
    if (!(parts >> d.n >> x1 >> d.m >> x2 >> d.l) || x1 != 'x' || x2 != 'x')
      throw jtd::Error(jtd::ErrorKind::kInvalidConfig, "size '" + item + "' is not NxMxL");
    out.push_back(d);
  }
  return out;
}

struct DecodeArgs {
  std::string instance;
  std::optional<double> delta;
  std::optional<double> zeta;
  std::string rule = "min-deviation";
  std::string out;
  int threads = 1;
  std::uint64_t max_subsets = jtd::kDefaultMaxSubsets;
};

int run_decode(const DecodeArgs& args) {
  const jtd::ProblemInstance inst = jtd::instance_from_json(jtd::read_json_file(args.instance));
  jtd::DecoderConfig config;
  config.delta = args.delta;
  config.zeta = args.zeta;
  config.selection_rule = jtd::parse_selection_rule(args.rule);
  config.max_subsets = args.max_subsets;
  config.validate();
  jtd::ScanOptions opts;
  opts.threads = args.threads;
  if (inst.l() > 0) opts.mu = inst.signal.mu;
  const auto result = jtd::joint_typicality_decode(inst.matrix, inst.observation, inst.l(), inst.sigma2, config, opts);
  write_json(jtd::decode_result_to_json(result), args.out);
  return kExitOk;
}

struct InstanceArgs {
  int n = 0, m = 0, l = 0;
  double sigma2 = 0.0;
  double mu = 1.0;
  std::string amplitude_rule = "constant";
  std::uint64_t seed = 0;
  std::string out;
};

int run_instance(const InstanceArgs& args) {
  const std::uint64_t root = args.seed;
  const auto a = jtd::gen_gaussian_matrix(args.n, args.m, jtd::derive_seed(root, {1}));
  const auto x = jtd::gen_sparse_signal(args.m, args.l, args.mu, jtd::parse_amplitude_rule(args.amplitude_rule),
                                        jtd::derive_seed(root, {2}));
  const auto inst = jtd::measure(a, x, args.sigma2, jtd::derive_seed(root, {3}));
  write_json(jtd::instance_to_json(inst), args.out);
  return kExitOk;
}

jtd::ExperimentConfig load_config(const std::string& path) {
  jtd::ExperimentConfig c = jtd::config_from_json(jtd::read_json_file(path));
  c.validate();
  return c;
}

void print_sweep_table(const std::vector<jtd::ExperimentReport>& reports, std::ostream& out) {
  out << "n,m,l,alpha,beta,trials,empirical_mse_decoder,mean_crb,gap,median_trial_gap,"
         "freq_support_recovered,freq_e0\n";
  for (const auto& r : reports) {
    out << r.config.n << ',' << r.config.m << ',' << r.config.l << ',' << jtd::format_double(r.alpha) << ','
        << jtd::format_double(r.beta) << ',' << r.config.trials << ',' << jtd::format_double(r.mse_decoder.mean)
        << ',' << jtd::format_double(r.mean_crb.mean) << ',' << jtd::format_double(r.gap) << ','
        << jtd::format_double(r.median_trial_gap) << ',' << jtd::format_double(r.freq_support_recovered.mean)
        << ',' << jtd::format_double(r.freq_e0.mean) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint typicality decoding for noisy compressive sampling"};
  app.require_subcommand(1);

  DecodeArgs decode;
  auto* decode_cmd = app.add_subcommand("decode", "Decode one instance file");
  decode_cmd->add_option("--instance", decode.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  auto* delta_opt = decode_cmd->add_option("--delta", decode.delta, "Typicality slack");
  auto* zeta_opt = decode_cmd->add_option("--zeta", decode.zeta, "Derive the slack from mu(x) of the instance");
  delta_opt->excludes(zeta_opt);
  decode_cmd->add_option("--rule", decode.rule, "min-deviation | first-lex");
  decode_cmd->add_option("--out", decode.out, "Output file (default stdout)");
  decode_cmd->add_option("--threads", decode.threads)->check(CLI::PositiveNumber);
  decode_cmd->add_option("--max-subsets", decode.max_subsets);

  InstanceArgs instance;
  auto* instance_cmd = app.add_subcommand("instance", "Generate a random instance file");
  instance_cmd->add_option("--n", instance.n)->required();
  instance_cmd->add_option("--m", instance.m)->required();
  instance_cmd->add_option("--l", instance.l)->required();
  instance_cmd->add_option("--sigma2", instance.sigma2)->required();
  instance_cmd->add_option("--mu", instance.mu);
  instance_cmd->add_option("--amplitude-rule", instance.amplitude_rule, "constant | uniform_above_mu");
  instance_cmd->add_option("--seed", instance.seed);
  instance_cmd->add_option("--out", instance.out, "Output file (default stdout)");

  std::string config_path, out_path, format;
  int threads = 0;
  auto* experiment_cmd = app.add_subcommand("experiment", "Run a Monte Carlo experiment");
  experiment_cmd->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
  experiment_cmd->add_option("--out", out_path, "Output file (default stdout)");
  experiment_cmd->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  experiment_cmd->add_option("--threads", threads)->check(CLI::PositiveNumber);

  std::string scales, sizes;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the experiment at several problem sizes");
  sweep_cmd->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
  auto* scales_opt = sweep_cmd->add_option("--scales", scales, "Comma-separated multipliers of (n, m, l)");
  auto* sizes_opt = sweep_cmd->add_option("--sizes", sizes, "Comma-separated NxMxL triples");
  scales_opt->excludes(sizes_opt);
  sweep_cmd->add_option("--out", out_path, "Directory for per-size reports");
  sweep_cmd->add_option("--threads", threads)->check(CLI::PositiveNumber);

  auto* validate_cmd = app.add_subcommand("validate", "Print the regime report for a config");
  validate_cmd->add_option("--config", config_path)->required()->check(CLI::ExistingFile);

  auto* bounds_cmd = app.add_subcommand("bounds", "Print analytical bound values for a config");
  bounds_cmd->add_option("--config", config_path)->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*decode_cmd) {
      if (!decode.delta && !decode.zeta)
        throw jtd::Error(jtd::ErrorKind::kInvalidConfig, "one of --delta or --zeta is required");
      return run_decode(decode);
    }
    if (*instance_cmd) return run_instance(instance);

    jtd::ExperimentConfig config = load_config(config_path);
    if (threads > 0) config.parallelism = threads;

    if (*experiment_cmd) {
      if (!format.empty()) config.output_format = jtd::parse_output_format(format);
      const auto report = jtd::run_experiment(config);
      if (out_path.empty())
        jtd::emit_report(report, config.output_format, std::cout);
      else
        jtd::emit_report(report, config.output_format, std::filesystem::path(out_path));
      return kExitOk;
    }
    if (*sweep_cmd) {
      std::vector<jtd::ExperimentReport> reports;
      if (!sizes.empty()) {
        reports = jtd::run_size_sweep(config, parse_sizes(sizes));
      } else {
        std::vector<int> factors;
        std::stringstream list(scales.empty() ? "1" : scales);
        std::string item;
        while (std::getline(list, item, ',')) factors.push_back(std::stoi(item));
        reports = jtd::run_gap_sweep(config, factors);
      }
      print_sweep_table(reports, std::cout);
      if (!out_path.empty()) {
        const std::filesystem::path dir(out_path);
        std::filesystem::create_directories(dir);
        for (const auto& r : reports) {
          const std::string stem = "report_n" + std::to_string(r.config.n) + "_m" + std::to_string(r.config.m) +
                                   "_l" + std::to_string(r.config.l) + ".json";
          jtd::emit_report(r, jtd::OutputFormat::kJson, dir / stem);
        }
        std::ofstream table(dir / "gap_table.csv");
        print_sweep_table(reports, table);
      }
      return kExitOk;
    }
    if (*validate_cmd) {
      double x_norm_sq = config.l * config.mu * config.mu;
      if (config.amplitude_rule == jtd::AmplitudeRule::kUniformAboveMu) x_norm_sq *= 4.0;  // worst case
      const auto report = jtd::evaluate_regime(config, x_norm_sq);
      std::cout << jtd::regime_to_json(report).dump(2) << '\n';
      return report.pass() ? kExitOk : kExitValidation;
    }
    if (*bounds_cmd) {
      std::cout << jtd::bounds_to_json(jtd::evaluate_bounds(config)).dump(2) << '\n';
      return kExitOk;
    }
  } catch (const jtd::Error& e) {
    std::cerr << "jtd: " << e.what() << '\n';
    return is_validation_error(e.kind()) ? kExitValidation : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "jtd: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
