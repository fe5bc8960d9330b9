#include "jtd/bounds.hpp"

#include <cmath>
#include <limits>

#include "jtd/error.hpp"
#include "jtd/subspace.hpp"

namespace jtd {

double crb_gae(const MeasurementMatrix& a, const SupportSet& i, double sigma2) {
  return sigma2 * trace_inverse_gram(a, i);
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::kDomain, "entropy argument outside [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log1p(-p);
}

double miss_typicality_bound(int n, int l, double sigma2, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorKind::kPrecondition, "delta must be positive");
  if (l >= n) throw Error(ErrorKind::kPrecondition, "need l < n");
  // delta² N² / (4σ⁴ (N-L) + 8 δ N σ²) is the same exponent, finite at σ² = 0.
  const double nn = n;
  const double denom = 4.0 * sigma2 * sigma2 * (nn - l) + 8.0 * delta * nn * sigma2;
  const double exponent = denom > 0.0 ? delta * delta * nn * nn / denom : std::numeric_limits<double>::infinity();
  return 2.0 * std::exp(-exponent);
}

double false_typicality_bound(int n, int l, double missed_energy, double sigma2, double delta_prime) {
  if (!(delta_prime < missed_energy))
    throw Error(ErrorKind::kPrecondition, "delta_prime must be below the missed energy");
  const double ratio = (missed_energy - delta_prime) / (missed_energy + sigma2);
  return std::exp(-0.25 * (n - l) * ratio * ratio);
}

double eig_deviation_bound(int m, double alpha, double beta, double epsilon) {
  if (!(alpha > 0.0) || !(beta > 2.0) || !(epsilon >= 0.0))
    throw Error(ErrorKind::kPrecondition, "need alpha > 0, beta > 2, epsilon >= 0");
  const double rate = std::sqrt(binary_entropy(1.0 / beta)) / std::sqrt(alpha * beta);
  return std::exp(-0.5 * m * rate * epsilon);
}

double f_exponent(double z, const ExponentParams& p) {
  if (!(z > 0.0)) throw Error(ErrorKind::kDomain, "f_exponent needs z > 0");
  const double lz = p.l * z;
  const double ratio = (lz * p.mu2 - p.delta_prime) / (lz * p.mu2 + p.sigma2);
  return lz * std::log(std::exp(1.0) / z) + lz * std::log((p.beta - 1.0) * std::exp(1.0) / z) -
         p.c0 * p.l * ratio * ratio;
}

std::pair<double, double> f_endpoints(const ExponentParams& p) {
  const double l = p.l;
  const double r_small = (p.mu2 - p.delta_prime) / (p.mu2 + p.sigma2);
  const double r_large = (l * p.mu2 - p.delta_prime) / (l * p.mu2 + p.sigma2);
  const double at_inv_l = 2.0 * std::log(l) + 2.0 + std::log(p.beta - 1.0) - p.c0 * l * r_small * r_small;
  const double at_one = l * (2.0 + std::log(p.beta - 1.0)) - p.c0 * l * r_large * r_large;
  return {at_inv_l, at_one};
}

double union_bound_constant(double x_norm_sq, double alpha, double sigma2) {
  const double root = std::sqrt(2.0 * alpha);
  const double gap = 1.0 - 2.0 * root;
  if (!(gap > 0.0)) throw Error(ErrorKind::kSingularity, "2 sqrt(2 alpha) >= 1");
  const double lead = 8.0 * alpha + 4.0 * root;
  return (1.0 + lead * lead / std::pow(gap, 4)) * x_norm_sq + alpha * sigma2 / (gap * gap);
}

DeltaPair delta_from_zeta(double zeta, double mu, int n, int l) {
  if (!(zeta > 2.0 / 3.0 && zeta < 1.0)) throw Error(ErrorKind::kRange, "zeta must lie in (2/3, 1)");
  if (!(mu > 0.0)) throw Error(ErrorKind::kPrecondition, "mu must be positive");
  if (!(l < n)) throw Error(ErrorKind::kPrecondition, "need l < n");
  const double delta_prime = zeta * mu * mu;
  return {delta_prime * (n - l) / n, delta_prime};
}

bool RegimeReport::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

const RegimeCheck* RegimeReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

RegimeReport validate_regime(const RegimeParams& p, double x_norm_sq) {
  RegimeReport r;
  const double n = p.n;
  const double l = p.l;
  const double beta = l > 0 ? p.m / l : std::numeric_limits<double>::infinity();
  const double alpha = n > 0 ? l / n : std::numeric_limits<double>::infinity();
  const double s4 = p.sigma2 * p.sigma2;

  r.c0 = (n - l) / (4.0 * l);
  r.c1 = 18.0 * p.kappa * s4 + 1.0;
  r.c2 = 9.0 + 4.0 * std::log(beta - 1.0);
  r.c_exponent = p.zeta * p.zeta * r.c0 / (2.0 * s4);

  auto strict = [&](std::string name, double margin) { r.checks.push_back({std::move(name), margin > 0.0, margin}); };
  auto weak = [&](std::string name, double margin) { r.checks.push_back({std::move(name), margin >= 0.0, margin}); };

  strict("positive_dimensions", std::min({n, static_cast<double>(p.m), l}));
  strict("l_lt_m", p.m - l);
  strict("beta_gt_2", beta - 2.0);
  strict("n_gt_c_l", n - std::max(r.c1, r.c2) * l);
  strict("alpha_lt_1_9", 1.0 / 9.0 - alpha);
  strict("zeta_in_range", std::min(p.zeta - 2.0 / 3.0, 1.0 - p.zeta));
  weak("sigma2_ge_2_zeta_mu2", p.sigma2 - 2.0 * p.zeta * p.mu * p.mu);
  strict("c_gt_kappa", r.c_exponent - p.kappa);
  weak("x_norm_sq_le_l_pow_kappa", std::pow(l, p.kappa) - x_norm_sq);
  // log L vanishes at L = 1; the surrogate only means something for L >= 2.
  const double growth = l > 1 ? l * std::pow(p.mu, 4) / std::log(l) : 0.0;
  weak("l_mu4_over_log_l", growth - p.growth_threshold);
  return r;
}

}  // namespace jtd
