#pragma once

#include <string>
#include <utility>
#include <vector>

#include "jtd/model.hpp"
#include "jtd/support_set.hpp"

namespace jtd {

/// sigma2 * Tr((A_I^T A_I)^{-1}), the Cramér-Rao bound of the genie-aided estimator.
double crb_gae(const MeasurementMatrix& a, const SupportSet& i, double sigma2);

/// Natural-log entropy; 0 at p in {0, 1}. Throws kDomain outside [0, 1].
double binary_entropy(double p);

/// Chance that the true support fails the typicality test:
/// 2 exp(-(delta²/4σ⁴) N² / (N - L + 2 delta N / σ²)).
double miss_typicality_bound(int n, int l, double sigma2, double delta);

/// Chance that a support missing energy E = Σ_{I\J} x_k² passes the test:
/// exp(-((N-L)/4) ((E - δ')/(E + σ²))²). Throws kPrecondition unless δ' < E.
double false_typicality_bound(int n, int l, double missed_energy, double sigma2, double delta_prime);

/// One-sided tail for an extreme eigenvalue of (1/N) A_K^T A_K leaving
/// [(1-√α-ε)², (1+√α+ε)²]: exp(-(M/2) √H(1/β)/√(αβ) ε). Double it for both sides.
double eig_deviation_bound(int m, double alpha, double beta, double epsilon);

struct ExponentParams {
  int l = 1;
  double beta = 0.0;
  double c0 = 0.0;
  double mu2 = 0.0;
  double delta_prime = 0.0;
  double sigma2 = 0.0;
};

/// f(z) = Lz log(e/z) + Lz log((β-1)e/z) - C₀L ((Lzμ² - δ')/(Lzμ² + σ²))².
double f_exponent(double z, const ExponentParams& p);

/// (f(1/L), f(1)) from their closed forms.
std::pair<double, double> f_endpoints(const ExponentParams& p);

/// (1 + (8α + 4√(2α))²/(1 - 2√(2α))⁴) ‖x‖² + α σ²/(1 - 2√(2α))².
/// Throws kSingularity when 2√(2α) >= 1.
double union_bound_constant(double x_norm_sq, double alpha, double sigma2);

struct DeltaPair {
  double delta;
  double delta_prime;
};

/// δ' = ζ μ², δ = δ' (N - L)/N. Throws kRange unless 2/3 < ζ < 1.
DeltaPair delta_from_zeta(double zeta, double mu, int n, int l);

inline constexpr double kDefaultGrowthThreshold = 10.0;

struct RegimeParams {
  int n = 0;
  int m = 0;
  int l = 0;
  double sigma2 = 0.0;
  double mu = 0.0;
  double kappa = 1.0;
  double zeta = 0.8;
  double epsilon = 0.3;
  /// Finite-L stand-in for "L μ⁴ / log L → ∞".
  double growth_threshold = kDefaultGrowthThreshold;
};

struct RegimeCheck {
  std::string name;
  bool pass = false;
  double margin = 0.0;
};

struct RegimeReport {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c_exponent = 0.0;
  std::vector<RegimeCheck> checks;

  bool pass() const;
  const RegimeCheck* find(const std::string& name) const;
};

/// Evaluates every hypothesis of the achievability result at finite size.
/// Never throws on a failed hypothesis; it shows up as a failed check.
RegimeReport validate_regime(const RegimeParams& params, double x_norm_sq);

}  // namespace jtd
