#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "jtd/bounds.hpp"
#include "jtd/decoder.hpp"
#include "jtd/error.hpp"
#include "jtd/rng.hpp"
#include "oracle.hpp"

namespace jtd {
namespace {

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kIo;
}

double rel(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

// ---- crb_gae ----

TEST(Crb, OrthonormalColumns) {
  const Matrix g = gen_gaussian_matrix(16, 4, 1).entries;
  const Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ() * Matrix::Identity(16, 4);
  const auto a = make_matrix(4.0 * q);
  EXPECT_NEAR(crb_gae(a, SupportSet({0, 1, 2, 3}), 1.0), 0.25, 1e-12);
  EXPECT_EQ(crb_gae(a, SupportSet({0, 1, 2, 3}), 0.0), 0.0);
}

TEST(Crb, MatchesExplicitInverse) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto a = gen_gaussian_matrix(16, 3, s);
    const double want = 0.7 * oracle::adjugate_inverse(a.entries.transpose() * a.entries).trace();
    EXPECT_LT(rel(crb_gae(a, SupportSet({0, 1, 2}), 0.7), want), 1e-9);
  }
}

TEST(Crb, RankDeficient) {
  Matrix m = gen_gaussian_matrix(6, 2, 1).entries;
  m.col(1) = 3.0 * m.col(0);
  EXPECT_EQ(kind_of([&] { crb_gae(make_matrix(m), SupportSet({0, 1}), 1.0); }), ErrorKind::kRankDeficient);
}

// ---- binary_entropy ----

TEST(BinaryEntropy, Values) {
  EXPECT_NEAR(binary_entropy(0.5), std::numbers::ln2, 1e-15);
  EXPECT_EQ(binary_entropy(0.0), 0.0);
  EXPECT_EQ(binary_entropy(1.0), 0.0);
  double sum = 0.0;
  for (double q : {0.25, 0.75}) sum -= q * std::log(q);
  EXPECT_NEAR(binary_entropy(0.25), sum, 1e-15);
  EXPECT_NEAR(binary_entropy(0.25), 0.562335, 1e-6);
  EXPECT_NEAR(binary_entropy(0.1), binary_entropy(0.9), 1e-15);
  EXPECT_EQ(kind_of([] { binary_entropy(-0.1); }), ErrorKind::kDomain);
  EXPECT_EQ(kind_of([] { binary_entropy(1.5); }), ErrorKind::kDomain);
}

// ---- miss_typicality_bound ----

TEST(MissBound, PlugIn) {
  const double want = 2.0 * std::exp(-(0.25 / 4.0) * 1e4 / (90.0 + 100.0));
  EXPECT_LT(rel(miss_typicality_bound(100, 10, 1.0, 0.5), want), 1e-14);
  EXPECT_NEAR(-std::log(want / 2.0), 3.2894736842, 1e-9);
}

TEST(MissBound, DecreasesInDelta) {
  double prev = INFINITY;
  for (double delta = 0.01; delta < 1e4; delta *= 1.5) {
    const double b = miss_typicality_bound(50, 5, 1.0, delta);
    EXPECT_LE(b, prev);
    EXPECT_GE(b, 0.0);
    EXPECT_LE(b, 2.0);
    prev = b;
  }
  EXPECT_LT(prev, 1e-100);
}

TEST(MissBound, NonIncreasingInN) {
  double prev = INFINITY;
  for (int n = 20; n <= 200; ++n) {
    const double b = miss_typicality_bound(n, 5, 1.0, 0.3);
    EXPECT_LE(b, prev) << n;
    prev = b;
  }
}

TEST(MissBound, HoldsEmpirically) {
  constexpr int kTrials = 10000;
  constexpr int kN = 40, kL = 4;
  const double sigma2 = 1.0, delta = 0.5;
  int misses = 0;
  for (int t = 0; t < kTrials; ++t) {
    const std::uint64_t seed = derive_seed(3, {static_cast<std::uint64_t>(t)});
    const auto a = gen_gaussian_matrix(kN, 12, derive_seed(seed, {1}));
    const auto x = gen_sparse_signal(12, kL, 1.0, AmplitudeRule::kConstant, derive_seed(seed, {2}));
    const auto inst = measure(a, x, sigma2, derive_seed(seed, {3}));
    misses += !is_jointly_typical(a, x.support, inst.observation, sigma2, delta);
  }
  const double freq = static_cast<double>(misses) / kTrials;
  const double bound = miss_typicality_bound(kN, kL, sigma2, delta);
  EXPECT_LE(freq, bound + 3.0 * std::sqrt(bound * (1.0 - std::min(bound, 1.0)) / kTrials));
}

// ---- false_typicality_bound ----

TEST(FalseBound, PlugIn) {
  EXPECT_LT(rel(false_typicality_bound(40, 4, 1.0, 1.0, 0.8), std::exp(-0.09)), 1e-14);
}

TEST(FalseBound, LargeEnergyLimit) {
  const double b = false_typicality_bound(40, 4, 1e12, 1.0, 0.8);
  EXPECT_NEAR(std::log(b), -9.0, 1e-9);
}

TEST(FalseBound, Precondition) {
  EXPECT_EQ(kind_of([] { false_typicality_bound(40, 4, 0.8, 1.0, 0.8); }), ErrorKind::kPrecondition);
  EXPECT_EQ(kind_of([] { false_typicality_bound(40, 4, 0.5, 1.0, 0.8); }), ErrorKind::kPrecondition);
}

TEST(FalseBound, HoldsEmpiricallyForDisjointSupport) {
  constexpr int kTrials = 10000;
  constexpr int kN = 40, kL = 4, kM = 12;
  const double sigma2 = 1.0, mu = 1.0;
  const auto dz = delta_from_zeta(0.8, mu, kN, kL);
  int typical = 0;
  const SupportSet wrong({8, 9, 10, 11});
  Vector x = Vector::Zero(kM);
  for (int k = 0; k < kL; ++k) x(k) = (k % 2 ? -mu : mu);
  const auto signal = make_signal(x);
  for (int t = 0; t < kTrials; ++t) {
    const std::uint64_t seed = derive_seed(4, {static_cast<std::uint64_t>(t)});
    const auto a = gen_gaussian_matrix(kN, kM, derive_seed(seed, {1}));
    const auto inst = measure(a, signal, sigma2, derive_seed(seed, {3}));
    typical += is_jointly_typical(a, wrong, inst.observation, sigma2, dz.delta);
  }
  const double freq = static_cast<double>(typical) / kTrials;
  const double bound = false_typicality_bound(kN, kL, kL * mu * mu, sigma2, dz.delta_prime);
  EXPECT_LE(freq, bound + 3.0 * std::sqrt(bound * (1.0 - bound) / kTrials));
}

// ---- eig_deviation_bound ----

TEST(EigBound, Values) {
  EXPECT_EQ(eig_deviation_bound(100, 0.1, 4.0, 0.0), 1.0);
  const double eps = std::sqrt(0.2);
  const double h = -(0.25 * std::log(0.25) + 0.75 * std::log(0.75));
  const double want = std::exp(-80.0 * (std::sqrt(h) / std::sqrt(0.4)) * eps);
  EXPECT_LT(rel(eig_deviation_bound(160, 0.1, 4.0, eps), want), 1e-13);
}

TEST(EigBound, DecreasesInM) {
  double prev = 1.0 + 1e-12;
  for (int m = 10; m <= 400; m += 10) {
    const double b = eig_deviation_bound(m, 0.1, 4.0, 0.2);
    EXPECT_LT(b, prev);
    prev = b;
  }
}

TEST(EigBound, HoldsEmpirically) {
  constexpr int kN = 200, kL = 20, kM = 80, kDraws = 1000;
  const double eps = 0.3;
  const double alpha = static_cast<double>(kL) / kN;
  const double lo = std::pow(1.0 - std::sqrt(alpha) - eps, 2);
  const double hi = std::pow(1.0 + std::sqrt(alpha) + eps, 2);
  const auto a = gen_gaussian_matrix(kN, kM, 5);
  int outside = 0;
  for (int t = 0; t < kDraws; ++t) {
    const auto k = gen_sparse_signal(kM, kL, 1.0, AmplitudeRule::kConstant, static_cast<std::uint64_t>(t)).support;
    const auto e = extreme_eigs_gram(a, k);
    outside += e.lambda_min < lo || e.lambda_max > hi;
  }
  const double bound = 2.0 * eig_deviation_bound(kM, alpha, static_cast<double>(kM) / kL, eps);
  const double freq = static_cast<double>(outside) / kDraws;
  EXPECT_LE(freq, bound + 3.0 * std::sqrt(std::max(bound, 1.0 / kDraws) / kDraws));
}

// ---- f_exponent / f_endpoints ----

TEST(Exponent, EndpointsMatchSubstitution) {
  const ExponentParams p{64, 4.0, 4.0, 0.5, 0.4, 1.0};
  const auto [at_inv_l, at_one] = f_endpoints(p);
  EXPECT_LT(rel(f_exponent(1.0 / 64, p), at_inv_l), 1e-12);
  EXPECT_LT(rel(f_exponent(1.0, p), at_one), 1e-12);
}

TEST(Exponent, EndpointIdentityOverRandomDraws) {
  Stream s(99);
  for (int i = 0; i < 1000; ++i) {
    ExponentParams p;
    p.l = 1 + static_cast<int>(s.below(500));
    p.beta = 2.0 + 20.0 * s.uniform_open();
    p.c0 = 0.5 + 30.0 * s.uniform();
    p.mu2 = 0.1 + 3.0 * s.uniform();
    p.delta_prime = p.mu2 * (0.67 + 0.32 * s.uniform());
    p.sigma2 = 0.05 + 4.0 * s.uniform();
    const auto [lo, hi] = f_endpoints(p);
    EXPECT_LT(rel(f_exponent(1.0 / p.l, p), lo), 1e-12) << i;
    EXPECT_LT(rel(f_exponent(1.0, p), hi), 1e-12) << i;
  }
}

TEST(Exponent, GridMaximumAtAnEndpoint) {
  const ExponentParams p{64, 4.0, 4.0, 0.5, 0.4, 1.0};
  int best_k = 0;
  double best = -INFINITY;
  for (int k = 1; k <= 64; ++k) {
    const double v = f_exponent(static_cast<double>(k) / 64, p);
    if (v > best) {
      best = v;
      best_k = k;
    }
  }
  EXPECT_TRUE(best_k == 1 || best_k == 64) << best_k;
}

TEST(Exponent, EndpointsFallLinearlyInL) {
  // C0 = 6 exceeds 2 + log(β − 1) = 3.10 at β = 4.
  auto at = [](int l) { return f_endpoints({l, 4.0, 6.0, 1.0, 0.8, 1.0}); };
  for (int l : {1000, 10000, 100000}) {
    const auto [a1, b1] = at(l);
    const auto [a2, b2] = at(2 * l);
    EXPECT_LT(a2, a1);
    EXPECT_LT(b2, b1);
    // slope per unit L of f(1) tends to 2 + log 3 − C0
    EXPECT_NEAR((b2 - b1) / l, 2.0 + std::log(3.0) - 6.0, 1e-2);
    // slope of f(1/L) tends to −C0 ((μ²−δ')/(μ²+σ²))²
    EXPECT_NEAR((a2 - a1) / l, -6.0 * 0.01, 1e-2);
  }
}

TEST(Exponent, RejectsNonPositiveZ) {
  const ExponentParams p{8, 4.0, 4.0, 0.5, 0.4, 1.0};
  EXPECT_EQ(kind_of([&] { f_exponent(0.0, p); }), ErrorKind::kDomain);
  EXPECT_EQ(kind_of([&] { f_exponent(-0.5, p); }), ErrorKind::kDomain);
}

// ---- union_bound_constant ----

TEST(UnionConstant, Values) {
  EXPECT_NEAR(union_bound_constant(2.5, 1e-14, 1.0), 2.5, 1e-5);
  const double s = 2.0 * std::sqrt(2.0 / 9.0);
  const double want =
      (1.0 + std::pow(8.0 / 9.0 + 4.0 * std::sqrt(2.0 / 9.0), 2) / std::pow(1.0 - s, 4)) + (1.0 / 9.0) / std::pow(1.0 - s, 2);
  EXPECT_LT(rel(union_bound_constant(1.0, 1.0 / 9.0, 1.0), want), 1e-12);
  EXPECT_EQ(kind_of([] { union_bound_constant(1.0, 0.125, 1.0); }), ErrorKind::kSingularity);
  EXPECT_EQ(kind_of([] { union_bound_constant(1.0, 0.2, 1.0); }), ErrorKind::kSingularity);
}

// ---- delta_from_zeta ----

TEST(DeltaFromZeta, Values) {
  const auto d = delta_from_zeta(0.8, 1.0, 100, 10);
  EXPECT_NEAR(d.delta, 0.72, 1e-15);
  EXPECT_NEAR(d.delta_prime, 0.8, 1e-15);
  const auto big = delta_from_zeta(0.8, 1.0, 100000000, 10);
  EXPECT_NEAR(big.delta, big.delta_prime, 1e-6);
  EXPECT_EQ(kind_of([] { delta_from_zeta(0.5, 1.0, 100, 10); }), ErrorKind::kRange);
  EXPECT_EQ(kind_of([] { delta_from_zeta(1.0, 1.0, 100, 10); }), ErrorKind::kRange);
}

TEST(DeltaFromZeta, RoundTrip) {
  Stream s(5);
  for (int i = 0; i < 1000; ++i) {
    const double zeta = 0.67 + 0.32 * s.uniform();
    const double mu = 0.1 + 2.0 * s.uniform();
    const int l = 1 + static_cast<int>(s.below(50));
    const int n = l + 1 + static_cast<int>(s.below(1000));
    const auto d = delta_from_zeta(zeta, mu, n, l);
    EXPECT_LT(rel(d.delta * n / (n - l), zeta * mu * mu), 1e-15);
  }
}

// ---- validate_regime ----

TEST(Regime, ConstantsFromFormulas) {
  const RegimeParams p{.n = 600, .m = 90, .l = 30, .sigma2 = 0.5, .mu = 1.2, .kappa = 1.5, .zeta = 0.75};
  const auto r = validate_regime(p, 10.0);
  EXPECT_NEAR(r.c0, 570.0 / 120.0, 1e-14);
  EXPECT_NEAR(r.c1, 18.0 * 1.5 * 0.25 + 1.0, 1e-14);
  EXPECT_NEAR(r.c2, 9.0 + 4.0 * std::log(2.0), 1e-14);
  EXPECT_NEAR(r.c_exponent, 0.75 * 0.75 * r.c0 / (2.0 * 0.25), 1e-13);
}

TEST(Regime, C2AtBetaThree) {
  const auto r = validate_regime({.n = 1000, .m = 30, .l = 10, .sigma2 = 1.0, .mu = 1.0}, 1.0);
  EXPECT_NEAR(r.c2, 9.0 + 4.0 * std::log(2.0), 1e-12);
  EXPECT_NEAR(r.c2, 11.7725887, 1e-7);
}

TEST(Regime, NineteenLFailsAtEquality) {
  // κ = 1, σ² = 1 ⇒ C1 = 19; β = 4 keeps C2 = 13.4 below it.
  const auto r = validate_regime({.n = 19 * 8, .m = 32, .l = 8, .sigma2 = 1.0, .mu = 1.0}, 1.0);
  EXPECT_NEAR(r.c1, 19.0, 1e-15);
  const auto* c = r.find("n_gt_c_l");
  ASSERT_NE(c, nullptr);
  EXPECT_FALSE(c->pass);
  EXPECT_EQ(c->margin, 0.0);
  EXPECT_FALSE(r.pass());
  const auto ok = validate_regime({.n = 19 * 8 + 1, .m = 32, .l = 8, .sigma2 = 1.0, .mu = 1.0}, 1.0);
  EXPECT_TRUE(ok.find("n_gt_c_l")->pass);
}

TEST(Regime, DeskScaleExample) {
  const RegimeParams p{.n = 1280, .m = 64, .l = 16, .sigma2 = 0.25, .mu = 1.0, .kappa = 1.0, .zeta = 0.8};
  const auto r = validate_regime(p, 16.0);
  // Direct evaluation of each hypothesis.
  const double c0 = (1280.0 - 16.0) / 64.0;
  const double c1 = 18.0 * 0.0625 + 1.0;
  const double c2 = 9.0 + 4.0 * std::log(3.0);
  EXPECT_NEAR(r.c0, c0, 1e-12);
  EXPECT_TRUE(r.find("positive_dimensions")->pass);
  EXPECT_TRUE(r.find("l_lt_m")->pass);
  EXPECT_TRUE(r.find("beta_gt_2")->pass);
  EXPECT_NEAR(r.find("n_gt_c_l")->margin, 1280.0 - std::max(c1, c2) * 16.0, 1e-9);
  EXPECT_TRUE(r.find("n_gt_c_l")->pass);
  EXPECT_TRUE(r.find("alpha_lt_1_9")->pass);
  EXPECT_TRUE(r.find("zeta_in_range")->pass);
  EXPECT_TRUE(r.find("c_gt_kappa")->pass);
  EXPECT_NEAR(r.find("c_gt_kappa")->margin, 0.64 * c0 / (2.0 * 0.0625) - 1.0, 1e-9);
  EXPECT_TRUE(r.find("x_norm_sq_le_l_pow_kappa")->pass);
  // σ² = 0.25 < 2ζμ² = 1.6, and 16/log 16 = 5.77 is below the default threshold of 10.
  EXPECT_FALSE(r.find("sigma2_ge_2_zeta_mu2")->pass);
  EXPECT_NEAR(r.find("sigma2_ge_2_zeta_mu2")->margin, 0.25 - 1.6, 1e-12);
  EXPECT_FALSE(r.find("l_mu4_over_log_l")->pass);
  EXPECT_NEAR(r.find("l_mu4_over_log_l")->margin, 16.0 / std::log(16.0) - 10.0, 1e-12);
  int failed = 0;
  for (const auto& c : r.checks) failed += !c.pass;
  EXPECT_EQ(failed, 2);
  EXPECT_FALSE(r.pass());
}

TEST(Regime, AllHypothesesSatisfiable) {
  // Larger noise and amplitude make every check pass.
  const RegimeParams p{.n = 40000, .m = 300, .l = 100, .sigma2 = 2.0, .mu = 1.0, .kappa = 1.0, .zeta = 0.8};
  const auto r = validate_regime(p, 100.0);
  for (const auto& c : r.checks) EXPECT_TRUE(c.pass) << c.name << " " << c.margin;
  EXPECT_TRUE(r.pass());
}

TEST(Regime, FailuresAreReportedNotThrown) {
  const auto r = validate_regime({.n = 10, .m = 15, .l = 10, .sigma2 = 1.0, .mu = 1.0, .zeta = 0.5}, 1e9);
  EXPECT_FALSE(r.find("beta_gt_2")->pass);
  EXPECT_FALSE(r.find("zeta_in_range")->pass);
  EXPECT_FALSE(r.find("x_norm_sq_le_l_pow_kappa")->pass);
  EXPECT_FALSE(r.pass());
  const auto single = validate_regime({.n = 100, .m = 10, .l = 1, .sigma2 = 1.0, .mu = 1.0}, 1.0);
  EXPECT_FALSE(single.find("l_mu4_over_log_l")->pass);
}

}  // namespace
}  // namespace jtd
