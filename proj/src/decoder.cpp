#include "jtd/decoder.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "jtd/bounds.hpp"
#include "jtd/error.hpp"

namespace jtd {

SelectionRule parse_selection_rule(std::string_view name) {
  if (name == "min_deviation" || name == "min-deviation") return SelectionRule::kMinDeviation;
  if (name == "first_lexicographic" || name == "first-lex") return SelectionRule::kFirstLexicographic;
  throw Error(ErrorKind::kInvalidConfig, "unknown selection rule '" + std::string(name) + "'");
}

std::string_view to_string(SelectionRule rule) {
  return rule == SelectionRule::kMinDeviation ? "min_deviation" : "first_lexicographic";
}

DecoderConfig DecoderConfig::with_delta(double delta) {
  DecoderConfig c;
  c.delta = delta;
  return c;
}

DecoderConfig DecoderConfig::with_zeta(double zeta) {
  DecoderConfig c;
  c.zeta = zeta;
  return c;
}

void DecoderConfig::validate() const {
  if (delta.has_value() == zeta.has_value())
    throw Error(ErrorKind::kInvalidConfig, "exactly one of delta and zeta must be given");
  if (delta && !(*delta > 0.0 && std::isfinite(*delta)))
    throw Error(ErrorKind::kInvalidConfig, "delta must be positive and finite");
  if (zeta && !(*zeta > 2.0 / 3.0 && *zeta < 1.0))
    throw Error(ErrorKind::kInvalidConfig, "zeta must lie in (2/3, 1)");
  if (!(rank_tol >= 0.0 && rank_tol < 1.0))
    throw Error(ErrorKind::kInvalidConfig, "rank_tol must lie in [0, 1)");
}

double DecoderConfig::resolve_delta(std::optional<double> mu, int n, int l) const {
  validate();
  if (delta) return *delta;
  if (!mu) throw Error(ErrorKind::kInvalidConfig, "zeta given but mu(x) unknown; pass delta instead");
  return delta_from_zeta(*zeta, *mu, n, l).delta;
}

namespace {

double deviation_from_residual(double residual, int n, int l, double sigma2) {
  return std::abs(residual / n - static_cast<double>(n - l) / n * sigma2);
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// Cheap first pass over one support: Cholesky of the Gram block gives
// ‖P_J y‖² = ‖C^{-1} A_J^T y‖², and the Frobenius norms of C and C^{-1}
// bound the condition number. The screened deviation carries an error margin
// derived from that bound; anything within the margin of delta, or anything
// poorly conditioned, goes to the QR path.
class GramScreen {
 public:
  static constexpr int kMaxCols = 32;
  static constexpr double kMaxCondSq = 1e8;

  GramScreen(const Matrix& a, const Vector& y, double rank_tol)
      : a_(a), yy_(y.squaredNorm()), n_(static_cast<int>(a.rows())) {
    // kappa <= sqrt(cond_sq) must certify sigma_min > rank_tol * sigma_max.
    if (rank_tol > 0.0) max_cond_sq_ = std::min(kMaxCondSq, 0.25 / (rank_tol * rank_tol));
    if (a.cols() <= 2048) {
      gram_ = a.transpose() * a;
      have_gram_ = true;
    }
    aty_ = a.transpose() * y;
  }

  // Returns false if the screen cannot vouch for this support.
  bool run(std::span<const int> j, double sigma2, double& deviation, double& margin) const {
    const int l = static_cast<int>(j.size());
    if (l > kMaxCols || l > n_) return false;
    if (l == 0) {
      deviation = deviation_from_residual(yy_, n_, 0, sigma2);
      margin = 0.0;
      return true;
    }
    double c[kMaxCols][kMaxCols];
    double w[kMaxCols];
    double trace = 0.0;
    for (int p = 0; p < l; ++p) {
      for (int q = 0; q <= p; ++q) c[p][q] = gram(j[static_cast<std::size_t>(p)], j[static_cast<std::size_t>(q)]);
      trace += c[p][p];
    }
    // In-place lower Cholesky.
    for (int p = 0; p < l; ++p) {
      double d = c[p][p];
      for (int k = 0; k < p; ++k) d -= c[p][k] * c[p][k];
      if (!(d > 0.0)) return false;
      const double piv = std::sqrt(d);
      c[p][p] = piv;
      for (int r = p + 1; r < l; ++r) {
        double s = gram(j[static_cast<std::size_t>(r)], j[static_cast<std::size_t>(p)]);
        for (int k = 0; k < p; ++k) s -= c[r][k] * c[p][k];
        c[r][p] = s / piv;
      }
    }
    // ‖C^{-1}‖_F² column by column of the inverse.
    double inv_fro = 0.0;
    double col[kMaxCols];
    for (int e = 0; e < l; ++e) {
      for (int r = 0; r < e; ++r) col[r] = 0.0;
      for (int r = e; r < l; ++r) {
        double s = r == e ? 1.0 : 0.0;
        for (int k = e; k < r; ++k) s -= c[r][k] * col[k];
        col[r] = s / c[r][r];
        inv_fro += col[r] * col[r];
      }
    }
    const double cond_sq = trace * inv_fro;
    if (!(cond_sq < max_cond_sq_)) return false;

    double proj = 0.0;
    for (int r = 0; r < l; ++r) {
      double s = aty_(j[static_cast<std::size_t>(r)]);
      for (int k = 0; k < r; ++k) s -= c[r][k] * w[k];
      w[r] = s / c[r][r];
      proj += w[r] * w[r];
    }
    deviation = deviation_from_residual(yy_ - proj, n_, l, sigma2);
    constexpr double kUnit = std::numeric_limits<double>::epsilon();
    margin = 32.0 * kUnit * (n_ + l) * (cond_sq + 1.0) * (yy_ / n_ + sigma2) + 1e-300;
    return true;
  }

 private:
  double gram(int p, int q) const { return have_gram_ ? gram_(p, q) : a_.col(p).dot(a_.col(q)); }

  const Matrix& a_;
  Matrix gram_;
  Vector aty_;
  double yy_;
  int n_;
  double max_cond_sq_ = kMaxCondSq;
  bool have_gram_ = false;
};

struct Evaluation {
  bool full_rank = false;
  bool typical = false;
  double deviation = kInf;
  double margin = 0.0;  // zero when the deviation came from the QR path
};

class SubsetEvaluator {
 public:
  SubsetEvaluator(const MeasurementMatrix& a, const Vector& y, double sigma2, double delta, double rank_tol)
      : a_(a), y_(y), sigma2_(sigma2), delta_(delta), rank_tol_(rank_tol), screen_(a.entries, y, rank_tol) {}

  Evaluation evaluate(std::span<const int> j) const {
    Evaluation ev;
    if (screen_.run(j, sigma2_, ev.deviation, ev.margin) && std::abs(ev.deviation - delta_) > ev.margin) {
      ev.full_rank = true;
      ev.typical = ev.deviation < delta_;
      return ev;
    }
    return exact(j);
  }

  Evaluation exact(std::span<const int> j) const {
    Evaluation ev;
    const SupportSet support(std::vector<int>(j.begin(), j.end()));
    const SubspaceFactor factor(a_, support, rank_tol_);
    if (!factor.full_rank()) return ev;
    ev.full_rank = true;
    ev.deviation = deviation_from_residual(factor.residual_sq_norm(y_), a_.n_rows(), support.size(), sigma2_);
    ev.typical = ev.deviation < delta_;
    return ev;
  }

 private:
  const MeasurementMatrix& a_;
  const Vector& y_;
  double sigma2_;
  double delta_;
  double rank_tol_;
  GramScreen screen_;
};

struct Candidate {
  std::vector<int> indices;
  double lower;
};

// Partial result over a contiguous lexicographic range of supports.
struct ScanFold {
  std::uint64_t typical_count = 0;
  std::uint64_t examined = 0;
  std::optional<std::vector<int>> first_typical;
  // Supports that may still attain the smallest deviation.
  double best_upper = kInf;
  std::vector<Candidate> candidates;

  void offer(std::span<const int> j, const Evaluation& ev) {
    ++examined;
    if (!ev.full_rank) return;
    if (ev.typical) {
      ++typical_count;
      if (!first_typical) first_typical.emplace(j.begin(), j.end());
    }
    const double lower = ev.deviation - ev.margin;
    if (lower > best_upper) return;
    best_upper = std::min(best_upper, ev.deviation + ev.margin);
    candidates.push_back({std::vector<int>(j.begin(), j.end()), lower});
    if (candidates.size() > 64) prune();
  }

  void prune() {
    std::erase_if(candidates, [&](const Candidate& c) { return c.lower > best_upper; });
  }

  void absorb(ScanFold&& later) {
    typical_count += later.typical_count;
    examined += later.examined;
    if (!first_typical) first_typical = std::move(later.first_typical);
    best_upper = std::min(best_upper, later.best_upper);
    for (auto& c : later.candidates) candidates.push_back(std::move(c));
    prune();
  }
};

constexpr std::uint64_t kChunk = 4096;

ScanFold scan_range(const SubsetEvaluator& eval, int m, int l, std::uint64_t begin, std::uint64_t end) {
  ScanFold fold;
  if (begin >= end) return fold;
  SupportSet start = nth_combination(m, l, begin);
  std::vector<int> current(start.indices().begin(), start.indices().end());
  for (std::uint64_t rank = begin; rank < end; ++rank) {
    fold.offer(current, eval.evaluate(current));
    if (rank + 1 < end) next_combination(current, m);
  }
  fold.prune();
  return fold;
}

ScanFold parallel_scan(const SubsetEvaluator& eval, int m, int l, std::uint64_t total, int threads) {
  const std::uint64_t chunks = (total + kChunk - 1) / kChunk;
  std::vector<ScanFold> folds(static_cast<std::size_t>(chunks));
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t c = next++; c < chunks; c = next++)
      folds[static_cast<std::size_t>(c)] = scan_range(eval, m, l, c * kChunk, std::min(total, (c + 1) * kChunk));
  };
  const int pool = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(std::max(threads, 1)), chunks));
  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::jthread> workers;
    for (int t = 0; t < pool; ++t) workers.emplace_back(worker);
  }
  // Merge in lexicographic chunk order.
  ScanFold out;
  for (auto& f : folds) out.absorb(std::move(f));
  return out;
}

}  // namespace

double typicality_deviation(const MeasurementMatrix& a, const SupportSet& j, const Vector& y, double sigma2,
                            double rank_tol) {
  const double residual = residual_sq_norm(a, j, y, rank_tol);
  return deviation_from_residual(residual, a.n_rows(), j.size(), sigma2);
}

bool is_jointly_typical(const MeasurementMatrix& a, const SupportSet& j, const Vector& y, double sigma2,
                        double delta, double rank_tol) {
  if (j.size() > a.n_rows()) return false;
  const SubspaceFactor factor(a, j, rank_tol);
  if (!factor.full_rank()) return false;
  return deviation_from_residual(factor.residual_sq_norm(y), a.n_rows(), j.size(), sigma2) < delta;
}

Vector genie_estimate(const MeasurementMatrix& a, const SupportSet& i, const Vector& y, double rank_tol) {
  const Vector coeffs = ls_on_support(a, i, y, rank_tol);
  Vector out = Vector::Zero(a.n_cols());
  for (int k = 0; k < i.size(); ++k) out(i[k]) = coeffs(k);
  return out;
}

namespace {

void check_decode_args(const MeasurementMatrix& a, const Vector& y, int l, double sigma2) {
  if (y.size() != a.n_rows()) throw Error(ErrorKind::kShapeMismatch, "observation length != rows of A");
  if (l < 1 || l > a.n_rows() || l > a.n_cols())
    throw Error(ErrorKind::kInvalidSparsity, "need 1 <= l <= min(N, M), got l=" + std::to_string(l));
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw Error(ErrorKind::kDomain, "sigma2 must be >= 0");
}

std::uint64_t checked_count(int m, int l, std::uint64_t max_subsets) {
  const auto count = binomial(m, l);
  if (!count || *count > max_subsets)
    throw Error(ErrorKind::kBudget, "C(" + std::to_string(m) + ", " + std::to_string(l) +
                                        ") exceeds max_subsets=" + std::to_string(max_subsets));
  return *count;
}

}  // namespace

DecodeResult joint_typicality_decode(const MeasurementMatrix& a, const Vector& y, int l, double sigma2,
                                     const DecoderConfig& config, const ScanOptions& opts) {
  check_decode_args(a, y, l, sigma2);
  const double delta = config.resolve_delta(opts.mu, a.n_rows(), l);
  const std::uint64_t total = checked_count(a.n_cols(), l, config.max_subsets);

  const SubsetEvaluator eval(a, y, sigma2, delta, config.rank_tol);
  ScanFold fold = parallel_scan(eval, a.n_cols(), l, total, opts.threads);

  DecodeResult result;
  result.estimate = Vector::Zero(a.n_cols());
  result.typical_count = fold.typical_count;
  result.subsets_examined = fold.examined;

  // Smallest deviation, from the QR path, lexicographic on exact ties.
  std::optional<std::vector<int>> argmin;
  double best = kInf;
  for (const auto& c : fold.candidates) {
    const Evaluation ev = eval.exact(c.indices);
    if (ev.full_rank && (ev.deviation < best || (ev.deviation == best && argmin && c.indices < *argmin))) {
      best = ev.deviation;
      argmin = c.indices;
    }
  }

  std::optional<std::vector<int>> chosen;
  double chosen_deviation = best;
  if (config.selection_rule == SelectionRule::kMinDeviation) {
    if (argmin && best < delta) chosen = argmin;
  } else if (fold.first_typical) {
    chosen = fold.first_typical;
    chosen_deviation = eval.exact(*chosen).deviation;
  }

  if (!chosen) {
    result.e0 = true;
    result.deviation = best;
    return result;
  }
  result.e0 = false;
  result.chosen_support = SupportSet(std::move(*chosen));
  result.deviation = chosen_deviation;
  result.estimate = genie_estimate(a, *result.chosen_support, y, config.rank_tol);
  return result;
}

std::vector<SubsetVerdict> scan_verdicts(const MeasurementMatrix& a, const Vector& y, int l, double sigma2,
                                         double delta, double rank_tol, std::uint64_t max_subsets) {
  check_decode_args(a, y, l, sigma2);
  checked_count(a.n_cols(), l, max_subsets);
  const SubsetEvaluator eval(a, y, sigma2, delta, rank_tol);
  std::vector<SubsetVerdict> out;
  for (auto& support : enumerate_supports(a.n_cols(), l, max_subsets)) {
    const Evaluation screened = eval.evaluate(support.indices());
    const Evaluation exact = eval.exact(support.indices());
    out.push_back({std::move(support), screened.full_rank, screened.typical, exact.deviation});
  }
  return out;
}

}  // namespace jtd
