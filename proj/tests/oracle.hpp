#pragma once

// Reference computations used only by tests. They deliberately take routes
// the library does not: classical Gram-Schmidt with an explicit projector,
// adjugate inverses, and exhaustive scans without screening.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Orthonormal basis of span(cols) by classical Gram-Schmidt.
inline Matrix gram_schmidt_basis(const Matrix& cols) {
  Matrix q(cols.rows(), cols.cols());
  for (Eigen::Index k = 0; k < cols.cols(); ++k) {
    Vector v = cols.col(k);
    for (Eigen::Index j = 0; j < k; ++j) v -= q.col(j).dot(cols.col(k)) * q.col(j);
    q.col(k) = v / v.norm();
  }
  return q;
}

/// I - Q Q^T built entry by entry.
inline Matrix residual_projector(const Matrix& cols) {
  const Matrix q = gram_schmidt_basis(cols);
  return Matrix::Identity(cols.rows(), cols.rows()) - q * q.transpose();
}

/// Inverse of a 1x1, 2x2 or 3x3 matrix by the adjugate formula.
inline Matrix adjugate_inverse(const Matrix& g) {
  const auto n = g.rows();
  Matrix inv(n, n);
  if (n == 1) {
    inv(0, 0) = 1.0 / g(0, 0);
  } else if (n == 2) {
    const double det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
    inv << g(1, 1), -g(0, 1), -g(1, 0), g(0, 0);
    inv /= det;
  } else if (n == 3) {
    const double a = g(0, 0), b = g(0, 1), c = g(0, 2);
    const double d = g(1, 0), e = g(1, 1), f = g(1, 2);
    const double h = g(2, 0), i = g(2, 1), k = g(2, 2);
    const double det = a * (e * k - f * i) - b * (d * k - f * h) + c * (d * i - e * h);
    inv << e * k - f * i, c * i - b * k, b * f - c * e,
           f * h - d * k, a * k - c * h, c * d - a * f,
           d * i - e * h, b * h - a * i, a * e - b * d;
    inv /= det;
  } else {
    throw std::invalid_argument("adjugate_inverse supports n <= 3");
  }
  return inv;
}

inline std::vector<std::vector<int>> all_subsets(int m, int l) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == l) {
      out.push_back(cur);
      return;
    }
    for (int v = start; v < m; ++v) {
      cur.push_back(v);
      self(self, v + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

struct BruteForceResult {
  std::vector<std::vector<int>> subsets;
  std::vector<bool> verdicts;
  std::vector<double> deviations;
  std::optional<std::vector<int>> chosen;
  bool e0 = true;
  std::uint64_t typical_count = 0;
  Vector estimate;
};

inline Matrix columns(const Matrix& a, const std::vector<int>& j) {
  Matrix out(a.rows(), static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = a.col(j[k]);
  return out;
}

/// Exhaustive decode with explicit projectors. min_deviation when
/// `first_lex` is false.
inline BruteForceResult brute_force_decode(const Matrix& a, const Vector& y, int l, double sigma2, double delta,
                                           bool first_lex, double rank_tol = 1e-10) {
  BruteForceResult r;
  const double n = static_cast<double>(a.rows());
  r.subsets = all_subsets(static_cast<int>(a.cols()), l);
  double best = INFINITY;
  for (const auto& j : r.subsets) {
    const Matrix aj = columns(a, j);
    const Vector sv = Eigen::JacobiSVD<Matrix>(aj).singularValues();
    const bool full = l <= a.rows() && sv(sv.size() - 1) > rank_tol * sv(0);
    double dev = INFINITY;
    if (full) {
      const Vector resid = residual_projector(aj) * y;
      dev = std::abs(resid.squaredNorm() / n - (n - l) / n * sigma2);
    }
    const bool typical = full && dev < delta;
    r.verdicts.push_back(typical);
    r.deviations.push_back(dev);
    if (!typical) continue;
    ++r.typical_count;
    if (first_lex) {
      if (!r.chosen) r.chosen = j;
    } else if (dev < best) {
      best = dev;
      r.chosen = j;
    }
  }
  r.estimate = Vector::Zero(a.cols());
  if (r.chosen) {
    r.e0 = false;
    const Matrix aj = columns(a, *r.chosen);
    const Matrix q = gram_schmidt_basis(aj);
    const Matrix rr = q.transpose() * aj;  // upper triangular up to rounding
    const Vector qty = q.transpose() * y;
    Vector c(l);
    for (int i = l - 1; i >= 0; --i) {
      double s = qty(i);
      for (int k = i + 1; k < l; ++k) s -= rr(i, k) * c(k);
      c(i) = s / rr(i, i);
    }
    for (int k = 0; k < l; ++k) r.estimate((*r.chosen)[static_cast<std::size_t>(k)]) = c(k);
  }
  return r;
}

}  // namespace oracle
