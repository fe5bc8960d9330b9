#pragma once

#include <Eigen/Dense>

#include "jtd/model.hpp"
#include "jtd/support_set.hpp"

namespace jtd {

inline constexpr double kDefaultRankTol = 1e-10;

struct EigSummary {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

/// Columns of A listed in J, in order. Throws kIndexOutOfRange.
Matrix submatrix(const MeasurementMatrix& a, const SupportSet& j);

/// sigma_min(A_J) > tol * sigma_max(A_J). False when |J| > N.
bool numeric_rank_full(const MeasurementMatrix& a, const SupportSet& j, double tol = kDefaultRankTol);

/// Thin column-pivoted Householder QR of A_J, plus the singular values of its
/// triangular factor (which are those of A_J). Every projection-type quantity
/// below goes through this; the explicit projector is never formed.
class SubspaceFactor {
 public:
  SubspaceFactor(const MeasurementMatrix& a, const SupportSet& j, double tol = kDefaultRankTol);

  bool full_rank() const noexcept { return full_rank_; }
  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  double sigma_min() const noexcept { return sigma_min_; }
  double sigma_max() const noexcept { return sigma_max_; }

  /// ‖(I - P_J) y‖². Throws kRankDeficient.
  double residual_sq_norm(const Vector& y) const;

  /// argmin_c ‖A_J c - y‖. Throws kRankDeficient.
  Vector solve(const Vector& y) const;

  /// Tr((A_J^T A_J)^{-1}) = ‖R^{-1}‖_F². Throws kRankDeficient.
  double trace_inverse_gram() const;

 private:
  void require_full_rank() const;

  Eigen::ColPivHouseholderQR<Matrix> qr_;
  int rows_ = 0;
  int cols_ = 0;
  double sigma_min_ = 0.0;
  double sigma_max_ = 0.0;
  bool full_rank_ = false;
};

double residual_sq_norm(const MeasurementMatrix& a, const SupportSet& j, const Vector& y,
                        double tol = kDefaultRankTol);

Vector ls_on_support(const MeasurementMatrix& a, const SupportSet& j, const Vector& y,
                     double tol = kDefaultRankTol);

double trace_inverse_gram(const MeasurementMatrix& a, const SupportSet& j, double tol = kDefaultRankTol);

/// Extreme eigenvalues of (1/N) A_K^T A_K, from the singular values of A_K so
/// that lambda_min is never negative.
EigSummary extreme_eigs_gram(const MeasurementMatrix& a, const SupportSet& k);

}  // namespace jtd
