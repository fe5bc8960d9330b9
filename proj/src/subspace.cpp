#include "jtd/subspace.hpp"

#include <algorithm>
#include <string>

#include "jtd/error.hpp"

namespace jtd {

namespace {

void check_indices(const MeasurementMatrix& a, const SupportSet& j) {
  if (j.bound() > a.n_cols())
    throw Error(ErrorKind::kIndexOutOfRange,
                "support " + j.to_string() + " exceeds column count " + std::to_string(a.n_cols()));
}

}  // namespace

Matrix submatrix(const MeasurementMatrix& a, const SupportSet& j) {
  check_indices(a, j);
  Matrix out(a.n_rows(), j.size());
  for (int k = 0; k < j.size(); ++k) out.col(k) = a.entries.col(j[k]);
  return out;
}

bool numeric_rank_full(const MeasurementMatrix& a, const SupportSet& j, double tol) {
  if (j.size() > a.n_rows()) return false;
  return SubspaceFactor(a, j, tol).full_rank();
}

SubspaceFactor::SubspaceFactor(const MeasurementMatrix& a, const SupportSet& j, double tol)
    : rows_(a.n_rows()), cols_(j.size()) {
  const Matrix aj = submatrix(a, j);
  if (cols_ == 0) {
    full_rank_ = true;
    return;
  }
  qr_.compute(aj);
  if (cols_ > rows_) return;
  const Matrix r = qr_.matrixR().topLeftCorner(cols_, cols_).template triangularView<Eigen::Upper>();
  const Vector sv = Eigen::JacobiSVD<Matrix>(r).singularValues();
  sigma_max_ = sv(0);
  sigma_min_ = sv(cols_ - 1);
  full_rank_ = sigma_max_ > 0.0 && sigma_min_ > tol * sigma_max_;
}

void SubspaceFactor::require_full_rank() const {
  if (!full_rank_)
    throw Error(ErrorKind::kRankDeficient, "column submatrix is rank deficient at tolerance");
}

double SubspaceFactor::residual_sq_norm(const Vector& y) const {
  require_full_rank();
  if (y.size() != rows_) throw Error(ErrorKind::kShapeMismatch, "observation length != rows");
  if (cols_ == 0) return y.squaredNorm();
  const Vector qty = qr_.householderQ().adjoint() * y;
  return qty.tail(rows_ - cols_).squaredNorm();
}

Vector SubspaceFactor::solve(const Vector& y) const {
  require_full_rank();
  if (y.size() != rows_) throw Error(ErrorKind::kShapeMismatch, "observation length != rows");
  if (cols_ == 0) return Vector();
  return qr_.solve(y);
}

double SubspaceFactor::trace_inverse_gram() const {
  require_full_rank();
  if (cols_ == 0) return 0.0;
  const Matrix r = qr_.matrixR().topLeftCorner(cols_, cols_).template triangularView<Eigen::Upper>();
  const Matrix r_inv = r.template triangularView<Eigen::Upper>().solve(Matrix::Identity(cols_, cols_));
  return r_inv.squaredNorm();
}

double residual_sq_norm(const MeasurementMatrix& a, const SupportSet& j, const Vector& y, double tol) {
  return SubspaceFactor(a, j, tol).residual_sq_norm(y);
}

Vector ls_on_support(const MeasurementMatrix& a, const SupportSet& j, const Vector& y, double tol) {
  return SubspaceFactor(a, j, tol).solve(y);
}

double trace_inverse_gram(const MeasurementMatrix& a, const SupportSet& j, double tol) {
  return SubspaceFactor(a, j, tol).trace_inverse_gram();
}

EigSummary extreme_eigs_gram(const MeasurementMatrix& a, const SupportSet& k) {
  if (k.empty()) throw Error(ErrorKind::kPrecondition, "extreme_eigs_gram needs |K| >= 1");
  const Matrix ak = submatrix(a, k);
  const Vector sv = Eigen::JacobiSVD<Matrix>(ak).singularValues();
  const double n = a.n_rows();
  EigSummary out;
  out.lambda_max = sv(0) * sv(0) / n;
  // More columns than rows: the Gram matrix has a nontrivial kernel.
  out.lambda_min = k.size() > a.n_rows() ? 0.0 : sv(sv.size() - 1) * sv(sv.size() - 1) / n;
  return out;
}

}  // namespace jtd
