#pragma once

// Dense real linear algebra used throughout the library: SVD with a fixed sign
// convention, rank/threshold truncation, thin QR with non-negative R diagonal,
// conditioned polynomial least squares and deterministic orthogonal
// completion of a set of orthonormal rows.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

#include "mpsprep/errors.hpp"

namespace mpsprep {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

/// Which singular triplets a truncated SVD keeps. Either bound may be absent;
/// when both are set the stricter one wins.
struct TruncationPolicy {
  std::optional<Index> max_rank;   // keep at most this many values (chi)
  std::optional<double> threshold; // keep only values strictly above delta

  static TruncationPolicy none() { return {}; }
  static TruncationPolicy rank(Index chi) { return {chi, std::nullopt}; }
  static TruncationPolicy cutoff(double delta) { return {std::nullopt, delta}; }
  static TruncationPolicy both(Index chi, double delta) { return {chi, delta}; }

  bool truncates() const { return max_rank.has_value() || threshold.has_value(); }
};

template <typename Scalar>
struct SvdResult {
  Matrix<Scalar> u;   // m x r, orthonormal columns
  Vector<Scalar> s;   // r values, non-increasing
  Matrix<Scalar> vt;  // r x n, orthonormal rows
  Scalar truncation_error{0};  // Frobenius norm of the discarded part

  Index rank() const { return s.size(); }
  Matrix<Scalar> reconstruct() const { return u * s.asDiagonal() * vt; }
};

namespace detail {

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& a, const char* what) {
  if (!a.allFinite()) {
    std::ostringstream msg;
    msg << what << ": matrix " << a.rows() << "x" << a.cols() << " has non-finite entries";
    throw InvalidArgument(msg.str());
  }
}

// Index of the first entry whose magnitude is not negligible relative to the
// largest one; -1 for an all-zero vector.
template <typename Derived>
Index first_significant(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Scalar peak = v.cwiseAbs().maxCoeff();
  if (peak == Scalar(0)) return -1;
  const Scalar tol = peak * Scalar(1e-12);
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > tol) return i;
  }
  return -1;
}

}  // namespace detail

/// Full thin SVD, r = min(rows, cols) singular triplets. The first significant
/// entry of each left singular vector is made positive.
template <typename Derived>
SvdResult<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() < 1 || a.cols() < 1) throw InvalidArgument("svd: empty matrix");
  detail::require_finite(a, "svd");

  Eigen::BDCSVD<Matrix<Scalar>> dec(a.derived().eval(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "svd: no convergence for " << a.rows() << "x" << a.cols() << " matrix";
    throw NumericalError(msg.str());
  }

  SvdResult<Scalar> out;
  out.u = dec.matrixU();
  out.s = dec.singularValues();
  out.vt = dec.matrixV().transpose();
  for (Index j = 0; j < out.u.cols(); ++j) {
    const Index i = detail::first_significant(out.u.col(j));
    if (i >= 0 && out.u(i, j) < Scalar(0)) {
      out.u.col(j) *= Scalar(-1);
      out.vt.row(j) *= Scalar(-1);
    }
  }
  return out;
}

/// Number of leading singular values a policy retains. Throws when the policy
/// would discard everything from a nonzero spectrum.
template <typename Scalar>
Index retained_rank(const Vector<Scalar>& s, const TruncationPolicy& policy) {
  if (policy.max_rank && *policy.max_rank < 1) {
    throw InvalidArgument("truncation policy: max_rank must be >= 1");
  }
  if (policy.threshold && !(*policy.threshold >= 0.0)) {
    throw InvalidArgument("truncation policy: threshold must be >= 0");
  }
  Index keep = s.size();
  if (policy.max_rank) keep = std::min(keep, *policy.max_rank);
  if (policy.threshold) {
    Index above = 0;
    while (above < keep && s(above) > Scalar(*policy.threshold)) ++above;
    keep = above;
  }
  if (keep == 0) {
    if (s.size() > 0 && s(0) > Scalar(0)) {
      throw InvalidArgument("truncated_svd: policy retains no singular values of a nonzero matrix");
    }
    keep = 1;  // zero matrix: keep a single zero triplet so shapes stay valid
  }
  return keep;
}

/// Truncated SVD. `truncation_error` is sqrt(sum of squared discarded values),
/// which is exactly the Frobenius distance to the kept part.
template <typename Derived>
SvdResult<typename Derived::Scalar> truncated_svd(const Eigen::MatrixBase<Derived>& a,
                                                  const TruncationPolicy& policy) {
  using Scalar = typename Derived::Scalar;
  SvdResult<Scalar> full = svd(a);
  const Index keep = retained_rank<Scalar>(full.s, policy);
  if (keep == full.s.size()) return full;

  SvdResult<Scalar> out;
  out.truncation_error = std::sqrt(full.s.tail(full.s.size() - keep).squaredNorm());
  out.u = full.u.leftCols(keep);
  out.s = full.s.head(keep);
  out.vt = full.vt.topRows(keep);
  return out;
}

template <typename Scalar>
struct QrResult {
  Matrix<Scalar> q;  // rows x cols, orthonormal columns
  Matrix<Scalar> r;  // cols x cols, upper triangular, r(i,i) >= 0
};

/// Thin Householder QR of a tall (rows >= cols) matrix with the sign of each
/// column fixed so that R has a non-negative diagonal. Rank-deficient input is
/// accepted; the corresponding R diagonal entries are (numerically) zero.
template <typename Derived>
QrResult<typename Derived::Scalar> qr_orthonormalize(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() < a.cols()) {
    std::ostringstream msg;
    msg << "qr_orthonormalize: need rows >= cols, got " << a.rows() << "x" << a.cols();
    throw InvalidArgument(msg.str());
  }
  detail::require_finite(a, "qr_orthonormalize");
  const Index m = a.rows();
  const Index n = a.cols();

  Eigen::HouseholderQR<Matrix<Scalar>> dec(a.derived().eval());
  QrResult<Scalar> out;
  out.q = dec.householderQ() * Matrix<Scalar>::Identity(m, n);
  out.r = dec.matrixQR().topRows(n).template triangularView<Eigen::Upper>();
  for (Index i = 0; i < n; ++i) {
    if (out.r(i, i) < Scalar(0)) {
      out.r.row(i) *= Scalar(-1);
      out.q.col(i) *= Scalar(-1);
    }
  }
  return out;
}

/// Least-squares polynomial fit, coefficients returned lowest degree first.
/// The system is solved in the affine coordinate t = (x - c) / w that maps the
/// sample range onto [-1, 1], then expanded back to powers of x.
template <typename Scalar>
Vector<Scalar> polyfit_least_squares(std::span<const Scalar> xs, std::span<const Scalar> ys,
                                     int degree) {
  if (degree < 0) throw InvalidArgument("polyfit: degree must be >= 0");
  if (xs.size() != ys.size()) throw InvalidArgument("polyfit: xs and ys differ in length");
  const auto terms = static_cast<std::size_t>(degree) + 1;
  if (xs.size() < terms) throw InvalidArgument("polyfit: fewer samples than degree + 1");

  std::vector<Scalar> distinct(xs.begin(), xs.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < terms) {
    throw InvalidArgument("polyfit: underdetermined, fewer distinct abscissae than degree + 1");
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
      throw InvalidArgument("polyfit: non-finite sample");
    }
  }

  const Scalar lo = distinct.front();
  const Scalar hi = distinct.back();
  const Scalar center = (hi + lo) / Scalar(2);
  const Scalar half_width = (hi - lo) / Scalar(2);  // > 0: at least two distinct xs here
  const Index rows = static_cast<Index>(xs.size());

  Matrix<Scalar> vander(rows, degree + 1);
  Vector<Scalar> rhs(rows);
  for (Index i = 0; i < rows; ++i) {
    const Scalar t = half_width > Scalar(0) ? (xs[i] - center) / half_width : Scalar(0);
    Scalar power = 1;
    for (int j = 0; j <= degree; ++j) {
      vander(i, j) = power;
      power *= t;
    }
    rhs(i) = ys[i];
  }
  const Vector<Scalar> in_t = vander.colPivHouseholderQr().solve(rhs);

  // sum_j b_j ((x - c)/w)^j  ->  sum_i a_i x^i
  Vector<Scalar> out = Vector<Scalar>::Zero(degree + 1);
  if (degree == 0) {
    out(0) = in_t(0);
    return out;
  }
  for (int j = 0; j <= degree; ++j) {
    const Scalar scale = in_t(j) / std::pow(half_width, Scalar(j));
    Scalar binom = 1;  // C(j, i)
    for (int i = 0; i <= j; ++i) {
      out(i) += scale * binom * std::pow(-center, Scalar(j - i));
      binom = binom * Scalar(j - i) / Scalar(i + 1);
    }
  }
  return out;
}

template <typename Scalar>
Vector<Scalar> polyfit_least_squares(const std::vector<Scalar>& xs, const std::vector<Scalar>& ys,
                                     int degree) {
  return polyfit_least_squares<Scalar>(std::span<const Scalar>(xs), std::span<const Scalar>(ys),
                                       degree);
}

/// Given r < c orthonormal rows, returns (c - r) rows completing them to an
/// orthogonal c x c matrix. Candidates are the canonical basis vectors in
/// index order, Gram-Schmidt'ed (twice) against everything accepted so far;
/// each accepted row has its first significant entry positive.
template <typename Derived>
Matrix<typename Derived::Scalar> null_space_completion(const Eigen::MatrixBase<Derived>& rows) {
  using Scalar = typename Derived::Scalar;
  const Index r = rows.rows();
  const Index c = rows.cols();
  if (r >= c) throw InvalidArgument("null_space_completion: need fewer rows than columns");
  detail::require_finite(rows, "null_space_completion");
  const Matrix<Scalar> gram = rows * rows.transpose();
  const Scalar dev = (gram - Matrix<Scalar>::Identity(r, r)).cwiseAbs().maxCoeff();
  if (r > 0 && dev > Scalar(1e-8)) {
    std::ostringstream msg;
    msg << "null_space_completion: input rows are not orthonormal (deviation " << dev << ")";
    throw InvalidArgument(msg.str());
  }

  // A candidate whose residual exceeds 1/(2 sqrt c) always exists among the
  // remaining basis vectors, so the greedy pass cannot run dry.
  const Scalar accept = Scalar(0.5) / std::sqrt(Scalar(c));
  Matrix<Scalar> basis(c, c);
  basis.topRows(r) = rows;
  Index filled = r;
  for (Index i = 0; i < c && filled < c; ++i) {
    Vector<Scalar> v = Vector<Scalar>::Unit(c, i);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index k = 0; k < filled; ++k) {
        v -= basis.row(k).dot(v) * basis.row(k).transpose();
      }
    }
    const Scalar len = v.norm();
    if (len <= accept) continue;
    v /= len;
    const Index lead = detail::first_significant(v);
    if (lead >= 0 && v(lead) < Scalar(0)) v = -v;
    basis.row(filled++) = v.transpose();
  }
  if (filled != c) throw NumericalError("null_space_completion: failed to complete basis");
  return basis.bottomRows(c - r);
}

/// max |Q^T Q - I| over the columns of q.
template <typename Derived>
typename Derived::Scalar orthonormality_deviation(const Eigen::MatrixBase<Derived>& q) {
  using Scalar = typename Derived::Scalar;
  const Matrix<Scalar> g = q.transpose() * q;
  return (g - Matrix<Scalar>::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

}  // namespace mpsprep
