#pragma once

// Matrix product states over qubits (physical dimension 2).
//
// Site 0 carries the most significant bit of the basis index, so the dense
// vector entry at index k = sum_i s_i 2^(N-1-i) equals the matrix product
// M[0]^{s_0} M[1]^{s_1} ... M[N-1]^{s_{N-1}}.

#include <array>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mpsprep/linalg.hpp"

namespace mpsprep {

/// Largest qubit count for which dense 2^N vectors are materialized. Reads
/// MPSPREP_DENSE_LIMIT, defaults to 24.
inline int dense_limit() {
  if (const char* env = std::getenv("MPSPREP_DENSE_LIMIT")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value > 0 && value < 63) return static_cast<int>(value);
  }
  return 24;
}

inline void require_dense_size(Index n_qubits, const char* what) {
  if (n_qubits > dense_limit()) {
    throw InvalidArgument(std::string(what) + ": N = " + std::to_string(n_qubits) +
                          " exceeds the dense limit of " + std::to_string(dense_limit()) +
                          " qubits (set MPSPREP_DENSE_LIMIT to raise it)");
  }
}

/// log2 of a power-of-two length, or throws.
inline int qubits_for_length(Index length, const char* what) {
  if (length < 2 || (length & (length - 1)) != 0) {
    throw InvalidArgument(std::string(what) + ": length " + std::to_string(length) +
                          " is not a power of two >= 2");
  }
  int n = 0;
  while ((Index(1) << n) < length) ++n;
  return n;
}

/// One site tensor, stored as its two physical slices (left_dim x right_dim).
template <typename Scalar>
struct MpsCore {
  std::array<Matrix<Scalar>, 2> slice;

  Index left_dim() const { return slice[0].rows(); }
  Index right_dim() const { return slice[0].cols(); }

  // (2 * left) x right, row index = a * 2 + s
  Matrix<Scalar> left_unfolding() const {
    Matrix<Scalar> out(2 * left_dim(), right_dim());
    for (Index a = 0; a < left_dim(); ++a)
      for (int s = 0; s < 2; ++s) out.row(2 * a + s) = slice[s].row(a);
    return out;
  }

  // left x (2 * right), column index = s * right + b
  Matrix<Scalar> right_unfolding() const {
    Matrix<Scalar> out(left_dim(), 2 * right_dim());
    out.leftCols(right_dim()) = slice[0];
    out.rightCols(right_dim()) = slice[1];
    return out;
  }

  template <typename Derived>
  static MpsCore from_left_unfolding(const Eigen::MatrixBase<Derived>& m) {
    const Index left = m.rows() / 2;
    MpsCore out;
    for (int s = 0; s < 2; ++s) {
      out.slice[s].resize(left, m.cols());
      for (Index a = 0; a < left; ++a) out.slice[s].row(a) = m.row(2 * a + s);
    }
    return out;
  }

  template <typename Derived>
  static MpsCore from_right_unfolding(const Eigen::MatrixBase<Derived>& m) {
    const Index right = m.cols() / 2;
    MpsCore out;
    out.slice[0] = m.leftCols(right);
    out.slice[1] = m.rightCols(right);
    return out;
  }
};

enum class CanonicalForm { none, left, right, mixed };

template <typename Scalar>
class Mps {
 public:
  using Core = MpsCore<Scalar>;

  Mps() = default;

  /// Validates shapes: boundary bonds are 1, neighbouring bonds agree, every
  /// entry is finite. `center` is only meaningful for the mixed form.
  explicit Mps(std::vector<Core> cores, CanonicalForm form = CanonicalForm::none,
               Index center = 0)
      : cores_(std::move(cores)), form_(form), center_(center) {
    if (cores_.empty()) throw InvalidArgument("Mps: at least one site required");
    for (std::size_t i = 0; i < cores_.size(); ++i) {
      const Core& c = cores_[i];
      if (c.slice[0].rows() != c.slice[1].rows() || c.slice[0].cols() != c.slice[1].cols()) {
        throw InvalidArgument("Mps: slices of core " + std::to_string(i) + " differ in shape");
      }
      if (c.left_dim() < 1 || c.right_dim() < 1) {
        throw InvalidArgument("Mps: core " + std::to_string(i) + " has an empty bond");
      }
      if (!c.slice[0].allFinite() || !c.slice[1].allFinite()) {
        throw InvalidArgument("Mps: core " + std::to_string(i) + " has non-finite entries");
      }
      if (i + 1 < cores_.size() && c.right_dim() != cores_[i + 1].left_dim()) {
        throw InvalidArgument("Mps: bond mismatch between sites " + std::to_string(i) + " and " +
                              std::to_string(i + 1));
      }
    }
    if (cores_.front().left_dim() != 1 || cores_.back().right_dim() != 1) {
      throw InvalidArgument("Mps: boundary bond dimensions must be 1");
    }
    switch (form_) {
      case CanonicalForm::left: center_ = n_sites() - 1; break;
      case CanonicalForm::right: center_ = 0; break;
      case CanonicalForm::mixed:
        if (center_ < 0 || center_ >= n_sites()) throw InvalidArgument("Mps: center out of range");
        break;
      case CanonicalForm::none: center_ = 0; break;
    }
  }

  Index n_sites() const { return static_cast<Index>(cores_.size()); }
  const Core& core(Index i) const { return cores_.at(static_cast<std::size_t>(i)); }
  const std::vector<Core>& cores() const { return cores_; }
  CanonicalForm canonical_form() const { return form_; }
  Index center() const { return center_; }

  /// Bond i sits to the left of site i; bonds 0 and N are the unit boundaries.
  Index bond_dim(Index i) const {
    return i == n_sites() ? cores_.back().right_dim() : core(i).left_dim();
  }

  std::vector<Index> bond_dims() const {
    std::vector<Index> out;
    for (Index i = 0; i <= n_sites(); ++i) out.push_back(bond_dim(i));
    return out;
  }

  Index max_bond() const {
    Index chi = 1;
    for (const Core& c : cores_) chi = std::max(chi, c.right_dim());
    return chi;
  }

  /// Multiplies the state by `factor`, on the core that carries the norm so
  /// that the canonical form survives.
  Mps scaled(Scalar factor) const {
    Mps out = *this;
    const std::size_t site = static_cast<std::size_t>(form_ == CanonicalForm::none ? 0 : center_);
    for (auto& s : out.cores_[site].slice) s *= factor;
    return out;
  }

 private:
  std::vector<Core> cores_;
  CanonicalForm form_ = CanonicalForm::none;
  Index center_ = 0;
};

using MpsD = Mps<double>;

// --------------------------------------------------------------------------
// Evaluation

/// Contraction for one bit string ("0101..."), most significant bit first.
template <typename Scalar>
Scalar amplitude(const Mps<Scalar>& m, std::string_view bits) {
  if (static_cast<Index>(bits.size()) != m.n_sites()) {
    throw InvalidArgument("amplitude: bit string length " + std::to_string(bits.size()) +
                          " does not match " + std::to_string(m.n_sites()) + " sites");
  }
  Matrix<Scalar> row = Matrix<Scalar>::Ones(1, 1);
  for (Index i = 0; i < m.n_sites(); ++i) {
    const char b = bits[static_cast<std::size_t>(i)];
    if (b != '0' && b != '1') throw InvalidArgument("amplitude: bit string must contain 0/1 only");
    row = row * m.core(i).slice[b - '0'];
  }
  return row(0, 0);
}

/// Contraction for a big-endian basis index.
template <typename Scalar>
Scalar amplitude_at(const Mps<Scalar>& m, std::uint64_t index) {
  const Index n = m.n_sites();
  if (n < 64 && index >= (std::uint64_t(1) << n)) throw InvalidArgument("amplitude_at: index out of range");
  Matrix<Scalar> row = Matrix<Scalar>::Ones(1, 1);
  for (Index i = 0; i < n; ++i) {
    const int s = static_cast<int>((index >> (n - 1 - i)) & 1u);
    row = row * m.core(i).slice[s];
  }
  return row(0, 0);
}

/// Dense 2^N vector of all amplitudes, big-endian order.
template <typename Scalar>
Vector<Scalar> to_statevector(const Mps<Scalar>& m) {
  require_dense_size(m.n_sites(), "to_statevector");
  // rows: prefix index over the sites seen so far; cols: open bond
  Matrix<Scalar> partial = Matrix<Scalar>::Ones(1, 1);
  for (const auto& c : m.cores()) {
    Matrix<Scalar> next(partial.rows() * 2, c.right_dim());
    for (Index p = 0; p < partial.rows(); ++p)
      for (int s = 0; s < 2; ++s) next.row(2 * p + s) = partial.row(p) * c.slice[s];
    partial = std::move(next);
  }
  return partial.col(0);
}

// --------------------------------------------------------------------------
// Construction from a dense vector (TT-SVD)

/// Left-to-right sweep of (truncated) SVDs of the unfolding matrices. The
/// result is left-canonical; the norm sits on the last core. When `errors` is
/// given it receives the Frobenius norm discarded at each of the N-1 cuts.
template <typename Scalar>
Mps<Scalar> to_mps_exact(const Vector<Scalar>& v, const TruncationPolicy& policy = {},
                         std::vector<Scalar>* errors = nullptr) {
  const int n = qubits_for_length(v.size(), "to_mps_exact");
  require_dense_size(n, "to_mps_exact");
  if (!v.allFinite()) throw InvalidArgument("to_mps_exact: non-finite entries");
  if (v.squaredNorm() == Scalar(0)) throw InvalidArgument("to_mps_exact: zero vector");
  if (errors) errors->clear();

  using RowMajor = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  std::vector<typename Mps<Scalar>::Core> cores;
  std::vector<Scalar> buffer(v.data(), v.data() + v.size());
  Index alpha = 1;
  for (int k = 0; k + 1 < n; ++k) {
    const Index rows = alpha * 2;
    const Index cols = static_cast<Index>(buffer.size()) / rows;
    Eigen::Map<const RowMajor> unfolding(buffer.data(), rows, cols);
    const SvdResult<Scalar> dec = truncated_svd(unfolding, policy);
    cores.push_back(MpsCore<Scalar>::from_left_unfolding(dec.u));
    if (errors) errors->push_back(dec.truncation_error);
    const RowMajor rest = dec.s.asDiagonal() * dec.vt;
    buffer.assign(rest.data(), rest.data() + rest.size());
    alpha = dec.rank();
  }
  Eigen::Map<const RowMajor> last(buffer.data(), alpha, 2);
  typename Mps<Scalar>::Core tail;
  for (int s = 0; s < 2; ++s) tail.slice[s] = last.col(s);
  cores.push_back(std::move(tail));
  return Mps<Scalar>(std::move(cores), n > 1 ? CanonicalForm::left : CanonicalForm::none);
}

// --------------------------------------------------------------------------
// Arithmetic

/// Block-diagonal sum; bond dimensions add at every internal bond.
template <typename Scalar>
Mps<Scalar> add(const Mps<Scalar>& a, const Mps<Scalar>& b) {
  if (a.n_sites() != b.n_sites()) {
    throw InvalidArgument("add: site counts differ (" + std::to_string(a.n_sites()) + " vs " +
                          std::to_string(b.n_sites()) + ")");
  }
  const Index n = a.n_sites();
  std::vector<MpsCore<Scalar>> cores(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const auto& ca = a.core(i);
    const auto& cb = b.core(i);
    auto& out = cores[static_cast<std::size_t>(i)];
    const bool first = i == 0;
    const bool last = i == n - 1;
    for (int s = 0; s < 2; ++s) {
      if (first && last) {
        out.slice[s] = ca.slice[s] + cb.slice[s];
      } else if (first) {  // row vectors side by side
        out.slice[s].resize(1, ca.right_dim() + cb.right_dim());
        out.slice[s] << ca.slice[s], cb.slice[s];
      } else if (last) {  // column vectors stacked
        out.slice[s].resize(ca.left_dim() + cb.left_dim(), 1);
        out.slice[s] << ca.slice[s], cb.slice[s];
      } else {
        out.slice[s] = Matrix<Scalar>::Zero(ca.left_dim() + cb.left_dim(),
                                            ca.right_dim() + cb.right_dim());
        out.slice[s].topLeftCorner(ca.left_dim(), ca.right_dim()) = ca.slice[s];
        out.slice[s].bottomRightCorner(cb.left_dim(), cb.right_dim()) = cb.slice[s];
      }
    }
  }
  return Mps<Scalar>(std::move(cores));
}

/// <a|b> by left-to-right transfer matrices, O(N chi^3).
template <typename Scalar>
Scalar overlap(const Mps<Scalar>& a, const Mps<Scalar>& b) {
  if (a.n_sites() != b.n_sites()) throw InvalidArgument("overlap: site counts differ");
  Matrix<Scalar> env = Matrix<Scalar>::Ones(1, 1);
  for (Index i = 0; i < a.n_sites(); ++i) {
    Matrix<Scalar> next = a.core(i).slice[0].transpose() * env * b.core(i).slice[0];
    next.noalias() += a.core(i).slice[1].transpose() * env * b.core(i).slice[1];
    env = std::move(next);
  }
  return env(0, 0);
}

template <typename Scalar>
Scalar norm(const Mps<Scalar>& m) {
  return std::sqrt(std::max(overlap(m, m), Scalar(0)));
}

template <typename Scalar>
Mps<Scalar> normalize(const Mps<Scalar>& m) {
  const Scalar nrm = norm(m);
  if (!(nrm > Scalar(0))) throw NumericalError("normalize: zero-norm state");
  return m.scaled(Scalar(1) / nrm);
}

// --------------------------------------------------------------------------
// Gauge fixing

namespace detail {

// m = q * r with q having orthonormal columns; falls back to an SVD when m is
// wide, in which case the shared bond shrinks to m.rows().
template <typename Scalar>
std::pair<Matrix<Scalar>, Matrix<Scalar>> orthonormal_split(const Matrix<Scalar>& m) {
  if (m.rows() >= m.cols()) {
    auto qr = qr_orthonormalize(m);
    return {std::move(qr.q), std::move(qr.r)};
  }
  auto dec = svd(m);
  return {std::move(dec.u), dec.s.asDiagonal() * dec.vt};
}

template <typename Scalar>
void sweep_left_orthogonal(std::vector<MpsCore<Scalar>>& cores, Index upto) {
  for (Index i = 0; i < upto; ++i) {
    auto& here = cores[static_cast<std::size_t>(i)];
    auto& next = cores[static_cast<std::size_t>(i + 1)];
    auto [q, r] = orthonormal_split<Scalar>(here.left_unfolding());
    here = MpsCore<Scalar>::from_left_unfolding(q);
    for (auto& s : next.slice) s = (r * s).eval();
  }
}

template <typename Scalar>
void sweep_right_orthogonal(std::vector<MpsCore<Scalar>>& cores, Index downto) {
  for (Index i = static_cast<Index>(cores.size()) - 1; i > downto; --i) {
    auto& here = cores[static_cast<std::size_t>(i)];
    auto& prev = cores[static_cast<std::size_t>(i - 1)];
    auto [q, r] = orthonormal_split<Scalar>(here.right_unfolding().transpose());
    here = MpsCore<Scalar>::from_right_unfolding(q.transpose());
    for (auto& s : prev.slice) s = (s * r.transpose()).eval();
  }
}

}  // namespace detail

/// Gauge transformation to left form (every site but the last is a left
/// isometry) or right form (every site but the first is a right isometry).
/// Amplitudes are unchanged.
template <typename Scalar>
Mps<Scalar> canonicalize(const Mps<Scalar>& m, CanonicalForm form) {
  if (m.n_sites() == 1) return Mps<Scalar>(m.cores(), CanonicalForm::none);
  auto cores = m.cores();
  switch (form) {
    case CanonicalForm::left:
      detail::sweep_left_orthogonal(cores, m.n_sites() - 1);
      return Mps<Scalar>(std::move(cores), CanonicalForm::left);
    case CanonicalForm::right:
      detail::sweep_right_orthogonal(cores, Index(0));
      return Mps<Scalar>(std::move(cores), CanonicalForm::right);
    default:
      throw InvalidArgument("canonicalize: form must be left or right");
  }
}

/// max deviation of sum_s A^s^T A^s from identity (left) or
/// sum_s A^s A^s^T from identity (right).
template <typename Scalar>
Scalar isometry_deviation(const MpsCore<Scalar>& c, CanonicalForm side) {
  if (side == CanonicalForm::left) return orthonormality_deviation(c.left_unfolding());
  if (side == CanonicalForm::right) return orthonormality_deviation(c.right_unfolding().transpose());
  throw InvalidArgument("isometry_deviation: side must be left or right");
}

// --------------------------------------------------------------------------
// Rounding

/// Left-orthogonalize, then sweep right-to-left with truncated SVDs. The
/// result is right-canonical. Each cut's discarded Frobenius norm is exact
/// (both neighbours are isometries at that point) and is reported through
/// `errors` in sweep order (cut N-1 first).
template <typename Scalar>
Mps<Scalar> tt_round(const Mps<Scalar>& m, const TruncationPolicy& policy,
                     std::vector<Scalar>* errors = nullptr) {
  if (errors) errors->clear();
  if (m.n_sites() == 1) return Mps<Scalar>(m.cores());
  auto cores = m.cores();
  detail::sweep_left_orthogonal(cores, m.n_sites() - 1);
  for (Index i = m.n_sites() - 1; i > 0; --i) {
    auto& here = cores[static_cast<std::size_t>(i)];
    auto& prev = cores[static_cast<std::size_t>(i - 1)];
    const SvdResult<Scalar> dec = truncated_svd(here.right_unfolding(), policy);
    here = MpsCore<Scalar>::from_right_unfolding(dec.vt);
    const Matrix<Scalar> us = dec.u * dec.s.asDiagonal();
    for (auto& s : prev.slice) s = (s * us).eval();
    if (errors) errors->push_back(dec.truncation_error);
  }
  return Mps<Scalar>(std::move(cores), CanonicalForm::right);
}

/// Random Gaussian cores with bonds min(chi, 2^i, 2^(N-i)).
template <typename Scalar, typename Rng>
Mps<Scalar> random_mps(Index n_sites, Index chi, Rng& rng) {
  if (n_sites < 1 || chi < 1) throw InvalidArgument("random_mps: need n_sites >= 1 and chi >= 1");
  std::normal_distribution<Scalar> gauss(Scalar(0), Scalar(1));
  auto bond = [&](Index i) -> Index {
    if (i == 0 || i == n_sites) return 1;
    const Index room = std::min(i, n_sites - i);
    return room >= 62 ? chi : std::min<Index>(chi, Index(1) << room);
  };
  std::vector<MpsCore<Scalar>> cores(static_cast<std::size_t>(n_sites));
  for (Index i = 0; i < n_sites; ++i) {
    for (auto& s : cores[static_cast<std::size_t>(i)].slice) {
      s.resize(bond(i), bond(i + 1));
      for (Index r = 0; r < s.rows(); ++r)
        for (Index c = 0; c < s.cols(); ++c) s(r, c) = gauss(rng);
    }
  }
  return Mps<Scalar>(std::move(cores));
}

// --------------------------------------------------------------------------
// Variational compression

enum class AlsInit { tt_round, random };

struct CompressionOptions {
  Index target_chi = 2;
  int max_sweeps = 50;
  double convergence_tol = 1e-10;  // relative change of the overlap per sweep
  AlsInit init = AlsInit::tt_round;
  std::uint64_t seed = 0;          // used by AlsInit::random only

  void validate() const {
    if (target_chi < 1) throw InvalidArgument("CompressionOptions: target_chi must be >= 1");
    if (max_sweeps < 1) throw InvalidArgument("CompressionOptions: max_sweeps must be >= 1");
    if (!(convergence_tol > 0.0)) throw InvalidArgument("CompressionOptions: convergence_tol must be > 0");
  }
};

struct CompressionStats {
  double initial_fidelity = 0.0;
  std::vector<double> history;  // fidelity after every half sweep
  int sweeps = 0;
  bool converged = false;
};

/// Single-site alternating optimization of |<x|m>| / |x| over states x with
/// bond dimension target_chi. The ansatz is kept in mixed canonical form with
/// the center on the site being updated, which turns the local normal
/// equations into a plain projection: the optimal core is the target
/// contracted with the cached left and right environments. Returns a
/// normalized, right-canonical state.
template <typename Scalar>
Mps<Scalar> compress_als(const Mps<Scalar>& target, const CompressionOptions& opts,
                         CompressionStats* stats = nullptr) {
  opts.validate();
  const Scalar target_norm = norm(target);
  if (!(target_norm > Scalar(0))) throw NumericalError("compress_als: zero-norm input");
  const Index n = target.n_sites();
  using Core = MpsCore<Scalar>;

  std::vector<Core> x;
  if (opts.init == AlsInit::tt_round) {
    x = tt_round(target, TruncationPolicy::rank(opts.target_chi)).cores();
  } else {
    std::mt19937_64 rng(opts.seed);
    x = canonicalize(random_mps<Scalar>(n, opts.target_chi, rng), CanonicalForm::right).cores();
  }

  CompressionStats local;
  CompressionStats& st = stats ? *stats : local;
  st = CompressionStats{};

  if (n == 1) {
    const Scalar nrm = std::sqrt(target.core(0).slice[0].squaredNorm() + target.core(0).slice[1].squaredNorm());
    st.initial_fidelity = 1.0;
    st.history.push_back(1.0);
    st.converged = true;
    return Mps<Scalar>(target.cores()).scaled(Scalar(1) / nrm);
  }

  // left[i]: contraction of sites < i, (bond of x) x (bond of target)
  // right[i]: contraction of sites > i
  std::vector<Matrix<Scalar>> left(static_cast<std::size_t>(n)), right(static_cast<std::size_t>(n));
  const auto& m = target.cores();
  auto at = [](auto& vec, Index i) -> decltype(auto) { return vec[static_cast<std::size_t>(i)]; };

  auto grow_left = [&](Index i) {
    Matrix<Scalar> e = at(x, i).slice[0].transpose() * at(left, i) * at(m, i).slice[0];
    e.noalias() += at(x, i).slice[1].transpose() * at(left, i) * at(m, i).slice[1];
    at(left, i + 1) = std::move(e);
  };
  auto grow_right = [&](Index i) {
    Matrix<Scalar> e = at(x, i).slice[0] * at(right, i) * at(m, i).slice[0].transpose();
    e.noalias() += at(x, i).slice[1] * at(right, i) * at(m, i).slice[1].transpose();
    at(right, i - 1) = std::move(e);
  };
  auto projection = [&](Index i) {
    Core p;
    for (int s = 0; s < 2; ++s) p.slice[s] = at(left, i) * at(m, i).slice[s] * at(right, i).transpose();
    return p;
  };
  auto core_norm = [](const Core& c) {
    return std::sqrt(c.slice[0].squaredNorm() + c.slice[1].squaredNorm());
  };

  at(left, 0) = Matrix<Scalar>::Ones(1, 1);
  at(right, n - 1) = Matrix<Scalar>::Ones(1, 1);
  for (Index i = n - 1; i > 0; --i) grow_right(i);

  {
    // x is right-canonical, so |x| = |x[0]| and <x|m> = <x[0], P[0]>.
    const Core p = projection(0);
    const Scalar ov = (at(x, 0).slice[0].cwiseProduct(p.slice[0])).sum() +
                      (at(x, 0).slice[1].cwiseProduct(p.slice[1])).sum();
    st.initial_fidelity = static_cast<double>(std::abs(ov) / (core_norm(at(x, 0)) * target_norm));
  }

  double previous = st.initial_fidelity;
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    for (Index i = 0; i + 1 < n; ++i) {
      const Core p = projection(i);
      auto [q, r] = detail::orthonormal_split<Scalar>(p.left_unfolding());
      at(x, i) = Core::from_left_unfolding(q);
      for (auto& s : at(x, i + 1).slice) s = (r * s).eval();
      grow_left(i);
    }
    {
      at(x, n - 1) = projection(n - 1);
      st.history.push_back(static_cast<double>(core_norm(at(x, n - 1)) / target_norm));
    }
    for (Index i = n - 1; i > 0; --i) {
      const Core p = projection(i);
      auto [q, r] = detail::orthonormal_split<Scalar>(p.right_unfolding().transpose());
      at(x, i) = Core::from_right_unfolding(q.transpose());
      for (auto& s : at(x, i - 1).slice) s = (s * r.transpose()).eval();
      grow_right(i);
    }
    at(x, 0) = projection(0);
    const double current = static_cast<double>(core_norm(at(x, 0)) / target_norm);
    st.history.push_back(current);
    st.sweeps = sweep + 1;
    if (std::abs(current - previous) <= opts.convergence_tol * std::max(current, 1e-300)) {
      st.converged = true;
      break;
    }
    previous = current;
  }

  const Scalar nrm = core_norm(at(x, 0));
  if (!(nrm > Scalar(0))) throw NumericalError("compress_als: ansatz collapsed to zero overlap");
  for (auto& s : at(x, 0).slice) s /= nrm;
  return Mps<Scalar>(std::move(x), CanonicalForm::right);
}

// --------------------------------------------------------------------------
// Entanglement diagnostics on dense vectors

/// Singular values of the 2^j x 2^(N-j) reshaping of v for j = 1..N-1.
template <typename Scalar>
std::vector<Vector<Scalar>> unfolding_spectra(const Vector<Scalar>& v) {
  const int n = qubits_for_length(v.size(), "unfolding_spectra");
  std::vector<Vector<Scalar>> out;
  for (int j = 1; j < n; ++j) {
    // column-major map of the transposed unfolding; same spectrum
    Eigen::Map<const Matrix<Scalar>> unfolding_t(v.data(), Index(1) << (n - j), Index(1) << j);
    Eigen::BDCSVD<Matrix<Scalar>> dec(unfolding_t);
    if (dec.info() != Eigen::Success) throw NumericalError("unfolding_spectra: svd did not converge");
    out.push_back(dec.singularValues());
  }
  return out;
}

/// -sum lambda ln lambda with lambda = sigma^2 / sum sigma^2.
template <typename Scalar>
Scalar bipartite_vne(const Vector<Scalar>& spectrum) {
  const Scalar total = spectrum.squaredNorm();
  if (!(total > Scalar(0))) throw InvalidArgument("bipartite_vne: all-zero spectrum");
  Scalar entropy = 0;
  for (Index i = 0; i < spectrum.size(); ++i) {
    const Scalar lambda = spectrum(i) * spectrum(i) / total;
    if (lambda > Scalar(0)) entropy -= lambda * std::log(lambda);
  }
  return entropy;
}

}  // namespace mpsprep
