#pragma once

// Linear-depth circuits obtained from bond-dimension-2 matrix product states.
//
// For a right-canonical MPS the state is produced from |0...0> by a staircase
// of isometries: gate t (on qubits t, t+1) maps |a>_t |0>_{t+1}, where qubit t
// holds the incoming bond index a, to sum_{s,b} M[t]^s_{a,b} |s>_t |b>_{t+1}.
// The remaining columns of each 4x4 gate are an orthogonal completion. The
// last site becomes a single-qubit gate on qubit N-1.

#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "mpsprep/mps.hpp"

namespace mpsprep {

/// A one- or two-qubit real orthogonal gate. For two qubits (q0, q1) the
/// matrix acts on the basis index 2 * bit(q0) + bit(q1).
template <typename Scalar>
struct Gate {
  std::vector<int> qubits;
  Matrix<Scalar> matrix;

  bool two_qubit() const { return qubits.size() == 2; }
};

template <typename Scalar>
struct Circuit {
  int n_qubits = 0;
  std::vector<Gate<Scalar>> gates;  // applied in order to |0...0>

  std::size_t two_qubit_count() const {
    std::size_t n = 0;
    for (const auto& g : gates) n += g.two_qubit() ? 1 : 0;
    return n;
  }
};

using GateD = Gate<double>;
using CircuitD = Circuit<double>;

namespace detail {

// Embeds the isometry rows (inputs a < rows.rows()) into a dim x dim
// orthogonal matrix whose column `input_column(a)` is row a of `rows`.
template <typename Scalar>
Matrix<Scalar> complete_gate(const Matrix<Scalar>& rows, Index dim, Index input_stride) {
  Matrix<Scalar> basis(dim, dim);
  basis.topRows(rows.rows()) = rows;
  if (rows.rows() < dim) basis.bottomRows(dim - rows.rows()) = null_space_completion(rows);
  Matrix<Scalar> gate(dim, dim);
  std::vector<bool> used(static_cast<std::size_t>(dim), false);
  for (Index a = 0; a < rows.rows(); ++a) {
    gate.col(a * input_stride) = basis.row(a).transpose();
    used[static_cast<std::size_t>(a * input_stride)] = true;
  }
  Index next = rows.rows();
  for (Index col = 0; col < dim; ++col) {
    if (!used[static_cast<std::size_t>(col)]) gate.col(col) = basis.row(next++).transpose();
  }
  return gate;
}

}  // namespace detail

/// Builds the staircase circuit for a normalized MPS with max bond <= 2.
/// Produces N-1 two-qubit gates followed by one single-qubit gate (a single
/// one-qubit gate when N = 1).
template <typename Scalar>
Circuit<Scalar> extract_circuit(const Mps<Scalar>& m) {
  if (m.max_bond() > 2) {
    throw InvalidArgument("extract_circuit: max bond " + std::to_string(m.max_bond()) +
                          " > 2; compress the state to chi <= 2 first");
  }
  const Scalar nrm2 = overlap(m, m);
  if (std::abs(nrm2 - Scalar(1)) > Scalar(1e-8)) {
    std::ostringstream msg;
    msg << "extract_circuit: state is not normalized (<psi|psi> = " << nrm2 << ")";
    throw InvalidArgument(msg.str());
  }
  const Mps<Scalar> rc = m.canonical_form() == CanonicalForm::right
                             ? m
                             : canonicalize(m, CanonicalForm::right);
  const Index n = rc.n_sites();
  Circuit<Scalar> c;
  c.n_qubits = static_cast<int>(n);

  for (Index t = 0; t + 1 < n; ++t) {
    const auto& core = rc.core(t);
    // rows[a][(s, b)] with b padded to 2
    Matrix<Scalar> rows = Matrix<Scalar>::Zero(core.left_dim(), 4);
    for (Index a = 0; a < core.left_dim(); ++a)
      for (int s = 0; s < 2; ++s)
        for (Index b = 0; b < core.right_dim(); ++b) rows(a, 2 * s + b) = core.slice[s](a, b);
    if (t == 0) rows.row(0).normalize();  // absorbs rounding in the norm
    c.gates.push_back({{static_cast<int>(t), static_cast<int>(t + 1)},
                       detail::complete_gate<Scalar>(rows, 4, 2)});
  }

  const auto& tail = rc.core(n - 1);
  Matrix<Scalar> rows(tail.left_dim(), 2);
  for (Index a = 0; a < tail.left_dim(); ++a)
    for (int s = 0; s < 2; ++s) rows(a, s) = tail.slice[s](a, 0);
  if (n == 1) rows.row(0).normalize();
  c.gates.push_back({{static_cast<int>(n - 1)}, detail::complete_gate<Scalar>(rows, 2, 1)});
  return c;
}

struct CircuitValidation {
  bool ok = true;
  double max_orthogonality_deviation = 0.0;
  bool orthogonal = true;
  bool staircase = true;
  bool gate_count = true;
  bool qubits_in_range = true;
  std::vector<std::string> failures;
};

/// Checks orthogonality of every gate (tolerance 1e-10), the staircase
/// layout (two-qubit gate t on (t, t+1), optional final single-qubit gate on
/// the last qubit) and the gate budget (at most N + 1 gates).
template <typename Scalar>
CircuitValidation validate_circuit(const Circuit<Scalar>& c, double tol = 1e-10) {
  CircuitValidation v;
  auto fail = [&v](bool& flag, std::string what) {
    flag = false;
    v.ok = false;
    v.failures.push_back(std::move(what));
  };
  if (c.n_qubits < 1) fail(v.qubits_in_range, "n_qubits must be >= 1");
  if (c.gates.size() > static_cast<std::size_t>(c.n_qubits) + 1) {
    fail(v.gate_count, "gate count " + std::to_string(c.gates.size()) + " exceeds N + 1");
  }

  int expected_pair = 0;
  bool seen_single = false;
  for (std::size_t t = 0; t < c.gates.size(); ++t) {
    const auto& g = c.gates[t];
    const std::string tag = "gate " + std::to_string(t);
    const Index dim = g.qubits.size() == 2 ? 4 : 2;
    if (g.qubits.empty() || g.qubits.size() > 2) {
      fail(v.qubits_in_range, tag + ": must act on one or two qubits");
      continue;
    }
    for (int q : g.qubits) {
      if (q < 0 || q >= c.n_qubits) fail(v.qubits_in_range, tag + ": qubit " + std::to_string(q) + " out of range");
    }
    if (g.matrix.rows() != dim || g.matrix.cols() != dim) {
      fail(v.orthogonal, tag + ": matrix has wrong shape");
      continue;
    }
    const double dev = g.matrix.allFinite()
                           ? static_cast<double>(orthonormality_deviation(g.matrix))
                           : std::numeric_limits<double>::infinity();
    v.max_orthogonality_deviation = std::max(v.max_orthogonality_deviation, dev);
    if (!(dev <= tol)) {
      std::ostringstream msg;
      msg << tag << ": not orthogonal (deviation " << dev << ")";
      fail(v.orthogonal, msg.str());
    }
    if (seen_single) fail(v.staircase, tag + ": follows the terminal single-qubit gate");
    if (g.two_qubit()) {
      if (g.qubits[0] != expected_pair || g.qubits[1] != expected_pair + 1) {
        fail(v.staircase, tag + ": expected qubits (" + std::to_string(expected_pair) + ", " +
                              std::to_string(expected_pair + 1) + ")");
      }
      ++expected_pair;
    } else {
      seen_single = true;
      if (g.qubits[0] != expected_pair || expected_pair != c.n_qubits - 1) {
        fail(v.staircase, tag + ": single-qubit gate must sit on the last qubit after the staircase");
      }
    }
  }
  return v;
}

/// Reads the MPS back out of a staircase circuit: core t is the block of gate
/// t's columns that receive |a>|0>. Only valid for circuits produced by
/// extract_circuit (or with the same layout); no dense vectors are formed.
template <typename Scalar>
Mps<Scalar> circuit_to_mps(const Circuit<Scalar>& c) {
  const auto check = validate_circuit(c, 1e-8);
  if (!check.ok || c.gates.size() != static_cast<std::size_t>(c.n_qubits)) {
    throw InvalidArgument("circuit_to_mps: circuit is not a complete staircase");
  }
  const Index n = c.n_qubits;
  std::vector<MpsCore<Scalar>> cores(static_cast<std::size_t>(n));
  for (Index t = 0; t < n; ++t) {
    const auto& g = c.gates[static_cast<std::size_t>(t)].matrix;
    const Index left = t == 0 ? 1 : 2;
    auto& core = cores[static_cast<std::size_t>(t)];
    if (t + 1 < n) {
      for (int s = 0; s < 2; ++s) {
        core.slice[s].resize(left, 2);
        for (Index a = 0; a < left; ++a)
          for (Index b = 0; b < 2; ++b) core.slice[s](a, b) = g(2 * s + b, 2 * a);
      }
    } else {
      for (int s = 0; s < 2; ++s) {
        core.slice[s].resize(left, 1);
        for (Index a = 0; a < left; ++a) core.slice[s](a, 0) = g(s, a);
      }
    }
  }
  return Mps<Scalar>(std::move(cores));
}

}  // namespace mpsprep
