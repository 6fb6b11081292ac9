#pragma once

// Exact statevector simulation of real circuits and pure-state fidelities.

#include <cstdint>

#include "mpsprep/circuit.hpp"

namespace mpsprep {

/// Applies one gate in place. Qubit q is bit N-1-q of the basis index.
template <typename Scalar>
void apply_gate(Vector<Scalar>& state, int n_qubits, const Gate<Scalar>& gate) {
  for (int q : gate.qubits) {
    if (q < 0 || q >= n_qubits) {
      throw InvalidArgument("apply_gate: qubit " + std::to_string(q) + " out of range for N = " +
                            std::to_string(n_qubits));
    }
  }
  const auto dim = std::uint64_t(1) << n_qubits;
  const auto& u = gate.matrix;
  if (gate.qubits.size() == 1) {
    if (u.rows() != 2 || u.cols() != 2) throw InvalidArgument("apply_gate: expected a 2x2 matrix");
    const std::uint64_t bit = std::uint64_t(1) << (n_qubits - 1 - gate.qubits[0]);
    for (std::uint64_t i = 0; i < dim; ++i) {
      if (i & bit) continue;
      const Scalar a0 = state(Index(i));
      const Scalar a1 = state(Index(i | bit));
      state(Index(i)) = u(0, 0) * a0 + u(0, 1) * a1;
      state(Index(i | bit)) = u(1, 0) * a0 + u(1, 1) * a1;
    }
    return;
  }
  if (gate.qubits.size() != 2 || gate.qubits[0] == gate.qubits[1]) {
    throw InvalidArgument("apply_gate: gate must act on one qubit or two distinct qubits");
  }
  if (u.rows() != 4 || u.cols() != 4) throw InvalidArgument("apply_gate: expected a 4x4 matrix");
  const std::uint64_t hi = std::uint64_t(1) << (n_qubits - 1 - gate.qubits[0]);
  const std::uint64_t lo = std::uint64_t(1) << (n_qubits - 1 - gate.qubits[1]);
  const std::uint64_t offsets[4] = {0, lo, hi, hi | lo};
  Eigen::Matrix<Scalar, 4, 1> in;
  for (std::uint64_t i = 0; i < dim; ++i) {
    if (i & (hi | lo)) continue;
    for (int k = 0; k < 4; ++k) in(k) = state(Index(i | offsets[k]));
    const Eigen::Matrix<Scalar, 4, 1> out = u * in;
    for (int k = 0; k < 4; ++k) state(Index(i | offsets[k])) = out(k);
  }
}

/// Runs the circuit on |0...0>.
template <typename Scalar>
Vector<Scalar> simulate(const Circuit<Scalar>& c) {
  if (c.n_qubits < 1) throw InvalidArgument("simulate: circuit has no qubits");
  require_dense_size(c.n_qubits, "simulate");
  Vector<Scalar> state = Vector<Scalar>::Zero(Index(1) << c.n_qubits);
  state(0) = Scalar(1);
  for (const auto& g : c.gates) apply_gate(state, c.n_qubits, g);
  return state;
}

/// |<a|b>| for normalized real states (the trace fidelity specialised to pure
/// states), clamped to [0, 1].
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar fidelity(const Eigen::MatrixBase<DerivedA>& a,
                                   const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.size() != b.size()) {
    throw InvalidArgument("fidelity: state sizes differ (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
  return std::min(Scalar(1), std::abs(a.dot(b)));
}

/// Infidelity attributed to each stage of the pipeline. Every component is a
/// stage-wise fidelity drop: pp = 1 - F(target, pp state), mps = 1 - F(pp
/// state, compressed), gate = 1 - F(compressed, circuit output), and total =
/// 1 - F(target, circuit output). Shares divide each component by total.
struct ErrorDecomposition {
  double pp_error = 0.0;
  double mps_error = 0.0;
  double gate_error = 0.0;
  double total = 0.0;

  double share(double component) const { return total > 0.0 ? component / total : 0.0; }
  double pp_share() const { return share(pp_error); }
  double mps_share() const { return share(mps_error); }
  double gate_share() const { return share(gate_error); }

  static constexpr const char* convention =
      "stage-wise fidelity drops (1 - F between consecutive stages), shares = component / total";
};

/// All inputs must be normalized dense states of equal length.
inline ErrorDecomposition error_decomposition(const VectorXd& target, const VectorXd& pp_state,
                                              const VectorXd& compressed,
                                              const VectorXd& circuit_state) {
  ErrorDecomposition e;
  e.pp_error = 1.0 - fidelity(target, pp_state);
  e.mps_error = 1.0 - fidelity(pp_state, compressed);
  e.gate_error = 1.0 - fidelity(compressed, circuit_state);
  e.total = 1.0 - fidelity(target, circuit_state);
  return e;
}

}  // namespace mpsprep
