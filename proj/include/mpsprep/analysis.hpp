#pragma once

// Exponential decay fits of unfolding spectra, the decay-model bound on the
// squared truncation error, optimality ratios and derivative-based entropy
// bounds.

#include <string>
#include <vector>

#include "mpsprep/function_approx.hpp"

namespace mpsprep {

struct ExpFit {
  double alpha = 0.0;
  double beta = 0.0;
  double r_squared = 0.0;
  int points = 0;
};

/// sigma_k = alpha exp(-beta k), k = 1, 2, ... within each spectrum.
struct DecayFit {
  std::vector<ExpFit> per_cut;     // one entry per usable cut
  std::vector<int> cut_index;      // original position of each usable cut
  std::vector<int> skipped_cuts;   // fewer than 2 values above the floor
  ExpFit pooled;
};

/// Linear least squares on log sigma versus k. Values at or below
/// `relative_floor * max(spectrum)` are dropped per cut.
DecayFit fit_decay(const std::vector<VectorXd>& spectra, double relative_floor = 1e-13);

/// Normalized squared-error bound for keeping chi of n exponentially decaying
/// singular values: sum_{k >= chi} e^{-2 beta k} / sum_{k < n} e^{-2 beta k}.
/// Equals 1 - e^{beta (n - chi)} csch(beta n) sinh(beta chi).
double chi_bound(double beta, int chi, int n);

/// e^{beta (n - chi)} csch(beta n) sinh(beta chi): the captured weight
/// fraction, i.e. 1 - chi_bound.
double chi_bound_captured_fraction(double beta, int chi, int n);

double optimality_ratio(double circuit_fidelity, double optimal_fidelity);

/// max_k |pdf'(x_k)| over the 2^N grid points.
double max_derivative(const DistributionSpec& spec, int n_qubits);

/// L sqrt(f') / 2^(N/2 - 1): bound on the entanglement entropy added by one
/// more qubit.
double vne_increment_bound(double width, double max_deriv, int n_qubits);

/// Largest bipartite entropy over all cuts of a dense state.
double max_bipartite_vne(const VectorXd& state);

}  // namespace mpsprep
