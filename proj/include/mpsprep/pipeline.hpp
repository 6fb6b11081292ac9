#pragma once

// End-to-end encoding: subdivide, fit, per-region MPS, sum, compress, extract,
// plus the sweep and comparison drivers behind the command line tool.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mpsprep/analysis.hpp"
#include "mpsprep/circuit.hpp"
#include "mpsprep/simulator.hpp"

namespace mpsprep {

struct RunConfig {
  DistributionSpec spec = DistributionSpec::gaussian(1.0, 1.0, 0.0, 2.0);
  int n_qubits = 10;
  int support_bit = 3;
  int degree = 3;
  int samples_per_region = 64;
  int target_chi = 2;
  CompressionOptions compression;  // target_chi is overwritten by the field above
  std::uint64_t seed = 0;          // forwarded to randomized ALS starts

  void validate() const;
  CompressionOptions effective_compression() const;
};

struct StageTimings {
  double fit_ms = 0.0;
  double assemble_ms = 0.0;
  double compress_ms = 0.0;
  double extract_ms = 0.0;
  double simulate_ms = 0.0;
};

struct RunReport {
  RunConfig config;  // with the resolved domain
  double fidelity = 0.0;
  // "exact_target" when fidelity compares against the reference state,
  // "compressed_mps" when N is above the dense limit.
  std::string fidelity_reference;
  std::optional<ErrorDecomposition> errors;
  std::vector<Index> assembled_bonds;
  std::vector<Index> compressed_bonds;
  std::size_t gate_count = 0;
  std::size_t two_qubit_gates = 0;
  double max_gate_deviation = 0.0;
  CompressionStats compression;
  StageTimings timings;
};

struct EncodeResult {
  CircuitD circuit;
  RunReport report;
};

/// Runs the full pipeline. Failures are rethrown as StageError tagged with
/// the failing stage ("fit", "assemble", "compress", "extract", "simulate").
EncodeResult encode(const RunConfig& config);

/// Error components for one configuration (requires N <= dense limit).
ErrorDecomposition error_decomposition(const RunConfig& config);

struct SweepRow {
  std::string distribution;
  double mu = 0.0;
  double sigma = 0.0;
  int n_qubits = 0;
  int support_bit = 0;
  int degree = 0;
  int chi = 0;
  double fidelity = 0.0;
  double pp_err = 0.0;
  double mps_err = 0.0;
  double gate_err = 0.0;
  std::size_t gate_count = 0;
  StageTimings timings;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

struct SweepOptions {
  int workers = 1;
};

/// One row per (family, sigma, N) in that nesting order. Each family is a
/// template whose sigma is replaced; domains stay as given.
std::vector<SweepRow> sweep_sigma(const std::vector<DistributionSpec>& families,
                                  const std::vector<double>& sigmas, const std::vector<int>& ns,
                                  const RunConfig& base, const SweepOptions& opts = {});

/// One row per degree, using base.spec.
std::vector<SweepRow> sweep_degree(const std::vector<int>& degrees, const RunConfig& base,
                                   const SweepOptions& opts = {});

extern const std::vector<std::string> kSweepColumns;

/// Writes the header and rows with 12 significant digits. Failed rows carry
/// nan in their numeric result fields. With include_timings false the timing
/// fields are left empty so repeated runs are byte-identical.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                     bool include_timings = true);

struct SpectraResult {
  double sigma = 0.0;
  std::vector<VectorXd> spectra;  // cut j = 1..N-1
  DecayFit fit;
  double chi_bound = 0.0;  // at the pooled beta
  double max_derivative = 0.0;
  double max_vne = 0.0;
};

/// Spectra of the exact target for each sigma (spec's sigma replaced).
std::vector<SpectraResult> spectra(const DistributionSpec& spec, int n_qubits,
                                   const std::vector<double>& sigmas, int chi = 2);

void write_spectra_csv(std::ostream& out, const std::vector<SpectraResult>& results);
void write_spectra_summary_csv(std::ostream& out, const std::vector<SpectraResult>& results,
                               int n_qubits, int chi);

struct OracleReport {
  int n_qubits = 0;
  double circuit_fidelity = 0.0;
  double optimal_fidelity = 0.0;  // rank-chi TT-SVD of the exact target
  double ratio = 0.0;
  bool ratio_above_one = false;
};

/// Fidelity of the best rank-chi TT-SVD state against the exact target.
double svd_oracle_fidelity(const VectorXd& target, int chi);

OracleReport oracle_compare(const RunConfig& config);

void write_oracle_csv(std::ostream& out, const std::vector<OracleReport>& rows);

/// Formats with 12 significant digits.
std::string format_number(double value);

}  // namespace mpsprep
