#include "mpsprep/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

namespace mpsprep {

void RunConfig::validate() const {
  spec.validate();
  if (n_qubits < 1) throw InvalidArgument("config: n must be >= 1");
  if (support_bit < 0 || support_bit >= n_qubits) {
    throw InvalidArgument("config: support bit k = " + std::to_string(support_bit) +
                          " must satisfy 0 <= k < N = " + std::to_string(n_qubits));
  }
  if (degree < 0) throw InvalidArgument("config: degree must be >= 0");
  if (samples_per_region < degree + 1) {
    throw InvalidArgument("config: samples per region must be >= degree + 1");
  }
  if (target_chi < 1) throw InvalidArgument("config: chi must be >= 1");
  effective_compression().validate();
}

CompressionOptions RunConfig::effective_compression() const {
  CompressionOptions c = compression;
  c.target_chi = target_chi;
  c.seed = seed;
  return c;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

template <typename F>
auto run_stage(const char* stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const NumericalError& e) {
    throw StageError(stage, e.what(), true);
  } catch (const Error& e) {
    throw StageError(stage, e.what(), false);
  }
}

struct PipelineStates {
  MpsD assembled;
  MpsD compressed;
};

}  // namespace

EncodeResult encode(const RunConfig& input) {
  RunConfig config = input;
  config.spec = resolve_domain(input.spec, input.n_qubits);
  run_stage("config", [&] {
    config.validate();
    return 0;
  });

  EncodeResult out;
  RunReport& report = out.report;
  report.config = config;
  const Grid grid(config.n_qubits, config.spec.a, config.spec.b);

  auto t0 = Clock::now();
  const PiecewisePoly pp = run_stage("fit", [&] {
    return fit_piecewise(config.spec, grid, config.support_bit, config.degree,
                         config.samples_per_region);
  });
  report.timings.fit_ms = elapsed_ms(t0);

  t0 = Clock::now();
  const MpsD assembled = run_stage("assemble", [&] { return normalize(assemble(pp, grid)); });
  report.timings.assemble_ms = elapsed_ms(t0);
  report.assembled_bonds = assembled.bond_dims();

  t0 = Clock::now();
  const MpsD compressed = run_stage("compress", [&] {
    return compress_als(assembled, config.effective_compression(), &report.compression);
  });
  report.timings.compress_ms = elapsed_ms(t0);
  report.compressed_bonds = compressed.bond_dims();

  t0 = Clock::now();
  out.circuit = run_stage("extract", [&] { return extract_circuit(compressed); });
  report.timings.extract_ms = elapsed_ms(t0);
  report.gate_count = out.circuit.gates.size();
  report.two_qubit_gates = out.circuit.two_qubit_count();
  report.max_gate_deviation = validate_circuit(out.circuit).max_orthogonality_deviation;

  t0 = Clock::now();
  run_stage("simulate", [&] {
    if (config.n_qubits <= dense_limit()) {
      const VectorXd target = target_amplitudes(config.spec, config.n_qubits);
      const VectorXd pp_state = to_statevector(assembled);
      const VectorXd comp_state = to_statevector(compressed);
      const VectorXd circ_state = simulate(out.circuit);
      report.errors = error_decomposition(target, pp_state, comp_state, circ_state);
      report.fidelity = fidelity(target, circ_state);
      report.fidelity_reference = "exact_target";
    } else {
      const MpsD from_circuit = circuit_to_mps(out.circuit);
      report.fidelity = std::min(1.0, std::abs(overlap(from_circuit, compressed)));
      report.fidelity_reference = "compressed_mps";
    }
    return 0;
  });
  report.timings.simulate_ms = elapsed_ms(t0);
  return out;
}

ErrorDecomposition error_decomposition(const RunConfig& config) {
  if (config.n_qubits > dense_limit()) {
    throw InvalidArgument("error_decomposition: N = " + std::to_string(config.n_qubits) +
                          " exceeds the dense limit");
  }
  return *encode(config).report.errors;
}

namespace {

SweepRow run_row(const RunConfig& config) {
  SweepRow row;
  row.distribution = to_string(config.spec.kind);
  row.mu = config.spec.mu;
  row.sigma = config.spec.sigma;
  row.n_qubits = config.n_qubits;
  row.support_bit = config.support_bit;
  row.degree = config.degree;
  row.chi = config.target_chi;
  try {
    const EncodeResult r = encode(config);
    row.fidelity = r.report.fidelity;
    if (r.report.errors) {
      row.pp_err = r.report.errors->pp_error;
      row.mps_err = r.report.errors->mps_error;
      row.gate_err = r.report.errors->gate_error;
    } else {
      row.pp_err = row.mps_err = row.gate_err = std::numeric_limits<double>::quiet_NaN();
    }
    row.gate_count = r.report.gate_count;
    row.timings = r.report.timings;
  } catch (const std::exception& e) {
    row.error = e.what();
    row.fidelity = row.pp_err = row.mps_err = row.gate_err =
        std::numeric_limits<double>::quiet_NaN();
  }
  return row;
}

std::vector<SweepRow> run_rows(const std::vector<RunConfig>& configs, int workers) {
  std::vector<SweepRow> rows(configs.size());
  const int pool = std::max(1, std::min<int>(workers, static_cast<int>(configs.size())));
  if (pool <= 1) {
    for (std::size_t i = 0; i < configs.size(); ++i) rows[i] = run_row(configs[i]);
    return rows;
  }
  // each worker claims the next unstarted cell; rows land at their own index
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  for (int w = 0; w < pool; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < configs.size(); i = next++) rows[i] = run_row(configs[i]);
    });
  }
  for (auto& t : threads) t.join();
  return rows;
}

}  // namespace

std::vector<SweepRow> sweep_sigma(const std::vector<DistributionSpec>& families,
                                  const std::vector<double>& sigmas, const std::vector<int>& ns,
                                  const RunConfig& base, const SweepOptions& opts) {
  std::vector<RunConfig> configs;
  for (const auto& family : families) {
    for (double sigma : sigmas) {
      for (int n : ns) {
        RunConfig c = base;
        c.spec = family;
        c.spec.sigma = sigma;
        c.n_qubits = n;
        configs.push_back(c);
      }
    }
  }
  return run_rows(configs, opts.workers);
}

std::vector<SweepRow> sweep_degree(const std::vector<int>& degrees, const RunConfig& base,
                                   const SweepOptions& opts) {
  std::vector<RunConfig> configs;
  for (int p : degrees) {
    if (p < 1) throw InvalidArgument("sweep_degree: degrees must be >= 1");
    RunConfig c = base;
    c.degree = p;
    configs.push_back(c);
  }
  return run_rows(configs, opts.workers);
}

const std::vector<std::string> kSweepColumns = {
    "distribution", "mu",       "sigma",    "N",          "k",         "p",
    "chi",          "fidelity", "pp_err",   "mps_err",    "gate_err",  "gate_count",
    "t_fit_ms",     "t_compress_ms", "t_extract_ms"};

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, bool include_timings) {
  for (std::size_t i = 0; i < kSweepColumns.size(); ++i) {
    out << (i ? "," : "") << kSweepColumns[i];
  }
  out << '\n';
  for (const auto& r : rows) {
    out << r.distribution << ',' << format_number(r.mu) << ',' << format_number(r.sigma) << ','
        << r.n_qubits << ',' << r.support_bit << ',' << r.degree << ',' << r.chi << ','
        << format_number(r.fidelity) << ',' << format_number(r.pp_err) << ','
        << format_number(r.mps_err) << ',' << format_number(r.gate_err) << ',';
    if (r.ok()) {
      out << r.gate_count;
    } else {
      out << "nan";
    }
    out << ',';
    if (include_timings && r.ok()) {
      // fit covers fitting and summing the region states
      out << format_number(r.timings.fit_ms + r.timings.assemble_ms) << ','
          << format_number(r.timings.compress_ms) << ',' << format_number(r.timings.extract_ms);
    } else {
      out << ",,";
    }
    out << '\n';
  }
}

std::vector<SpectraResult> spectra(const DistributionSpec& spec, int n_qubits,
                                   const std::vector<double>& sigmas, int chi) {
  std::vector<SpectraResult> out;
  for (double sigma : sigmas) {
    DistributionSpec s = spec;
    s.sigma = sigma;
    s = resolve_domain(s, n_qubits);
    SpectraResult r;
    r.sigma = sigma;
    const VectorXd target = target_amplitudes(s, n_qubits);
    r.spectra = unfolding_spectra(target);
    r.fit = fit_decay(r.spectra);
    r.chi_bound = r.fit.pooled.beta > 0.0 ? chi_bound(r.fit.pooled.beta, chi, n_qubits) : 1.0;
    r.max_derivative = max_derivative(s, n_qubits);
    r.max_vne = 0.0;
    for (const auto& sp : r.spectra) r.max_vne = std::max(r.max_vne, bipartite_vne(sp));
    out.push_back(std::move(r));
  }
  return out;
}

void write_spectra_csv(std::ostream& out, const std::vector<SpectraResult>& results) {
  out << "sigma,cut,index,singular_value\n";
  for (const auto& r : results) {
    for (std::size_t j = 0; j < r.spectra.size(); ++j) {
      for (Index i = 0; i < r.spectra[j].size(); ++i) {
        out << format_number(r.sigma) << ',' << j + 1 << ',' << i + 1 << ','
            << format_number(r.spectra[j](i)) << '\n';
      }
    }
  }
}

void write_spectra_summary_csv(std::ostream& out, const std::vector<SpectraResult>& results,
                               int n_qubits, int chi) {
  out << "sigma,N,chi,alpha,beta,r_squared,chi_bound,max_derivative,max_vne,skipped_cuts\n";
  for (const auto& r : results) {
    out << format_number(r.sigma) << ',' << n_qubits << ',' << chi << ','
        << format_number(r.fit.pooled.alpha) << ',' << format_number(r.fit.pooled.beta) << ','
        << format_number(r.fit.pooled.r_squared) << ',' << format_number(r.chi_bound) << ','
        << format_number(r.max_derivative) << ',' << format_number(r.max_vne) << ','
        << r.fit.skipped_cuts.size() << '\n';
  }
}

double svd_oracle_fidelity(const VectorXd& target, int chi) {
  const MpsD best = to_mps_exact(target, TruncationPolicy::rank(chi));
  return fidelity(target, to_statevector(normalize(best)));
}

OracleReport oracle_compare(const RunConfig& config) {
  if (config.n_qubits > dense_limit()) {
    throw InvalidArgument("oracle_compare: N = " + std::to_string(config.n_qubits) +
                          " exceeds the dense limit");
  }
  const EncodeResult r = encode(config);
  OracleReport out;
  out.n_qubits = config.n_qubits;
  out.circuit_fidelity = r.report.fidelity;
  const VectorXd target = target_amplitudes(r.report.config.spec, config.n_qubits);
  out.optimal_fidelity = svd_oracle_fidelity(target, config.target_chi);
  out.ratio = optimality_ratio(out.circuit_fidelity, out.optimal_fidelity);
  out.ratio_above_one = out.ratio > 1.0;
  return out;
}

void write_oracle_csv(std::ostream& out, const std::vector<OracleReport>& rows) {
  out << "N,circuit_fidelity,optimal_fidelity,ratio,ratio_above_one\n";
  for (const auto& r : rows) {
    out << r.n_qubits << ',' << format_number(r.circuit_fidelity) << ','
        << format_number(r.optimal_fidelity) << ',' << format_number(r.ratio) << ','
        << (r.ratio_above_one ? 1 : 0) << '\n';
  }
}

}  // namespace mpsprep
