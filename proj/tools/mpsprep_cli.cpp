// mpsprep: encode distributions as circuits and run the sweep experiments.
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 I/O error.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "mpsprep/io.hpp"

using namespace mpsprep;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumerical = 2, kIo = 3 };

// Run-configuration flags shared by every verb. Values stay strings and go
// through the same parser as config files, so flags override file entries
// key by key.
struct RunFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "key = value file applied before flags");
    add(app, "dist", "--dist", "gaussian | lognormal | lorentzian | custom");
    add(app, "mu", "--mu", "location parameter");
    add(app, "sigma", "--sigma", "scale parameter");
    add(app, "domain", "--domain", "a,b");
    add(app, "poly", "--poly", "custom pdf = (c0 + c1 x + ...)^2, comma separated");
    add(app, "n", "--n", "qubits");
    add(app, "k", "--k", "support bit");
    add(app, "p", "--p", "polynomial degree");
    add(app, "samples", "--samples", "fit samples per region");
    add(app, "chi", "--chi", "target bond dimension");
    add(app, "sweeps", "--sweeps", "max ALS sweeps");
    add(app, "tol", "--tol", "ALS convergence tolerance");
    add(app, "init", "--init", "tt_round | random");
    add(app, "seed", "--seed", "seed for randomized ALS starts");
  }

  RunConfig resolve() const {
    std::map<std::string, std::string> kv;
    if (!config_path.empty()) kv = parse_config_text(read_text(config_path));
    for (const auto& [k, v] : values) kv[k] = v;
    return apply_config(kv, RunConfig{});
  }

 private:
  void add(CLI::App* app, const std::string& key, const std::string& flag, const std::string& help) {
    app->add_option_function<std::string>(flag, [this, key](const std::string& v) { values[key] = v; },
                                          help);
  }
};

std::vector<double> doubles(const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InvalidArgument("not a number: '" + item + "'");
    }
  }
  return out;
}

std::vector<int> ints(const std::string& text) {
  std::vector<int> out;
  for (double v : doubles(text)) {
    if (v != static_cast<int>(v)) throw InvalidArgument("not an integer: " + format_number(v));
    out.push_back(static_cast<int>(v));
  }
  return out;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

void report_row_failures(const std::vector<SweepRow>& rows) {
  for (const auto& r : rows) {
    if (!r.ok()) {
      std::cerr << "row " << r.distribution << " sigma=" << format_number(r.sigma)
                << " N=" << r.n_qubits << " p=" << r.degree << " failed: " << r.error << "\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear-depth state preparation circuits for smooth distributions"};
  app.require_subcommand(1);

  // encode
  auto* enc = app.add_subcommand("encode", "fit, compress and extract a circuit");
  RunFlags enc_flags;
  enc_flags.attach(enc);
  std::string enc_out = "circuit.json";
  std::string enc_report;
  enc->add_option("--out", enc_out, "circuit JSON path");
  enc->add_option("--report", enc_report, "report JSON path (stdout summary if omitted)");

  // sweep-sigma
  auto* ss = app.add_subcommand("sweep-sigma", "fidelity versus sigma for several distributions");
  RunFlags ss_flags;
  ss_flags.attach(ss);
  std::string ss_dists = "gaussian,lognormal,lorentzian";
  std::string ss_sigmas = "0.1,0.2,0.3,0.44,0.6,0.8,1";
  std::string ss_ns;
  std::string ss_logdomain = "0,5";
  std::string ss_out;
  int ss_workers = 1;
  bool ss_no_timings = false;
  ss->add_option("--dists", ss_dists, "comma separated distribution names");
  ss->add_option("--sigmas", ss_sigmas, "comma separated sigma values (may be empty)")
      ->expected(0, 1)
      ->default_str("");
  ss->add_option("--ns", ss_ns, "comma separated qubit counts (default: --n)");
  ss->add_option("--lognormal-domain", ss_logdomain, "domain used for the lognormal family");
  ss->add_option("--out", ss_out, "CSV path (stdout if omitted)");
  ss->add_option("--workers", ss_workers, "parallel cells");
  ss->add_flag("--no-timings", ss_no_timings, "leave timing columns empty");

  // sweep-degree
  auto* sd = app.add_subcommand("sweep-degree", "fidelity versus polynomial degree");
  RunFlags sd_flags;
  sd_flags.attach(sd);
  std::string sd_degrees = "1,2,3,4,5";
  std::string sd_out;
  int sd_workers = 1;
  bool sd_no_timings = false;
  sd->add_option("--degrees", sd_degrees, "comma separated degrees");
  sd->add_option("--out", sd_out, "CSV path (stdout if omitted)");
  sd->add_option("--workers", sd_workers, "parallel cells");
  sd->add_flag("--no-timings", sd_no_timings, "leave timing columns empty");

  // spectra
  auto* sp = app.add_subcommand("spectra", "unfolding spectra and decay fits of the exact target");
  RunFlags sp_flags;
  sp_flags.attach(sp);
  std::string sp_sigmas;
  std::string sp_out;
  std::string sp_summary;
  sp->add_option("--sigmas", sp_sigmas, "comma separated sigma values (default: --sigma)");
  sp->add_option("--out", sp_out, "singular value CSV path");
  sp->add_option("--summary", sp_summary, "fit summary CSV path (stdout if omitted)");

  // oracle-compare
  auto* oc = app.add_subcommand("oracle-compare", "pipeline fidelity against the TT-SVD optimum");
  RunFlags oc_flags;
  oc_flags.attach(oc);
  std::string oc_ns;
  std::string oc_out;
  oc->add_option("--ns", oc_ns, "comma separated qubit counts (default: --n)");
  oc->add_option("--out", oc_out, "CSV path (stdout if omitted)");

  // validate
  auto* va = app.add_subcommand("validate", "check a circuit and recompute its report fidelity");
  std::string va_circuit;
  std::string va_report;
  double va_tol = 1e-9;
  va->add_option("--circuit", va_circuit, "circuit JSON")->required();
  va->add_option("--report", va_report, "report JSON to cross-check");
  va->add_option("--tol", va_tol, "allowed fidelity mismatch");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (enc->parsed()) {
      const EncodeResult r = encode(enc_flags.resolve());
      save_circuit(r.circuit, enc_out);
      const std::string json = report_to_json(r.report);
      if (enc_report.empty()) {
        std::cout << "fidelity " << format_number(r.report.fidelity) << " ("
                  << r.report.fidelity_reference << "), gates " << r.report.gate_count << "\n";
      } else {
        write_text(enc_report, json);
      }
    } else if (ss->parsed()) {
      const RunConfig base = ss_flags.resolve();
      const auto log_domain = doubles(ss_logdomain);
      if (log_domain.size() != 2) throw InvalidArgument("--lognormal-domain expects a,b");
      std::vector<DistributionSpec> families;
      std::stringstream names(ss_dists);
      std::string name;
      while (std::getline(names, name, ',')) {
        DistributionSpec f = base.spec;
        f.kind = distribution_from_string(name);
        if (f.kind == DistributionKind::custom) throw InvalidArgument("sweep-sigma: custom has no sigma");
        if (f.kind == DistributionKind::lognormal) {
          f.a = log_domain[0];
          f.b = log_domain[1];
        }
        families.push_back(f);
      }
      std::vector<int> ns = ss_ns.empty() ? std::vector<int>{base.n_qubits} : ints(ss_ns);
      const auto rows = sweep_sigma(families, doubles(ss_sigmas), ns, base, {ss_workers});
      std::ostringstream csv;
      write_sweep_csv(csv, rows, !ss_no_timings);
      emit(ss_out, csv.str());
      report_row_failures(rows);
    } else if (sd->parsed()) {
      const auto rows = sweep_degree(ints(sd_degrees), sd_flags.resolve(), {sd_workers});
      std::ostringstream csv;
      write_sweep_csv(csv, rows, !sd_no_timings);
      emit(sd_out, csv.str());
      report_row_failures(rows);
    } else if (sp->parsed()) {
      const RunConfig c = sp_flags.resolve();
      const std::vector<double> sigmas =
          sp_sigmas.empty() ? std::vector<double>{c.spec.sigma} : doubles(sp_sigmas);
      const auto results = spectra(c.spec, c.n_qubits, sigmas, c.target_chi);
      if (!sp_out.empty()) {
        std::ostringstream csv;
        write_spectra_csv(csv, results);
        write_text(sp_out, csv.str());
      }
      std::ostringstream summary;
      write_spectra_summary_csv(summary, results, c.n_qubits, c.target_chi);
      emit(sp_summary, summary.str());
    } else if (oc->parsed()) {
      RunConfig c = oc_flags.resolve();
      const std::vector<int> ns = oc_ns.empty() ? std::vector<int>{c.n_qubits} : ints(oc_ns);
      std::vector<OracleReport> rows;
      for (int n : ns) {
        c.n_qubits = n;
        rows.push_back(oracle_compare(c));
        if (rows.back().ratio_above_one) {
          std::cerr << "note: N=" << n << " ratio " << format_number(rows.back().ratio)
                    << " exceeds 1\n";
        }
      }
      std::ostringstream csv;
      write_oracle_csv(csv, rows);
      emit(oc_out, csv.str());
    } else if (va->parsed()) {
      const CircuitD circuit = load_circuit(va_circuit);
      const CircuitValidation v = validate_circuit(circuit);
      for (const auto& f : v.failures) std::cerr << "invalid: " << f << "\n";
      std::cout << "structure " << (v.ok ? "ok" : "FAILED") << ", max orthogonality deviation "
                << format_number(v.max_orthogonality_deviation) << "\n";
      if (!v.ok) return kNumerical;
      if (!va_report.empty()) {
        const StoredReport stored = report_from_json(read_text(va_report));
        if (stored.config.n_qubits != circuit.n_qubits) {
          throw InvalidArgument("validate: report and circuit disagree on N");
        }
        if (stored.fidelity_reference != "exact_target") {
          std::cout << "report fidelity was measured against the compressed state; not recomputed\n";
          return kOk;
        }
        const RunConfig& c = stored.config;
        const VectorXd target = target_amplitudes(resolve_domain(c.spec, c.n_qubits), c.n_qubits);
        const double f = fidelity(target, simulate(circuit));
        const double diff = std::abs(f - stored.fidelity);
        std::cout << "recomputed fidelity " << format_number(f) << ", reported "
                  << format_number(stored.fidelity) << ", difference " << format_number(diff)
                  << "\n";
        if (!(diff <= va_tol)) return kNumerical;
      }
    }
  } catch (const StageError& e) {
    std::cerr << "error in stage " << e.what() << "\n";
    return e.numerical() ? kNumerical : kUsage;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const InvalidArgument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}
