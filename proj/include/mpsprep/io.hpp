#pragma once

// Circuit and report JSON, key=value config files.

#include <filesystem>
#include <map>
#include <string>

#include "mpsprep/pipeline.hpp"

namespace mpsprep {

inline constexpr const char* kCircuitFormatVersion = "1";

/// Circuit JSON text. Matrix entries are written with round-trip precision.
std::string circuit_to_json(const CircuitD& c);
/// Throws SchemaError naming the offending field on malformed input.
CircuitD circuit_from_json(const std::string& text);

void save_circuit(const CircuitD& c, const std::filesystem::path& path);
CircuitD load_circuit(const std::filesystem::path& path);

std::string report_to_json(const RunReport& report);

/// Config echo and fidelity read back from a report document.
struct StoredReport {
  RunConfig config;
  double fidelity = 0.0;
  std::string fidelity_reference;
};
StoredReport report_from_json(const std::string& text);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// `key = value` lines; blank lines and `#` comments ignored.
std::map<std::string, std::string> parse_config_text(const std::string& text);

/// Applies recognised keys (dist, mu, sigma, domain, poly, n, k, p, samples,
/// chi, sweeps, tol, init, seed) on top of `base`. Unknown keys throw.
RunConfig apply_config(const std::map<std::string, std::string>& kv, RunConfig base);

}  // namespace mpsprep
