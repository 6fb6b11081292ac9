#include "mpsprep/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mpsprep {

using nlohmann::json;

namespace {

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "/" + key, "missing required field '" + key + "'");
  return *it;
}

int require_int(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number_integer()) throw SchemaError(path + "/" + key, "expected an integer");
  return v.get<int>();
}

double require_number(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number()) throw SchemaError(path + "/" + key, "expected a number");
  return v.get<double>();
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
}

double round12(double v) { return std::stod(format_number(v)); }

}  // namespace

std::string circuit_to_json(const CircuitD& c) {
  json gates = json::array();
  for (const auto& g : c.gates) {
    json rows = json::array();
    for (Index r = 0; r < g.matrix.rows(); ++r) {
      json row = json::array();
      for (Index col = 0; col < g.matrix.cols(); ++col) row.push_back(g.matrix(r, col));
      rows.push_back(std::move(row));
    }
    gates.push_back({{"qubits", g.qubits}, {"matrix", std::move(rows)}});
  }
  json doc = {{"n_qubits", c.n_qubits},
              {"format_version", kCircuitFormatVersion},
              {"gates", std::move(gates)}};
  return doc.dump(1) + "\n";
}

CircuitD circuit_from_json(const std::string& text) {
  const json doc = parse(text);
  const json& version = require(doc, "format_version", "");
  if (!version.is_string()) throw SchemaError("/format_version", "expected a string");
  if (version.get<std::string>() != kCircuitFormatVersion) {
    throw SchemaError("/format_version", "unsupported circuit format version '" +
                                             version.get<std::string>() + "' (supported: 1)");
  }
  CircuitD c;
  c.n_qubits = require_int(doc, "n_qubits", "");
  if (c.n_qubits < 1) throw SchemaError("/n_qubits", "must be >= 1");
  const json& gates = require(doc, "gates", "");
  if (!gates.is_array()) throw SchemaError("/gates", "expected an array");
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const std::string base = "/gates/" + std::to_string(i);
    const json& qs = require(gates[i], "qubits", base);
    if (!qs.is_array() || qs.empty() || qs.size() > 2) {
      throw SchemaError(base + "/qubits", "expected an array of one or two integers");
    }
    GateD g;
    for (std::size_t q = 0; q < qs.size(); ++q) {
      if (!qs[q].is_number_integer()) {
        throw SchemaError(base + "/qubits/" + std::to_string(q), "expected an integer");
      }
      g.qubits.push_back(qs[q].get<int>());
    }
    const Index dim = qs.size() == 2 ? 4 : 2;
    const json& m = require(gates[i], "matrix", base);
    if (!m.is_array() || static_cast<Index>(m.size()) != dim) {
      throw SchemaError(base + "/matrix", "expected " + std::to_string(dim) + " rows");
    }
    g.matrix.resize(dim, dim);
    for (Index r = 0; r < dim; ++r) {
      const json& row = m[static_cast<std::size_t>(r)];
      const std::string rpath = base + "/matrix/" + std::to_string(r);
      if (!row.is_array() || static_cast<Index>(row.size()) != dim) {
        throw SchemaError(rpath, "expected " + std::to_string(dim) + " entries");
      }
      for (Index col = 0; col < dim; ++col) {
        const json& v = row[static_cast<std::size_t>(col)];
        if (!v.is_number()) throw SchemaError(rpath + "/" + std::to_string(col), "expected a number");
        g.matrix(r, col) = v.get<double>();
      }
    }
    c.gates.push_back(std::move(g));
  }
  return c;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void save_circuit(const CircuitD& c, const std::filesystem::path& path) {
  write_text(path, circuit_to_json(c));
}

CircuitD load_circuit(const std::filesystem::path& path) { return circuit_from_json(read_text(path)); }

namespace {

json config_to_json(const RunConfig& c) {
  json spec = {{"kind", to_string(c.spec.kind)},
               {"mu", c.spec.mu},
               {"sigma", c.spec.sigma},
               {"domain", {c.spec.a, c.spec.b}}};
  if (!c.spec.squared_poly.empty()) spec["poly"] = c.spec.squared_poly;
  return {{"spec", spec},
          {"n_qubits", c.n_qubits},
          {"support_bit", c.support_bit},
          {"degree", c.degree},
          {"samples_per_region", c.samples_per_region},
          {"target_chi", c.target_chi},
          {"max_sweeps", c.compression.max_sweeps},
          {"convergence_tol", c.compression.convergence_tol},
          {"als_init", c.compression.init == AlsInit::random ? "random" : "tt_round"},
          {"seed", c.seed}};
}

RunConfig config_from_json(const json& j, const std::string& path) {
  RunConfig c;
  const json& spec = require(j, "spec", path);
  const std::string sp = path + "/spec";
  const json& kind = require(spec, "kind", sp);
  if (!kind.is_string()) throw SchemaError(sp + "/kind", "expected a string");
  const json& dom = require(spec, "domain", sp);
  if (!dom.is_array() || dom.size() != 2 || !dom[0].is_number() || !dom[1].is_number()) {
    throw SchemaError(sp + "/domain", "expected [a, b]");
  }
  const double a = dom[0].get<double>();
  const double b = dom[1].get<double>();
  const DistributionKind k = distribution_from_string(kind.get<std::string>());
  if (k == DistributionKind::custom) {
    const json& poly = require(spec, "poly", sp);
    if (!poly.is_array()) throw SchemaError(sp + "/poly", "expected an array of numbers");
    c.spec = DistributionSpec::squared_polynomial(poly.get<std::vector<double>>(), a, b);
  } else {
    c.spec.kind = k;
    c.spec.mu = require_number(spec, "mu", sp);
    c.spec.sigma = require_number(spec, "sigma", sp);
    c.spec.a = a;
    c.spec.b = b;
  }
  c.n_qubits = require_int(j, "n_qubits", path);
  c.support_bit = require_int(j, "support_bit", path);
  c.degree = require_int(j, "degree", path);
  c.samples_per_region = require_int(j, "samples_per_region", path);
  c.target_chi = require_int(j, "target_chi", path);
  c.compression.max_sweeps = require_int(j, "max_sweeps", path);
  c.compression.convergence_tol = require_number(j, "convergence_tol", path);
  const json& init = require(j, "als_init", path);
  c.compression.init = init == "random" ? AlsInit::random : AlsInit::tt_round;
  c.seed = require(j, "seed", path).get<std::uint64_t>();
  return c;
}

}  // namespace

std::string report_to_json(const RunReport& r) {
  json doc;
  doc["config"] = config_to_json(r.config);
  doc["fidelity"] = round12(r.fidelity);
  doc["fidelity_reference"] = r.fidelity_reference;
  if (r.errors) {
    const auto& e = *r.errors;
    doc["errors"] = {{"pp_error", round12(e.pp_error)},
                     {"mps_error", round12(e.mps_error)},
                     {"gate_error", round12(e.gate_error)},
                     {"total", round12(e.total)},
                     {"pp_share", round12(e.pp_share())},
                     {"mps_share", round12(e.mps_share())},
                     {"gate_share", round12(e.gate_share())},
                     {"convention", ErrorDecomposition::convention}};
  }
  doc["bond_profile"] = {{"assembled", r.assembled_bonds}, {"compressed", r.compressed_bonds}};
  doc["gate_count"] = r.gate_count;
  doc["two_qubit_gates"] = r.two_qubit_gates;
  doc["max_gate_orthogonality_deviation"] = round12(r.max_gate_deviation);
  json history = json::array();
  for (double f : r.compression.history) history.push_back(round12(f));
  doc["compression"] = {{"initial_fidelity", round12(r.compression.initial_fidelity)},
                        {"sweeps", r.compression.sweeps},
                        {"converged", r.compression.converged},
                        {"history", history}};
  doc["timings_ms"] = {{"fit", round12(r.timings.fit_ms)},
                       {"assemble", round12(r.timings.assemble_ms)},
                       {"compress", round12(r.timings.compress_ms)},
                       {"extract", round12(r.timings.extract_ms)},
                       {"simulate", round12(r.timings.simulate_ms)}};
  return doc.dump(2) + "\n";
}

StoredReport report_from_json(const std::string& text) {
  const json doc = parse(text);
  StoredReport out;
  out.config = config_from_json(require(doc, "config", ""), "/config");
  out.fidelity = require_number(doc, "fidelity", "");
  const json& ref = require(doc, "fidelity_reference", "");
  if (!ref.is_string()) throw SchemaError("/fidelity_reference", "expected a string");
  out.fidelity_reference = ref.get<std::string>();
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const std::string t = trim(item);
      out.push_back(std::stod(t, &used));
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw InvalidArgument("config: '" + key + "' has a non-numeric entry '" + item + "'");
    }
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  const auto v = parse_list(key, value);
  if (v.size() != 1) throw InvalidArgument("config: '" + key + "' expects one number");
  return v[0];
}

int parse_int(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  if (v != std::floor(v)) throw InvalidArgument("config: '" + key + "' expects an integer");
  return static_cast<int>(v);
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw InvalidArgument("config line " + std::to_string(lineno) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

RunConfig apply_config(const std::map<std::string, std::string>& kv, RunConfig c) {
  std::vector<double> poly = c.spec.squared_poly;
  std::optional<DistributionKind> kind;
  for (const auto& [key, value] : kv) {
    if (key == "dist") {
      kind = distribution_from_string(value);
    } else if (key == "mu") {
      c.spec.mu = parse_double(key, value);
    } else if (key == "sigma") {
      c.spec.sigma = parse_double(key, value);
    } else if (key == "domain") {
      const auto d = parse_list(key, value);
      if (d.size() != 2) throw InvalidArgument("config: 'domain' expects a,b");
      c.spec.a = d[0];
      c.spec.b = d[1];
    } else if (key == "poly") {
      poly = parse_list(key, value);
    } else if (key == "n") {
      c.n_qubits = parse_int(key, value);
    } else if (key == "k") {
      c.support_bit = parse_int(key, value);
    } else if (key == "p") {
      c.degree = parse_int(key, value);
    } else if (key == "samples") {
      c.samples_per_region = parse_int(key, value);
    } else if (key == "chi") {
      c.target_chi = parse_int(key, value);
    } else if (key == "sweeps") {
      c.compression.max_sweeps = parse_int(key, value);
    } else if (key == "tol") {
      c.compression.convergence_tol = parse_double(key, value);
    } else if (key == "init") {
      if (value == "random") {
        c.compression.init = AlsInit::random;
      } else if (value == "tt_round") {
        c.compression.init = AlsInit::tt_round;
      } else {
        throw InvalidArgument("config: 'init' must be tt_round or random");
      }
    } else if (key == "seed") {
      c.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else {
      throw InvalidArgument("config: unknown key '" + key + "'");
    }
  }
  if (kind) c.spec.kind = *kind;
  if (c.spec.kind == DistributionKind::custom) {
    if (poly.empty()) throw InvalidArgument("config: custom distribution needs 'poly'");
    c.spec = DistributionSpec::squared_polynomial(poly, c.spec.a, c.spec.b);
  } else {
    c.spec.custom_pdf = nullptr;
    c.spec.squared_poly.clear();
  }
  return c;
}

}  // namespace mpsprep
