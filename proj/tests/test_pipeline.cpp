#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "mpsprep/io.hpp"

using namespace mpsprep;

namespace {

RunConfig gaussian_config(double sigma, int n) {
  RunConfig c;
  c.spec = DistributionSpec::gaussian(1.0, sigma, 0.0, 2.0);
  c.n_qubits = n;
  return c;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("encode a wide gaussian") {
  const EncodeResult r = encode(gaussian_config(1.0, 10));
  CHECK(r.report.fidelity >= 0.999);
  CHECK(r.report.fidelity_reference == "exact_target");
  CHECK(r.report.gate_count == 10);
  CHECK(r.report.two_qubit_gates == 9);
  CHECK(r.report.assembled_bonds.size() == 11);
  CHECK(*std::max_element(r.report.compressed_bonds.begin(), r.report.compressed_bonds.end()) <= 2);
  CHECK(r.report.timings.fit_ms >= 0.0);
  REQUIRE(r.report.errors);
  CHECK(r.report.errors->total == doctest::Approx(1 - r.report.fidelity));
}

TEST_CASE("encode a narrow gaussian") {
  CHECK(encode(gaussian_config(0.1, 10)).report.fidelity >= 0.99);
}

TEST_CASE("squared linear pdf is encoded losslessly") {
  RunConfig c;
  c.spec = DistributionSpec::squared_polynomial({0.5, 1.0}, 0.0, 2.0);
  c.n_qubits = 8;
  c.support_bit = 0;
  const EncodeResult r = encode(c);
  CHECK(r.report.fidelity >= 1 - 1e-8);
  const auto& e = *r.report.errors;
  CHECK(e.pp_error <= 1e-8);
  CHECK(e.mps_error <= 1e-8);
  CHECK(e.gate_error <= 1e-8);
}

TEST_CASE("composition of stage fidelities") {
  for (double sigma : {0.1, 0.3, 1.0}) {
    const auto e = error_decomposition(gaussian_config(sigma, 7));
    const double product = (1 - e.pp_error) * (1 - e.mps_error) * (1 - e.gate_error);
    CHECK(1 - e.total >= product - 1e-6);
  }
}

TEST_CASE("stage errors carry the stage name") {
  RunConfig c = gaussian_config(1.0, 6);
  c.target_chi = 3;
  try {
    encode(c);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "extract");
    CHECK_FALSE(e.numerical());
  }
  c = gaussian_config(1.0, 6);
  c.support_bit = 6;
  CHECK_THROWS_AS(encode(c), StageError);
}

TEST_CASE("lognormal starting at zero uses the resolved domain") {
  RunConfig c;
  c.spec = DistributionSpec::lognormal(1.0, 0.5, 0.0, 5.0);
  c.n_qubits = 6;
  const EncodeResult r = encode(c);
  CHECK(r.report.config.spec.a == doctest::Approx(5.0 / 64));
  CHECK(r.report.fidelity > 0.99);
}

TEST_CASE("above the dense limit fidelity is against the compressed state") {
  setenv("MPSPREP_DENSE_LIMIT", "8", 1);
  const EncodeResult r = encode(gaussian_config(1.0, 12));
  unsetenv("MPSPREP_DENSE_LIMIT");
  CHECK(r.report.fidelity_reference == "compressed_mps");
  CHECK_FALSE(r.report.errors);
  CHECK(r.report.fidelity >= 1 - 1e-8);
}

TEST_CASE("sweep csv layout") {
  RunConfig base = gaussian_config(1.0, 5);
  std::ostringstream empty;
  write_sweep_csv(empty, sweep_sigma({base.spec}, {}, {5}, base));
  CHECK(empty.str() ==
        "distribution,mu,sigma,N,k,p,chi,fidelity,pp_err,mps_err,gate_err,gate_count,t_fit_ms,"
        "t_compress_ms,t_extract_ms\n");

  const auto rows = sweep_sigma({base.spec, DistributionSpec::lorentzian(1, 1, 0, 2)}, {0.5, 1.0},
                                {5, 6}, base);
  REQUIRE(rows.size() == 8);
  CHECK(rows[0].distribution == "gaussian");
  CHECK(rows[0].sigma == 0.5);
  CHECK(rows[1].n_qubits == 6);
  CHECK(rows[4].distribution == "lorentzian");
  std::ostringstream csv;
  write_sweep_csv(csv, rows, false);
  const auto text = lines(csv.str());
  CHECK(text.size() == 9);
  CHECK(text[1].rfind("gaussian,1,0.5,5,3,3,2,", 0) == 0);
  CHECK(text[1].substr(text[1].size() - 3) == ",,,");
}

TEST_CASE("sweeps are deterministic and worker-count independent") {
  RunConfig base = gaussian_config(1.0, 6);
  const std::vector<DistributionSpec> fam = {base.spec, DistributionSpec::lorentzian(1, 1, 0, 2)};
  std::ostringstream a, b;
  write_sweep_csv(a, sweep_sigma(fam, {0.3, 0.7}, {5, 6}, base, {1}), false);
  write_sweep_csv(b, sweep_sigma(fam, {0.3, 0.7}, {5, 6}, base, {3}), false);
  CHECK(a.str() == b.str());
}

TEST_CASE("sweep rows record failures and continue") {
  RunConfig base = gaussian_config(1.0, 5);
  const auto rows = sweep_sigma({base.spec}, {-1.0, 1.0}, {5}, base);
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].ok());
  CHECK(rows[1].ok());
  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  CHECK(lines(csv.str())[1].find("nan") != std::string::npos);
}

TEST_CASE("degree sweep") {
  RunConfig base = gaussian_config(0.3, 7);
  const auto rows = sweep_degree({1, 2, 3}, base);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].degree == static_cast<int>(i) + 1);
  CHECK_THROWS_AS(sweep_degree({0}, base), InvalidArgument);
}

TEST_CASE("spectra summary") {
  const auto res = spectra(DistributionSpec::gaussian(1, 1, 0, 2), 10, {1.0, 0.2});
  REQUIRE(res.size() == 2);
  CHECK(res[0].spectra.size() == 9);
  CHECK(res[0].fit.pooled.beta > res[1].fit.pooled.beta);
  CHECK(res[0].max_derivative < res[1].max_derivative);
  std::ostringstream summary;
  write_spectra_summary_csv(summary, res, 10, 2);
  CHECK(lines(summary.str()).size() == 3);
}

TEST_CASE("oracle comparison") {
  const OracleReport r = oracle_compare(gaussian_config(1.0, 10));
  CHECK(r.ratio >= 0.99);
  CHECK(r.ratio <= 1 + 1e-9);

  RunConfig exact;
  exact.spec = DistributionSpec::squared_polynomial({1.0, 2.0}, 0, 1);
  exact.n_qubits = 7;
  exact.support_bit = 0;
  exact.degree = 1;
  CHECK(oracle_compare(exact).ratio == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("number formatting uses 12 significant digits") {
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(2.0) == "2");
  CHECK(format_number(std::nan("")) == "nan");
}

}

TEST_SUITE("io") {

TEST_CASE("circuit json round trip is exact") {
  const EncodeResult r = encode(gaussian_config(0.4, 7));
  const std::string text = circuit_to_json(r.circuit);
  const CircuitD back = circuit_from_json(text);
  REQUIRE(back.gates.size() == r.circuit.gates.size());
  CHECK(back.n_qubits == 7);
  for (std::size_t i = 0; i < back.gates.size(); ++i) {
    CHECK(back.gates[i].qubits == r.circuit.gates[i].qubits);
    CHECK((back.gates[i].matrix.array() == r.circuit.gates[i].matrix.array()).all());
  }
  CHECK(circuit_to_json(back) == text);
}

TEST_CASE("identical configs give identical circuit json") {
  CHECK(circuit_to_json(encode(gaussian_config(0.5, 8)).circuit) ==
        circuit_to_json(encode(gaussian_config(0.5, 8)).circuit));
}

TEST_CASE("schema errors name the field") {
  try {
    circuit_from_json(R"({"n_qubits": 2, "format_version": "1"})");
    FAIL("expected a schema error");
  } catch (const SchemaError& e) {
    CHECK(e.path() == "/gates");
    CHECK(std::string(e.what()).find("gates") != std::string::npos);
  }
  try {
    circuit_from_json(R"({"n_qubits": 2, "format_version": "2", "gates": []})");
    FAIL("expected a schema error");
  } catch (const SchemaError& e) {
    CHECK(e.path() == "/format_version");
    CHECK(std::string(e.what()).find("unsupported") != std::string::npos);
  }
  try {
    circuit_from_json(R"({"n_qubits": 2, "format_version": "1",
                          "gates": [{"qubits": [0, 1], "matrix": [[1, 0], [0, 1]]}]})");
    FAIL("expected a schema error");
  } catch (const SchemaError& e) {
    CHECK(e.path() == "/gates/0/matrix");
  }
  CHECK_THROWS_AS(circuit_from_json("{not json"), SchemaError);
}

TEST_CASE("report json round trips the config") {
  RunConfig c = gaussian_config(0.7, 6);
  c.compression.init = AlsInit::random;
  c.seed = 42;
  const EncodeResult r = encode(c);
  const StoredReport back = report_from_json(report_to_json(r.report));
  CHECK(back.config.n_qubits == 6);
  CHECK(back.config.spec.sigma == 0.7);
  CHECK(back.config.seed == 42);
  CHECK(back.config.compression.init == AlsInit::random);
  CHECK(back.fidelity == doctest::Approx(r.report.fidelity).epsilon(1e-11));

  RunConfig custom;
  custom.spec = DistributionSpec::squared_polynomial({0.5, 1.5}, 0, 2);
  custom.n_qubits = 5;
  const StoredReport cb = report_from_json(report_to_json(encode(custom).report));
  CHECK(cb.config.spec.kind == DistributionKind::custom);
  CHECK(cb.config.spec.squared_poly == std::vector<double>{0.5, 1.5});
  CHECK(pdf(cb.config.spec, 1.0) == doctest::Approx(4.0));
}

TEST_CASE("config text parsing and precedence") {
  const auto kv = parse_config_text("# campaign\n dist = lorentzian\nsigma=0.25 # narrow\n\nn = 9\n"
                                    "domain = -1, 3\n");
  RunConfig c = apply_config(kv, RunConfig{});
  CHECK(c.spec.kind == DistributionKind::lorentzian);
  CHECK(c.spec.sigma == 0.25);
  CHECK(c.n_qubits == 9);
  CHECK(c.spec.a == -1.0);
  CHECK(c.spec.b == 3.0);
  auto over = kv;
  over["n"] = "11";
  CHECK(apply_config(over, RunConfig{}).n_qubits == 11);

  CHECK_THROWS_AS(parse_config_text("novalue\n"), InvalidArgument);
  CHECK_THROWS_AS(apply_config({{"colour", "red"}}, RunConfig{}), InvalidArgument);
  CHECK_THROWS_AS(apply_config({{"n", "ten"}}, RunConfig{}), InvalidArgument);
  CHECK_THROWS_AS(apply_config({{"dist", "custom"}}, RunConfig{}), InvalidArgument);
  const RunConfig poly = apply_config({{"dist", "custom"}, {"poly", "1,2"}}, RunConfig{});
  CHECK(pdf(poly.spec, 1.0) == doctest::Approx(9.0));
}

TEST_CASE("file io errors") {
  CHECK_THROWS_AS(load_circuit("/nonexistent/dir/c.json"), IoError);
  CHECK_THROWS_AS(write_text("/nonexistent/dir/c.json", "x"), IoError);
}

}

TEST_SUITE("pipeline") {

TEST_CASE("compressed gaussian circuit matches its MPS") {
  const RunConfig c = gaussian_config(1.0, 10);
  const Grid g(10, 0.0, 2.0);
  const MpsD assembled = normalize(assemble(fit_piecewise(c.spec, g, 3, 3, 64), g));
  const MpsD compressed = compress_als(assembled, c.effective_compression());
  CHECK(fidelity(simulate(extract_circuit(compressed)), to_statevector(compressed)) >= 1 - 1e-8);
}

TEST_CASE("compression dominates the narrow gaussian error") {
  const auto e = error_decomposition(gaussian_config(0.1, 7));
  CHECK(e.mps_share() > e.pp_share());
  CHECK(e.mps_share() > e.gate_share());
}

TEST_CASE("gaussian fidelity rises with sigma apart from a shallow dip") {
  const std::vector<double> sigmas = {0.12, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.5, 0.6, 0.8, 1.0};
  RunConfig base = gaussian_config(1.0, 10);
  const auto rows = sweep_sigma({base.spec}, sigmas, {10}, base);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double drop = rows[i - 1].fidelity - rows[i].fidelity;
    if (drop <= 0.0) continue;
    INFO("sigma " << rows[i - 1].sigma << " -> " << rows[i].sigma << " drops by " << drop);
    CHECK(rows[i - 1].sigma >= 0.15);
    CHECK(rows[i].sigma <= 0.35);
    CHECK(drop < 1e-3);
  }
  CHECK(rows.back().fidelity > rows.front().fidelity);
}

TEST_CASE("decay rate grows with system size") {
  double previous = 0.0;
  for (int n = 8; n <= 14; ++n) {
    const auto r = spectra(DistributionSpec::gaussian(1, 0.4, 0, 2), n, {0.4});
    CHECK(r[0].fit.pooled.beta >= previous);
    previous = r[0].fit.pooled.beta;
  }
}

}
