#include <doctest.h>

#include <random>

#include "mpsprep/simulator.hpp"

using namespace mpsprep;

namespace {

MpsD product_state(const std::vector<std::pair<double, double>>& sites) {
  std::vector<MpsCore<double>> cores(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) {
    cores[i].slice[0] = MatrixXd::Constant(1, 1, sites[i].first);
    cores[i].slice[1] = MatrixXd::Constant(1, 1, sites[i].second);
  }
  return MpsD(std::move(cores));
}

}  // namespace

TEST_SUITE("circuit") {

TEST_CASE("product state becomes single-qubit rotations") {
  const double r = 1 / std::sqrt(2.0);
  const MpsD m = product_state({{r, r}, {1, 0}, {1, 0}, {1, 0}});
  const CircuitD c = extract_circuit(m);
  CHECK(c.gates.size() == 4);
  CHECK(c.two_qubit_count() == 3);
  const VectorXd s = simulate(c);
  VectorXd expect = VectorXd::Zero(16);
  expect(0) = expect(8) = r;
  CHECK((s - expect).norm() < 1e-12);
}

TEST_CASE("vacuum state gives identity gates") {
  const MpsD m = product_state({{1, 0}, {1, 0}, {1, 0}});
  const CircuitD c = extract_circuit(m);
  for (const auto& g : c.gates) {
    CHECK((g.matrix - MatrixXd::Identity(g.matrix.rows(), g.matrix.cols())).norm() < 1e-14);
  }
  const VectorXd s = simulate(c);
  CHECK(s(0) == doctest::Approx(1.0));
}

TEST_CASE("extraction preconditions") {
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(extract_circuit(normalize(random_mps<double>(6, 3, rng))), InvalidArgument);
  CHECK_THROWS_AS(extract_circuit(random_mps<double>(6, 2, rng).scaled(3.0)), InvalidArgument);
}

TEST_CASE("single qubit state") {
  const MpsD m = product_state({{0.6, -0.8}});
  const CircuitD c = extract_circuit(m);
  REQUIRE(c.gates.size() == 1);
  const VectorXd s = simulate(c);
  CHECK(s(0) == doctest::Approx(0.6));
  CHECK(s(1) == doctest::Approx(-0.8));
}

TEST_CASE("random chi 2 states are prepared exactly") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 2 + trial % 9;
    const MpsD m = normalize(random_mps<double>(n, 2, rng));
    const CircuitD c = extract_circuit(m);
    const auto v = validate_circuit(c);
    CHECK(v.ok);
    CHECK(v.max_orthogonality_deviation <= 1e-10);
    CHECK(fidelity(simulate(c), to_statevector(m)) >= 1 - 1e-8);
    CHECK(std::abs(overlap(circuit_to_mps(c), m)) >= 1 - 1e-8);
  }
}

TEST_CASE("extraction is deterministic") {
  std::mt19937_64 rng(3);
  const MpsD m = normalize(random_mps<double>(7, 2, rng));
  const CircuitD a = extract_circuit(m);
  const CircuitD b = extract_circuit(m);
  for (std::size_t i = 0; i < a.gates.size(); ++i) CHECK((a.gates[i].matrix - b.gates[i].matrix).norm() == 0.0);
}

TEST_CASE("gate count is N") {
  std::mt19937_64 rng(4);
  for (Index n = 1; n <= 16; ++n) {
    const CircuitD c = extract_circuit(normalize(random_mps<double>(n, 2, rng)));
    CHECK(c.gates.size() == static_cast<std::size_t>(n));
    CHECK(c.two_qubit_count() == static_cast<std::size_t>(n - 1));
  }
}

TEST_CASE("validation reports broken circuits") {
  CircuitD bad;
  bad.n_qubits = 2;
  MatrixXd m = MatrixXd::Identity(4, 4);
  m(0, 1) = 0.5;
  bad.gates.push_back({{0, 1}, m});
  auto v = validate_circuit(bad);
  CHECK_FALSE(v.ok);
  CHECK_FALSE(v.orthogonal);

  CircuitD order;
  order.n_qubits = 3;
  order.gates.push_back({{1, 2}, MatrixXd::Identity(4, 4)});
  v = validate_circuit(order);
  CHECK_FALSE(v.staircase);

  CircuitD range;
  range.n_qubits = 1;
  range.gates.push_back({{3}, MatrixXd::Identity(2, 2)});
  CHECK_FALSE(validate_circuit(range).qubits_in_range);

  CircuitD empty;
  empty.n_qubits = 1;
  CHECK(validate_circuit(empty).ok);
  CHECK(simulate(empty)(0) == 1.0);
}

}

TEST_SUITE("simulator") {

TEST_CASE("empty circuit keeps the vacuum") {
  CircuitD c;
  c.n_qubits = 3;
  VectorXd e0 = VectorXd::Zero(8);
  e0(0) = 1;
  CHECK(simulate(c) == e0);
}

TEST_CASE("rotation on qubit 0 acts on the most significant bit") {
  const double r = 1 / std::sqrt(2.0);
  CircuitD c;
  c.n_qubits = 2;
  MatrixXd h(2, 2);
  h << r, r, r, -r;
  c.gates.push_back({{0}, h});
  const VectorXd s = simulate(c);
  CHECK(s(0) == doctest::Approx(r));
  CHECK(s(1) == 0.0);
  CHECK(s(2) == doctest::Approx(r));
  CHECK(s(3) == 0.0);
}

TEST_CASE("two-qubit gates address (first, second) as (high, low) bits") {
  // swap matrix on qubits (2, 0) of a 3-qubit register
  MatrixXd swap = MatrixXd::Zero(4, 4);
  swap(0, 0) = swap(3, 3) = 1;
  swap(1, 2) = swap(2, 1) = 1;
  CircuitD c;
  c.n_qubits = 3;
  MatrixXd x(2, 2);
  x << 0, 1, 1, 0;
  c.gates.push_back({{0}, x});       // |100>
  c.gates.push_back({{2, 0}, swap});  // -> |001>
  const VectorXd s = simulate(c);
  CHECK(s(1) == 1.0);
}

TEST_CASE("apply_gate rejects bad qubits") {
  VectorXd s = VectorXd::Zero(4);
  s(0) = 1;
  CHECK_THROWS_AS(apply_gate(s, 2, GateD{{2}, MatrixXd::Identity(2, 2)}), InvalidArgument);
  CHECK_THROWS_AS(apply_gate(s, 2, GateD{{1, 1}, MatrixXd::Identity(4, 4)}), InvalidArgument);
}

TEST_CASE("fidelity examples") {
  VectorXd e0(2), e1(2), plus(2);
  e0 << 1, 0;
  e1 << 0, 1;
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  CHECK(fidelity(e0, e0) == 1.0);
  CHECK(fidelity(e0, e1) == 0.0);
  CHECK(fidelity(e0, plus) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(fidelity(plus, e0) == fidelity(e0, plus));
  CHECK_THROWS_AS(fidelity(e0, VectorXd(VectorXd::Zero(4))), InvalidArgument);
}

TEST_CASE("simulation preserves the norm") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const CircuitD c = extract_circuit(normalize(random_mps<double>(8, 2, rng)));
    CHECK(simulate(c).norm() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("error decomposition of identical states is zero") {
  VectorXd v = VectorXd::Ones(8).normalized();
  const auto e = error_decomposition(v, v, v, v);
  CHECK(e.total == doctest::Approx(0.0));
}

}
