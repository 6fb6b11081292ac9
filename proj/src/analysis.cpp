#include "mpsprep/analysis.hpp"

#include <cmath>

namespace mpsprep {

namespace {

ExpFit fit_line(const std::vector<double>& ks, const std::vector<double>& logs) {
  const auto n = static_cast<Index>(ks.size());
  MatrixXd a(n, 2);
  VectorXd y(n);
  for (Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = ks[static_cast<std::size_t>(i)];
    y(i) = logs[static_cast<std::size_t>(i)];
  }
  const VectorXd c = a.colPivHouseholderQr().solve(y);
  ExpFit fit;
  fit.alpha = std::exp(c(0));
  fit.beta = -c(1);
  fit.points = static_cast<int>(n);
  const double mean = y.mean();
  const double ss_tot = (y.array() - mean).square().sum();
  const double ss_res = (a * c - y).squaredNorm();
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace

DecayFit fit_decay(const std::vector<VectorXd>& spectra, double relative_floor) {
  DecayFit out;
  std::vector<double> all_k;
  std::vector<double> all_log;
  for (std::size_t j = 0; j < spectra.size(); ++j) {
    const VectorXd& s = spectra[j];
    const double peak = s.size() > 0 ? s.cwiseAbs().maxCoeff() : 0.0;
    std::vector<double> ks;
    std::vector<double> logs;
    for (Index i = 0; i < s.size(); ++i) {
      if (s(i) > relative_floor * peak && s(i) > 0.0) {
        ks.push_back(static_cast<double>(i + 1));
        logs.push_back(std::log(s(i)));
      }
    }
    if (ks.size() < 2) {
      out.skipped_cuts.push_back(static_cast<int>(j));
      continue;
    }
    out.per_cut.push_back(fit_line(ks, logs));
    out.cut_index.push_back(static_cast<int>(j));
    all_k.insert(all_k.end(), ks.begin(), ks.end());
    all_log.insert(all_log.end(), logs.begin(), logs.end());
  }
  if (out.per_cut.empty()) {
    throw NumericalError("fit_decay: every cut has fewer than 2 singular values above the floor");
  }
  out.pooled = fit_line(all_k, all_log);
  return out;
}

double chi_bound(double beta, int chi, int n) {
  if (!(beta > 0.0)) throw InvalidArgument("chi_bound: beta must be > 0");
  if (n < 1 || chi < 0) throw InvalidArgument("chi_bound: need n >= 1 and chi >= 0");
  if (chi >= n) return 0.0;
  // e^{-2 beta chi} (1 - e^{-2 beta (n - chi)}) / (1 - e^{-2 beta n}), no overflow
  return std::exp(-2.0 * beta * chi) * -std::expm1(-2.0 * beta * (n - chi)) /
         -std::expm1(-2.0 * beta * n);
}

double chi_bound_captured_fraction(double beta, int chi, int n) {
  if (!(beta > 0.0)) throw InvalidArgument("chi_bound: beta must be > 0");
  if (n < 1 || chi < 0) throw InvalidArgument("chi_bound: need n >= 1 and chi >= 0");
  // e^{beta (n - chi)} sinh(beta chi) / sinh(beta n), written with decaying exponentials
  return -std::expm1(-2.0 * beta * chi) / -std::expm1(-2.0 * beta * n);
}

double optimality_ratio(double circuit_fidelity, double optimal_fidelity) {
  if (!(optimal_fidelity > 0.0)) {
    throw InvalidArgument("optimality_ratio: optimal fidelity must be > 0");
  }
  return circuit_fidelity / optimal_fidelity;
}

double max_derivative(const DistributionSpec& spec, int n_qubits) {
  spec.validate();
  const Grid g(n_qubits, spec.a, spec.b);
  const double step = spec.kind == DistributionKind::custom ? g.spacing() : 0.0;
  double worst = 0.0;
  for (Index k = 0; k < g.size(); ++k) {
    const double x = grid_point(g, k);
    double d;
    if (spec.kind == DistributionKind::custom) {
      // one-sided at the domain ends
      const double lo = std::max(spec.a, x - step);
      const double hi = std::min(spec.b, x + step);
      d = (pdf(spec, hi) - pdf(spec, lo)) / (hi - lo);
    } else {
      d = pdf_derivative(spec, x);
    }
    worst = std::max(worst, std::abs(d));
  }
  return worst;
}

double vne_increment_bound(double width, double max_deriv, int n_qubits) {
  return width * std::sqrt(max_deriv) / std::pow(2.0, n_qubits / 2.0 - 1.0);
}

double max_bipartite_vne(const VectorXd& state) {
  double worst = 0.0;
  for (const VectorXd& s : unfolding_spectra(state)) worst = std::max(worst, bipartite_vne(s));
  return worst;
}

}  // namespace mpsprep
