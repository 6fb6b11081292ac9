#include "mpsprep/function_approx.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace mpsprep {

std::string to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::gaussian: return "gaussian";
    case DistributionKind::lognormal: return "lognormal";
    case DistributionKind::lorentzian: return "lorentzian";
    case DistributionKind::custom: return "custom";
  }
  return "unknown";
}

DistributionKind distribution_from_string(const std::string& name) {
  if (name == "gaussian") return DistributionKind::gaussian;
  if (name == "lognormal") return DistributionKind::lognormal;
  if (name == "lorentzian") return DistributionKind::lorentzian;
  if (name == "custom" || name == "poly2") return DistributionKind::custom;
  throw InvalidArgument("unknown distribution '" + name + "'");
}

DistributionSpec DistributionSpec::gaussian(double mu, double sigma, double a, double b) {
  DistributionSpec s;
  s.kind = DistributionKind::gaussian;
  s.mu = mu;
  s.sigma = sigma;
  s.a = a;
  s.b = b;
  return s;
}

DistributionSpec DistributionSpec::lognormal(double mu, double sigma, double a, double b) {
  DistributionSpec s = gaussian(mu, sigma, a, b);
  s.kind = DistributionKind::lognormal;
  return s;
}

DistributionSpec DistributionSpec::lorentzian(double mu, double sigma, double a, double b) {
  DistributionSpec s = gaussian(mu, sigma, a, b);
  s.kind = DistributionKind::lorentzian;
  return s;
}

DistributionSpec DistributionSpec::custom(std::function<double(double)> pdf, double a, double b) {
  DistributionSpec s;
  s.kind = DistributionKind::custom;
  s.custom_pdf = std::move(pdf);
  s.a = a;
  s.b = b;
  return s;
}

DistributionSpec DistributionSpec::squared_polynomial(std::vector<double> coeffs, double a,
                                                      double b) {
  if (coeffs.empty()) throw InvalidArgument("squared_polynomial: empty coefficient list");
  auto poly = [coeffs](double x) {
    double value = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) value = value * x + *it;
    return value * value;
  };
  DistributionSpec s = custom(poly, a, b);
  s.squared_poly = std::move(coeffs);
  return s;
}

void DistributionSpec::validate() const {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidArgument("distribution: domain must satisfy a < b");
  }
  if (kind == DistributionKind::custom) {
    if (!custom_pdf) throw InvalidArgument("distribution: custom kind needs a pdf");
    return;
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("distribution: sigma must be > 0");
  if (!std::isfinite(mu)) throw InvalidArgument("distribution: mu must be finite");
  if (kind == DistributionKind::lognormal && !(a > 0.0)) {
    throw InvalidArgument("distribution: lognormal domain must start above 0");
  }
}

DistributionSpec resolve_domain(const DistributionSpec& spec, int n_qubits) {
  DistributionSpec out = spec;
  if (spec.kind == DistributionKind::lognormal && spec.a <= 0.0 && spec.b > 0.0) {
    out.a = (spec.b - spec.a) / std::ldexp(1.0, n_qubits);
  }
  return out;
}

namespace {

double gaussian_density(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi) * sigma);
}

}  // namespace

double pdf(const DistributionSpec& spec, double x) {
  switch (spec.kind) {
    case DistributionKind::gaussian:
      return gaussian_density(x, spec.mu, spec.sigma);
    case DistributionKind::lognormal:
      if (!(x > 0.0)) throw InvalidArgument("pdf: lognormal evaluated at x <= 0");
      return gaussian_density(std::log(x), spec.mu, spec.sigma) / x;
    case DistributionKind::lorentzian: {
      const double d = x - spec.mu;
      return spec.sigma / (2.0 * std::numbers::pi) / (d * d + spec.sigma * spec.sigma);
    }
    case DistributionKind::custom:
      if (!spec.custom_pdf) throw InvalidArgument("pdf: custom distribution without a pdf");
      return spec.custom_pdf(x);
  }
  return 0.0;
}

double pdf_derivative(const DistributionSpec& spec, double x, double h) {
  switch (spec.kind) {
    case DistributionKind::gaussian:
      return -(x - spec.mu) / (spec.sigma * spec.sigma) * pdf(spec, x);
    case DistributionKind::lognormal: {
      if (!(x > 0.0)) throw InvalidArgument("pdf_derivative: lognormal evaluated at x <= 0");
      const double lx = std::log(x);
      const double g = gaussian_density(lx, spec.mu, spec.sigma);
      return g / (x * x) * (-1.0 - (lx - spec.mu) / (spec.sigma * spec.sigma));
    }
    case DistributionKind::lorentzian: {
      const double d = x - spec.mu;
      const double q = d * d + spec.sigma * spec.sigma;
      return -spec.sigma / std::numbers::pi * d / (q * q);
    }
    case DistributionKind::custom:
      return (pdf(spec, x + h) - pdf(spec, x - h)) / (2.0 * h);
  }
  return 0.0;
}

Grid::Grid(int n, double lo, double hi) : n_qubits(n), a(lo), b(hi) {
  if (n < 1 || n > 62) throw InvalidArgument("Grid: qubit count must be in [1, 62]");
  if (!(lo < hi)) throw InvalidArgument("Grid: domain must satisfy a < b");
}

double grid_point(const Grid& g, Index k) {
  if (k < 0 || k >= g.size()) {
    throw InvalidArgument("grid_point: index " + std::to_string(k) + " out of range");
  }
  return g.a + static_cast<double>(k) * (g.b - g.a) / g.intervals();
}

VectorXd target_amplitudes(const DistributionSpec& spec, int n_qubits) {
  spec.validate();
  require_dense_size(n_qubits, "target_amplitudes");
  const Grid g(n_qubits, spec.a, spec.b);
  VectorXd v(g.size());
  for (Index k = 0; k < g.size(); ++k) {
    const double p = pdf(spec, grid_point(g, k));
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw InvalidArgument("target_amplitudes: pdf is negative or non-finite on the grid");
    }
    v(k) = std::sqrt(p);
  }
  const double nrm = v.norm();
  if (!(nrm > 0.0)) throw InvalidArgument("target_amplitudes: pdf vanishes on the whole grid");
  return v / nrm;
}

std::vector<Region> subdivide(const Grid& g, int support_bit) {
  if (support_bit < 0 || support_bit >= g.n_qubits) {
    throw InvalidArgument("subdivide: support bit " + std::to_string(support_bit) +
                          " must be in [0, N)");
  }
  const Index count = Index(1) << support_bit;
  const Index width = g.size() / count;
  std::vector<Region> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Index j = 0; j < count; ++j) {
    Region r;
    r.first = j * width;
    r.last = (j + 1) * width;
    r.x_begin = grid_point(g, r.first);
    r.x_end = grid_point(g, r.last - 1);
    out.push_back(r);
  }
  return out;
}

double PiecewisePoly::evaluate_in_region(std::size_t j, double x) const {
  const VectorXd& c = coeffs.at(j);
  const double u = x - origins.at(j);
  double value = 0.0;
  for (Index i = c.size() - 1; i >= 0; --i) value = value * u + c(i);
  return value;
}

double PiecewisePoly::evaluate_at(const Grid& g, Index k) const {
  const Index j = k >> (g.n_qubits - support_bit);
  return evaluate_in_region(static_cast<std::size_t>(j), grid_point(g, k));
}

PiecewisePoly fit_piecewise(const DistributionSpec& spec, const Grid& g, int support_bit,
                            int degree, int samples_per_region) {
  spec.validate();
  if (degree < 0) throw InvalidArgument("fit_piecewise: degree must be >= 0");
  if (samples_per_region < degree + 1) {
    throw InvalidArgument("fit_piecewise: need at least degree + 1 samples per region");
  }
  PiecewisePoly pp;
  pp.support_bit = support_bit;
  pp.degree = degree;
  for (const Region& r : subdivide(g, support_bit)) {
    const double origin = r.x_begin;
    std::vector<double> us(static_cast<std::size_t>(samples_per_region));
    std::vector<double> ys(us.size());
    const double span = r.x_end - r.x_begin;
    for (int i = 0; i < samples_per_region; ++i) {
      const double t = samples_per_region == 1 ? 0.0 : static_cast<double>(i) / (samples_per_region - 1);
      const double x = i + 1 == samples_per_region ? r.x_end : r.x_begin + t * span;
      const double p = pdf(spec, x);
      if (!(p >= 0.0)) throw InvalidArgument("fit_piecewise: pdf is negative inside the domain");
      us[static_cast<std::size_t>(i)] = x - origin;
      ys[static_cast<std::size_t>(i)] = std::sqrt(p);
    }
    pp.coeffs.push_back(polyfit_least_squares<double>(us, ys, degree));
    pp.origins.push_back(origin);
  }
  return pp;
}

MpsD poly_mps(const VectorXd& coeffs, const Grid& g) {
  if (coeffs.size() == 0) throw InvalidArgument("poly_mps: empty coefficient vector");
  const Index p = coeffs.size() - 1;
  const int n = g.n_qubits;
  const double step = g.spacing();

  // binom(r, s) for r, s <= p
  MatrixXd binom = MatrixXd::Zero(p + 1, p + 1);
  for (Index r = 0; r <= p; ++r) {
    binom(r, 0) = 1.0;
    for (Index s = 1; s <= r; ++s) binom(r, s) = binom(r - 1, s - 1) + (s <= r - 1 ? binom(r - 1, s) : 0.0);
  }
  // site contribution t_i(bit) to x = sum_i t_i
  auto contribution = [&](int site, int bit) {
    const double offset = site == 0 ? g.a : 0.0;
    return offset + bit * std::ldexp(1.0, n - 1 - site) * step;
  };
  auto powers = [&](double t) {
    VectorXd out(p + 1);
    out(0) = 1.0;
    for (Index j = 1; j <= p; ++j) out(j) = out(j - 1) * t;
    return out;
  };

  std::vector<MpsCore<double>> cores(static_cast<std::size_t>(n));
  if (n == 1) {
    for (int s = 0; s < 2; ++s) {
      cores[0].slice[s].resize(1, 1);
      cores[0].slice[s](0, 0) = coeffs.dot(powers(contribution(0, s)));
    }
    return MpsD(std::move(cores));
  }
  for (int i = 0; i < n; ++i) {
    for (int s = 0; s < 2; ++s) {
      const double t = contribution(i, s);
      const VectorXd tp = powers(t);
      MatrixXd& slice = cores[static_cast<std::size_t>(i)].slice[s];
      if (i == 0) {
        // phi_r(t) = sum_{k >= r} c_k binom(k, r) t^(k - r): coefficient of y^r in f(t + y)
        slice.resize(1, p + 1);
        for (Index r = 0; r <= p; ++r) {
          double acc = 0.0;
          for (Index k = r; k <= p; ++k) acc += coeffs(k) * binom(k, r) * tp(k - r);
          slice(0, r) = acc;
        }
      } else if (i == n - 1) {
        slice = tp;  // y^r evaluated at the last contribution
      } else {
        // y^r = sum_{s <= r} binom(r, s) t^(r - s) y'^s
        slice = MatrixXd::Zero(p + 1, p + 1);
        for (Index r = 0; r <= p; ++r)
          for (Index c = 0; c <= r; ++c) slice(r, c) = binom(r, c) * tp(r - c);
      }
    }
  }
  return MpsD(std::move(cores));
}

MpsD mask_region(const MpsD& m, Index region, int support_bit) {
  if (support_bit < 0 || support_bit > m.n_sites()) {
    throw InvalidArgument("mask_region: support bit out of range");
  }
  if (region < 0 || region >= (Index(1) << support_bit)) {
    throw InvalidArgument("mask_region: region " + std::to_string(region) + " out of range");
  }
  auto cores = m.cores();
  for (int i = 0; i < support_bit; ++i) {
    const int bit = static_cast<int>((region >> (support_bit - 1 - i)) & 1);
    cores[static_cast<std::size_t>(i)].slice[1 - bit].setZero();
  }
  return MpsD(std::move(cores));
}

MpsD assemble(const PiecewisePoly& pp, const Grid& g) {
  if (pp.region_count() != (std::size_t(1) << pp.support_bit) ||
      pp.origins.size() != pp.region_count()) {
    throw InvalidArgument("assemble: region count does not match 2^k");
  }
  std::optional<MpsD> total;
  for (std::size_t j = 0; j < pp.region_count(); ++j) {
    MpsD piece = mask_region(poly_mps(pp.coeffs[j], g.shifted(pp.origins[j])),
                             static_cast<Index>(j), pp.support_bit);
    total = total ? add(*total, piece) : std::move(piece);
  }
  return *total;
}

double max_discretization_error(const DistributionSpec& spec, int n_qubits,
                                int samples_per_interval) {
  spec.validate();
  const Grid g(n_qubits, spec.a, spec.b);
  double worst = 0.0;
  for (Index k = 0; k + 1 < g.size(); ++k) {
    const double x0 = grid_point(g, k);
    const double f0 = std::sqrt(pdf(spec, x0));
    for (int i = 1; i < samples_per_interval; ++i) {
      const double x = x0 + g.spacing() * i / samples_per_interval;
      worst = std::max(worst, std::abs(std::sqrt(pdf(spec, x)) - f0));
    }
  }
  return worst;
}

}  // namespace mpsprep
