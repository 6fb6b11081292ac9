#pragma once

// Target distributions, uniform grids, domain subdivision by leading bits,
// piecewise polynomial fits of the amplitude sqrt(pdf), and the exact
// polynomial-to-MPS encoding.

#include <functional>
#include <string>
#include <vector>

#include "mpsprep/mps.hpp"

namespace mpsprep {

enum class DistributionKind { gaussian, lognormal, lorentzian, custom };

std::string to_string(DistributionKind kind);
DistributionKind distribution_from_string(const std::string& name);

struct DistributionSpec {
  DistributionKind kind = DistributionKind::gaussian;
  double mu = 0.0;
  double sigma = 1.0;
  double a = 0.0;  // domain [a, b]
  double b = 1.0;

  // custom kind only
  std::function<double(double)> custom_pdf;
  // Set when the custom pdf is the square of a polynomial (lowest-first); lets
  // the spec be written to and restored from reports.
  std::vector<double> squared_poly;

  static DistributionSpec gaussian(double mu, double sigma, double a, double b);
  static DistributionSpec lognormal(double mu, double sigma, double a, double b);
  static DistributionSpec lorentzian(double mu, double sigma, double a, double b);
  static DistributionSpec custom(std::function<double(double)> pdf, double a, double b);
  /// pdf(x) = (sum_j coeffs[j] x^j)^2
  static DistributionSpec squared_polynomial(std::vector<double> coeffs, double a, double b);

  double width() const { return b - a; }
  void validate() const;
};

/// Lognormal specs whose domain starts at a <= 0 get their lower end moved to
/// one grid spacing L / 2^N above zero. Other specs are returned unchanged.
DistributionSpec resolve_domain(const DistributionSpec& spec, int n_qubits);

double pdf(const DistributionSpec& spec, double x);
/// d pdf / dx: closed forms for the built-in kinds, a central difference with
/// step `h` for custom pdfs.
double pdf_derivative(const DistributionSpec& spec, double x, double h = 1e-6);

/// 2^N uniformly spaced points including both end points.
struct Grid {
  int n_qubits = 1;
  double a = 0.0;
  double b = 1.0;

  Grid() = default;
  Grid(int n, double lo, double hi);

  Index size() const { return Index(1) << n_qubits; }
  double intervals() const { return static_cast<double>(size() - 1); }
  double spacing() const { return (b - a) / intervals(); }
  /// Same spacing, coordinates shifted by -origin.
  Grid shifted(double origin) const { return Grid(n_qubits, a - origin, b - origin); }
};

/// x(k) = a + k L / (2^N - 1)
double grid_point(const Grid& g, Index k);

/// Exact reference state: sqrt(pdf) on the grid, 2-normalized.
VectorXd target_amplitudes(const DistributionSpec& spec, int n_qubits);

struct Region {
  Index first = 0;  // first grid index
  Index last = 0;   // one past the last grid index
  double x_begin = 0.0;  // coordinate of the first grid point
  double x_end = 0.0;    // coordinate of the last grid point (inclusive)
};

/// 2^k contiguous regions of 2^(N-k) grid points; region j holds exactly the
/// indices whose top k bits spell j.
std::vector<Region> subdivide(const Grid& g, int support_bit);

/// One polynomial per region, coefficients lowest-first in the local
/// coordinate u = x - origins[j].
struct PiecewisePoly {
  int support_bit = 0;
  int degree = 0;
  std::vector<VectorXd> coeffs;
  std::vector<double> origins;

  std::size_t region_count() const { return coeffs.size(); }
  double evaluate_in_region(std::size_t j, double x) const;
  /// Value at grid index k (region chosen by the top support_bit bits).
  double evaluate_at(const Grid& g, Index k) const;
};

/// Least-squares fit of sqrt(pdf) with `samples_per_region` uniformly spaced
/// samples spanning each region's grid points. No continuity is imposed.
PiecewisePoly fit_piecewise(const DistributionSpec& spec, const Grid& g, int support_bit,
                            int degree, int samples_per_region);

/// Exact MPS of the polynomial sum_j coeffs[j] x^j on the grid, bond <= p + 1.
MpsD poly_mps(const VectorXd& coeffs, const Grid& g);

/// Zeroes the slices of the first `support_bit` sites that disagree with the
/// bits of `region`, so the state vanishes outside that region.
MpsD mask_region(const MpsD& m, Index region, int support_bit);

/// Sum over regions of the masked per-region polynomial MPS. Unnormalized.
MpsD assemble(const PiecewisePoly& pp, const Grid& g);

/// Max |sqrt(pdf)(x) - sqrt(pdf)(x_k)| over x sampled between neighbouring
/// grid points (piecewise-constant interpolation of the discretized amplitude).
double max_discretization_error(const DistributionSpec& spec, int n_qubits,
                                int samples_per_interval = 16);

}  // namespace mpsprep
