#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mpsprep/analysis.hpp"
#include "mpsprep/mps.hpp"

using namespace mpsprep;

namespace {

VectorXd exponential_spectrum(double alpha, double beta, int count) {
  VectorXd s(count);
  for (int k = 0; k < count; ++k) s(k) = alpha * std::exp(-beta * (k + 1));
  return s;
}

// Direct partial sums of the exponential model.
double brute_bound(double beta, int chi, int n) {
  double kept = 0.0;
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    const double w = std::exp(-2.0 * beta * k);
    total += w;
    if (k < chi) kept += w;
  }
  return 1.0 - kept / total;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("decay fit recovers exact exponentials") {
  const auto fit = fit_decay({exponential_spectrum(1.0, 2.0, 6)});
  CHECK(fit.pooled.beta == doctest::Approx(2.0).epsilon(1e-6));
  const auto fit2 = fit_decay({exponential_spectrum(3.0, 1.5, 8), exponential_spectrum(3.0, 1.5, 4)});
  CHECK(fit2.pooled.alpha == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(fit2.pooled.beta == doctest::Approx(1.5).epsilon(1e-6));
  REQUIRE(fit2.per_cut.size() == 2);
  CHECK(fit2.per_cut[1].beta == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(fit2.pooled.r_squared == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("decay fit floors noise and skips short cuts") {
  VectorXd s = exponential_spectrum(1.0, 1.0, 5);
  VectorXd noisy(7);
  noisy << s, 1e-16, 1e-17;
  const auto fit = fit_decay({noisy, VectorXd::Constant(1, 1.0)});
  CHECK(fit.pooled.beta == doctest::Approx(1.0).epsilon(1e-6));
  REQUIRE(fit.skipped_cuts.size() == 1);
  CHECK(fit.skipped_cuts[0] == 1);
  CHECK_THROWS_AS(fit_decay({VectorXd::Constant(1, 1.0)}), NumericalError);
}

TEST_CASE("chi bound values") {
  CHECK(chi_bound(1.152, 2, 12) <= 0.01);
  CHECK(chi_bound(0.1, 2, 12) > 0.01);
  CHECK(chi_bound(1.0, 12, 12) == 0.0);
  CHECK(chi_bound_captured_fraction(1.152, 2, 12) == doctest::Approx(1 - chi_bound(1.152, 2, 12)));
  CHECK(chi_bound_captured_fraction(0.7, 5, 5) == doctest::Approx(1.0));
  CHECK_THROWS_AS(chi_bound(0.0, 2, 12), InvalidArgument);
}

TEST_CASE("chi bound matches the closed hyperbolic form") {
  for (double beta : {0.1, 0.5, 1.152, 3.0}) {
    for (int chi = 1; chi <= 6; ++chi) {
      const int n = 8;
      const double closed = std::exp(beta * (n - chi)) / std::sinh(beta * n) * std::sinh(chi * beta);
      CHECK(chi_bound_captured_fraction(beta, chi, n) == doctest::Approx(closed).epsilon(1e-12));
      CHECK(chi_bound(beta, chi, n) == doctest::Approx(brute_bound(beta, chi, n)).epsilon(1e-12));
    }
  }
}

TEST_CASE("chi bound is monotone") {
  for (int n : {4, 12, 20}) {
    for (int chi = 1; chi < n; ++chi) {
      double previous = 2.0;
      for (double beta = 0.05; beta < 5.0; beta += 0.05) {
        const double b = chi_bound(beta, chi, n);
        CHECK(b <= previous);
        CHECK(b >= 0.0);
        CHECK(b <= 1.0);
        CHECK(chi_bound(beta, chi + 1, n) <= b);
        previous = b;
      }
    }
  }
}

TEST_CASE("chi bound does not overflow for large beta n") {
  CHECK(std::isfinite(chi_bound(50.0, 2, 64)));
  CHECK(chi_bound(50.0, 2, 64) < 1e-40);
}

TEST_CASE("optimality ratio") {
  CHECK(optimality_ratio(0.9, 0.9) == 1.0);
  CHECK(optimality_ratio(0.99, 0.995) == doctest::Approx(0.99497487437).epsilon(1e-10));
  CHECK_THROWS_AS(optimality_ratio(0.5, 0.0), InvalidArgument);
}

TEST_CASE("max derivative") {
  const double g = max_derivative(DistributionSpec::gaussian(0, 1, -1, 1), 10);
  CHECK(g == doctest::Approx(std::exp(-0.5) / std::sqrt(2 * std::numbers::pi)).epsilon(1e-12));
  CHECK(max_derivative(DistributionSpec::custom([](double) { return 2.0; }, 0, 1), 6) == 0.0);

  const auto lz = DistributionSpec::lorentzian(0, 1, -1, 1);
  double fd = 0.0;
  const Grid grid(10, -1, 1);
  for (Index k = 0; k < grid.size(); ++k) {
    const double x = grid_point(grid, k);
    const double h = 1e-5;
    fd = std::max(fd, std::abs(pdf(lz, x + h) - pdf(lz, x - h)) / (2 * h));
  }
  CHECK(max_derivative(lz, 10) == doctest::Approx(fd).epsilon(1e-6));

  // custom pdfs fall back to differences at grid resolution
  const auto line = DistributionSpec::custom([](double x) { return 3.0 * x + 1.0; }, 0, 1);
  CHECK(max_derivative(line, 8) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("entropy bound and max entropy") {
  CHECK(vne_increment_bound(2.0, 0.25, 2) == doctest::Approx(1.0));
  VectorXd bell = VectorXd::Zero(4);
  bell(0) = bell(3) = 1 / std::sqrt(2.0);
  CHECK(max_bipartite_vne(bell) == doctest::Approx(std::log(2.0)));
}

}

// The decay-model bound evaluated at the pooled rate, against the measured
// normalized squared error 1 - F^2 of the best chi = 2 TT-SVD state.
TEST_SUITE("analysis_consistency") {

TEST_CASE("measured chi 2 error stays within the pooled decay bound") {
  const std::vector<DistributionSpec> families = {DistributionSpec::gaussian(1, 1, 0, 2),
                                                  DistributionSpec::lognormal(1, 1, 0, 5),
                                                  DistributionSpec::lorentzian(1, 1, 0, 2)};
  for (const auto& family : families) {
    for (double sigma : {0.4, 0.6, 1.0}) {
      for (int n : {8, 10, 12}) {
        DistributionSpec s = family;
        s.sigma = sigma;
        s = resolve_domain(s, n);
        const VectorXd target = target_amplitudes(s, n);
        const double beta = fit_decay(unfolding_spectra(target)).pooled.beta;
        const MpsD best = normalize(to_mps_exact(target, TruncationPolicy::rank(2)));
        const double f = std::abs(target.dot(to_statevector(best)));
        const double measured = 1 - f * f;
        const double bound = chi_bound(beta, 2, n);
        INFO(to_string(s.kind) << " sigma " << sigma << " N " << n << ": measured " << measured
                               << ", bound " << bound << " (beta " << beta << ")");
        CHECK(measured <= 1.5 * bound);
      }
    }
  }
}

}
