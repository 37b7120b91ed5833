#include <catch2/catch.hpp>

#include "helpers.hpp"
#include "specobs/coercivity.hpp"
#include "specobs/errors.hpp"
#include "specobs/evolution.hpp"
#include "specobs/numerics.hpp"
#include "specobs/square_model.hpp"

#include <Eigen/Eigenvalues>

using namespace specobs;

namespace {

double observed_energy_simpson(const StateVector& z0, const SpectralSystem& sys, double T, int panels) {
  return testing::simpson(
      [&](double t) {
        ComplexVector zt = z0.coefficients();
        for (Eigen::Index k = 0; k < zt.size(); ++k) zt(k) *= std::polar(1.0, sys.eigenvalues()(k) * t);
        return zt.dot(sys.gram() * zt).real();
      },
      0.0, T, panels);
}

}  // namespace

TEST_CASE("time kernel against the exponential formula") {
  for (double gap : {0.0, 1e-13, 1e-9, 3e-5, 1e-3, 0.7, 12.0}) {
    for (double T : {0.5, 1.0, 3.0}) {
      const auto k = time_kernel(1.0, 1.0 + gap, T);
      // T sum (i g T)^n / (n+1)! for small gT, with the gap as actually represented
      const long double g = static_cast<long double>((1.0 + gap) - 1.0);
      const std::complex<long double> ix(0.0L, g * T);
      std::complex<long double> term = T;
      std::complex<long double> exact = 0.0L;
      if (std::abs(g * T) < 1.0L) {
        for (int n = 1; n < 40; ++n) {
          exact += term;
          term *= ix / static_cast<long double>(n + 1);
        }
      } else {
        exact = (std::exp(ix) - 1.0L) / (ix / static_cast<long double>(T));
      }
      CHECK(std::abs(std::complex<double>(exact) - k) <= 1e-12 * T);
    }
  }
}

TEST_CASE("observability integral of a basis state") {
  std::mt19937_64 rng(41);
  const auto g = testing::random_gram(7, 7, rng);
  SpectralSystem sys(testing::sorted_eigenvalues(7, 1.0, 20.0, rng), g);
  for (Eigen::Index k = 0; k < 7; ++k) {
    CHECK(observability_integral(StateVector::basis(7, k), sys, 2.5) == Approx(2.5 * g(k, k).real()).epsilon(1e-13));
  }
}

TEST_CASE("identity observation gives T ||z||^2") {
  RealVector ev(5);
  ev << 1.0, 2.0, 2.0, 4.0, 9.0;
  SpectralSystem sys(ev, ComplexMatrix::Identity(5, 5));
  std::mt19937_64 rng(42);
  const StateVector z(testing::gaussian_vector(5, rng));
  CHECK(observability_integral(z, sys, 3.7) == Approx(3.7 * z.norm_sq()).epsilon(1e-13));
}

TEST_CASE("two modes with a dense Gram") {
  RealVector ev(2);
  ev << 1.0, 3.0;
  ComplexMatrix g(2, 2);
  g << 1.0, Complex(0.3, 0.2), Complex(0.3, -0.2), 0.5;
  SpectralSystem sys(ev, g);
  ComplexVector z(2);
  z << 1.0, 1.0;
  const StateVector z0(z);
  const double oracle = observed_energy_simpson(z0, sys, 2.5, 20000);
  CHECK(testing::rel_diff(observability_integral(z0, sys, 2.5), oracle) <= 1e-8);
  CHECK(testing::rel_diff(observability_integral_by_quadrature(z0, sys, 2.5), oracle) <= 1e-8);
}

TEST_CASE("closed form agrees with Simpson on random systems") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> uT(0.1, 10.0);
  for (int t = 0; t < 40; ++t) {
    const auto n = 3 + t % 6;
    auto ev = testing::sorted_eigenvalues(n, 0.5, 15.0, rng);
    if (t % 4 == 0) ev(1) = ev(0);
    SpectralSystem sys(ev, testing::random_gram(n, 1 + t % n, rng));
    const StateVector z(testing::gaussian_vector(n, rng));
    const double T = uT(rng);
    CHECK(testing::rel_diff(observability_integral(z, sys, T), observed_energy_simpson(z, sys, T, 40000)) <= 1e-8);
  }
}

TEST_CASE("observability form is positive semidefinite") {
  std::mt19937_64 rng(44);
  for (double T : {0.01, 1.0, 7.0, 100.0}) {
    SpectralSystem sys(testing::sorted_eigenvalues(9, 1.0, 40.0, rng), testing::random_gram(9, 3, rng));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(observability_form(sys, T));
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * es.eigenvalues().maxCoeff());
  }
}

TEST_CASE("admissibility margins") {
  std::mt19937_64 rng(45);
  const auto g = testing::random_gram(6, 6, rng);
  SpectralSystem sys(testing::sorted_eigenvalues(6, 1.0, 10.0, rng), g);
  const double T = 1.3;
  CHECK(admissibility_check(StateVector::basis(6, 2), sys, T, g(2, 2).real() * T + 1.0) == Approx(1.0).epsilon(1e-12));

  ComplexMatrix d = ComplexMatrix::Zero(4, 4);
  d.diagonal() << 0.2, 0.9, 0.4, 0.1;
  RealVector ev(4);
  ev << 1.0, 2.0, 5.0, 6.0;
  SpectralSystem diag(ev, d);
  CHECK(sharp_admissibility_constant(diag, 2.0) == Approx(1.8).epsilon(1e-13));

  const auto sq = square::build_square_system(50, square::GammaSpec::full_side(square::Side::Bottom));
  const double c = sharp_admissibility_constant(sq.system, 1.0);
  Eigen::ComplexEigenSolver<ComplexMatrix> general(observability_form(sq.system, 1.0));
  double top = 0.0;
  for (const auto& v : general.eigenvalues()) top = std::max(top, v.real());
  CHECK(std::isfinite(c));
  CHECK(c == Approx(top).epsilon(1e-10));
  for (int t = 0; t < 50; ++t) {
    const StateVector z(testing::gaussian_vector(sq.system.size(), rng));
    CHECK(admissibility_check(z, sq.system, 1.0, c) >= -1e-10 * c * z.norm_sq());
  }
}

TEST_CASE("weak observability check") {
  const auto th = theta_constants(cutoff_profile());
  std::mt19937_64 rng(46);
  SpectralSystem sys(testing::sorted_eigenvalues(5, 1.0, 10.0, rng), testing::random_gram(5, 5, rng));
  const auto psi = DecayFunction::power_law(0.2, 1.0);
  const auto eps = DecayFunction::constant(0.1);
  SECTION("large horizon") {
    const auto r = weak_observability_check(StateVector::basis(5, 1), sys, 1e4, psi, eps, th);
    CHECK(r.applicable);
    CHECK(r.margin > 0.0);
  }
  SECTION("short horizon is not applicable") {
    const auto r = weak_observability_check(StateVector::basis(5, 1), sys, 1e-3, psi, eps, th);
    CHECK(r.t_min == Approx(th.theta1 / 0.1));
    CHECK_FALSE(r.applicable);
  }
  CHECK_THROWS_AS(observability_integral(StateVector::basis(5, 1), sys, 0.0), DomainError);
}

TEST_CASE("weak observability along the certificate pipeline") {
  const auto sq = square::build_square_system(120, square::GammaSpec::full_side(square::Side::Bottom));
  const auto pipe = build_certificate_pipeline(sq.system, 0.5);
  const auto th = theta_constants(cutoff_profile());
  std::mt19937_64 rng(47);
  for (int t = 0; t < 20; ++t) {
    const StateVector z(testing::gaussian_vector(sq.system.size(), rng));
    const double T = 2.0 * solve_observation_time(frequency(z, sq.system), pipe.spectral.epsilon, th);
    const auto r = weak_observability_check(z, sq.system, T, pipe.spectral.psi, pipe.spectral.epsilon, th);
    CHECK(r.applicable);
    CHECK(r.margin >= 0.0);
  }
}
