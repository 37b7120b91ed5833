#include <catch2/catch.hpp>

#include "helpers.hpp"
#include "specobs/errors.hpp"
#include "specobs/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <atomic>
#include <cstdlib>

using namespace specobs;

TEST_CASE("adaptive quadrature on smooth and oscillatory integrands") {
  CHECK(integrate([](double x) { return std::exp(x); }, 0.0, 1.0).value == Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, 3.14159265358979323846).value ==
        Approx(2.0).epsilon(1e-13));
  // integral_0^1 cos(500 x) = sin(500)/500
  CHECK(std::abs(integrate([](double x) { return std::cos(500.0 * x); }, 0.0, 1.0).value - std::sin(500.0) / 500.0) <=
        1e-12);
  CHECK(integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-10, 1e-10).value ==
        Approx(2.0 / 3.0).epsilon(1e-10));
  CHECK(integrate([](double) { return 1.0; }, 2.0, 2.0).value == 0.0);
}

TEST_CASE("quadrature reports failure instead of looping") {
  CHECK_THROWS_AS(integrate([](double x) { return x == 0.0 ? 0.0 : std::sin(1.0 / x) / x; }, 0.0, 1.0, 1e-15, 1e-15),
                  NumericError);
}

TEST_CASE("piecewise quadrature sums the pieces") {
  const std::vector<double> br{0.0, 0.5, 1.0, 2.0};
  CHECK(integrate_piecewise([](double x) { return x * x; }, br).value == Approx(8.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("extreme eigenpairs") {
  std::mt19937_64 rng(51);
  const auto g = testing::random_gram(7, 7, rng);
  Eigen::ComplexEigenSolver<ComplexMatrix> general(g);
  double lo = 1e300;
  double hi = -1e300;
  for (const auto& v : general.eigenvalues()) {
    lo = std::min(lo, v.real());
    hi = std::max(hi, v.real());
  }
  CHECK(min_eigenvalue(g) == Approx(lo).margin(1e-12 * hi));
  CHECK(max_eigenvalue(g) == Approx(hi).margin(1e-12 * hi));
  const auto mp = min_eigenpair(g);
  CHECK((g * mp.vector - mp.value * mp.vector).norm() <= 1e-12);
}

TEST_CASE("generalized eigenvalue with a diagonal weight") {
  std::mt19937_64 rng(52);
  const auto h = testing::random_gram(5, 5, rng);
  RealVector d(5);
  d << 0.1, 0.4, 1.0, 0.25, 0.9;
  const double mu = min_generalized_eigenvalue(h, d);
  // Rayleigh quotient z^H H z / z^H D z is minimised at mu.
  for (int t = 0; t < 500; ++t) {
    const auto z = testing::gaussian_vector(5, rng);
    double den = 0.0;
    for (int k = 0; k < 5; ++k) den += d(k) * std::norm(z(k));
    CHECK(z.dot(h * z).real() / den >= mu * (1 - 1e-12));
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(h.real(), d.asDiagonal().toDenseMatrix());
  if (h.imag().norm() == 0.0) CHECK(mu == Approx(ges.eigenvalues().minCoeff()));
}

TEST_CASE("default grid is sorted and spans the spectrum") {
  RealVector ev(4);
  ev << 1.0, 2.0, 2.0, 10.0;
  SpectralSystem sys(ev, ComplexMatrix::Identity(4, 4));
  const auto grid = default_lambda_grid(sys, 64);
  CHECK(std::is_sorted(grid.begin(), grid.end()));
  CHECK(std::adjacent_find(grid.begin(), grid.end()) == grid.end());
  CHECK(grid.front() <= 0.5);
  CHECK(grid.back() >= 20.0);
  CHECK(std::find(grid.begin(), grid.end(), 1.5) != grid.end());
  CHECK(std::find(grid.begin(), grid.end(), 6.0) != grid.end());
}

TEST_CASE("linear grid endpoints") {
  const auto g = linear_grid(-200.0, 200.0, 4001);
  CHECK(g.size() == 4001);
  CHECK(g.front() == -200.0);
  CHECK(g.back() == 200.0);
  CHECK(g[2000] == 0.0);
}

TEST_CASE("parallel loop visits every index and rethrows the first failure") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](const auto& h) { return h.load() == 1; }));
  try {
    parallel_for(100, [](std::size_t i) {
      if (i == 17 || i == 80) throw std::runtime_error(std::to_string(i));
    });
    FAIL("no exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "17");
  }
}

TEST_CASE("worker count honours the environment") {
  ::setenv("SPECOBS_THREADS", "3", 1);
  CHECK(worker_count() == 3);
  ::unsetenv("SPECOBS_THREADS");
  CHECK(worker_count() >= 1);
}
