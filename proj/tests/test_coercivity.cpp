#include <catch2/catch.hpp>

#include "helpers.hpp"
#include "specobs/coercivity.hpp"
#include "specobs/errors.hpp"
#include "specobs/numerics.hpp"
#include "specobs/square_model.hpp"
#include "specobs/window.hpp"

#include <Eigen/Eigenvalues>

using namespace specobs;

namespace {

// Smallest eigenvalue through the general complex solver, not the Hermitian one.
double general_min_eig(const ComplexMatrix& m) {
  Eigen::ComplexEigenSolver<ComplexMatrix> es(m);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : es.eigenvalues()) best = std::min(best, v.real());
  return best;
}

square::SquareSystem bottom_system(int n_max) {
  return square::build_square_system(n_max, square::GammaSpec::full_side(square::Side::Bottom));
}

}  // namespace

TEST_CASE("decay forms evaluate their formulas") {
  const auto c = DecayFunction::constant(0.3);
  const auto p = DecayFunction::power_law(2.0, 1.5);
  const auto e = DecayFunction::exponential(3.0, 0.25);
  CHECK(c(123.0) == 0.3);
  CHECK(p(3.0) == Approx(2.0 / 8.0).epsilon(1e-15));
  CHECK(e(4.0) == Approx(3.0 * std::exp(-1.0)).epsilon(1e-15));
  CHECK(p.shifted(1.0)(2.0) == Approx(p(3.0)).epsilon(1e-15));
  CHECK(p.scaled(0.25)(2.0) == Approx(0.25 * p(2.0)).epsilon(1e-15));
  CHECK(c.is_lambda_independent());
  CHECK_FALSE(p.is_lambda_independent());
  CHECK_THROWS_AS(DecayFunction::constant(0.0), DomainError);
}

TEST_CASE("weak certificates need a constant epsilon") {
  CHECK_THROWS_AS(CoercivityCertificate::make(DecayFunction::power_law(1.0, 1.0), DecayFunction::constant(1.0),
                                              CoercivityCertificate::Kind::WeakSpectral, "x"),
                  DomainError);
}

TEST_CASE("cluster enumeration matches a linear scan") {
  std::mt19937_64 rng(21);
  RealVector ev = testing::sorted_eigenvalues(60, 1.0, 30.0, rng);
  ev(10) = ev(11);
  ev(40) = ev(41) = ev(42);
  SpectralSystem sys(ev, ComplexMatrix::Identity(60, 60));
  std::uniform_real_distribution<double> lam(-2.0, 35.0);
  std::uniform_real_distribution<double> width(0.01, 3.0);
  for (int t = 0; t < 300; ++t) {
    const double l = t % 3 == 0 ? ev(t % 60) : lam(rng);
    const double eps = width(rng);
    IndexList oracle;
    for (Eigen::Index k = 0; k < 60; ++k)
      if (std::abs(l - ev(k)) < eps) oracle.push_back(k);
    CHECK(enumerate_cluster(sys, l, eps) == oracle);
  }
  // Strict inequality at the edge
  CHECK(enumerate_cluster(sys, ev(5) + 0.5, 0.5).size() <= enumerate_cluster(sys, ev(5) + 0.5, 0.5 + 1e-9).size());
  CHECK(enumerate_cluster(sys, -100.0, 1.0).empty());
  CHECK_THROWS_AS(enumerate_cluster(sys, 1.0, 0.0), DomainError);
}

TEST_CASE("square clusters at eigenvalues 2 and 50") {
  const auto sq = bottom_system(60);
  const auto at = [&](double l) {
    std::vector<std::pair<int, int>> pq;
    for (auto k : enumerate_cluster(sq.system, l, 0.5)) pq.emplace_back(sq.modes[k].p, sq.modes[k].q);
    return pq;
  };
  CHECK(at(2.0) == std::vector<std::pair<int, int>>{{1, 1}});
  CHECK(at(50.0) == std::vector<std::pair<int, int>>{{1, 7}, {5, 5}, {7, 1}});
}

TEST_CASE("cluster minimum matches the general eigen-solver and bounds Rayleigh quotients") {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 30; ++t) {
    const auto g = testing::random_gram(9, 1 + t % 9, rng);
    SpectralSystem sys(RealVector::LinSpaced(9, 1.0, 9.0), g);
    const IndexList idx{1, 3, 4, 7};
    const auto m = cluster_min_coercivity(sys, idx);
    const ComplexMatrix sub = sys.gram_submatrix(idx);
    CHECK(m.value == Approx(general_min_eig(sub)).margin(1e-12));
    CHECK(m.vector.norm() == Approx(1.0).epsilon(1e-12));
    CHECK((m.vector.dot(sub * m.vector)).real() == Approx(m.value).margin(1e-12));
    for (int s = 0; s < 50; ++s) {
      const auto v = testing::gaussian_vector(4, rng);
      CHECK(v.dot(sub * v).real() / v.squaredNorm() >= m.value - 1e-12);
    }
  }
}

TEST_CASE("cluster minimum trivial cases") {
  RealVector ev(3);
  ev << 1.0, 2.0, 3.0;
  ComplexMatrix g = ComplexMatrix::Zero(3, 3);
  g.diagonal() << 0.7, 0.2, 0.5;
  SpectralSystem sys(ev, g);
  const IndexList single{2};
  CHECK(cluster_min_coercivity(sys, single).value == Approx(0.5));
  const IndexList all{0, 1, 2};
  const auto m = cluster_min_coercivity(sys, all);
  CHECK(m.value == Approx(0.2).margin(1e-15));
  CHECK(std::abs(m.vector(1)) == Approx(1.0));
}

TEST_CASE("bottom side cluster at N = 50 has minimum 2/(50 pi)") {
  const auto sq = bottom_system(60);
  const auto idx = enumerate_cluster(sq.system, 50.0, 0.5);
  CHECK(cluster_min_coercivity(sq.system, idx).value == Approx(2.0 / (50.0 * kPi)).epsilon(1e-12));
}

TEST_CASE("coercivity scan on the square up to 10") {
  const auto sq = bottom_system(20);
  const auto reports = coercivity_scan(sq.system, 0.5, 10.0);
  REQUIRE(reports.size() == 4);
  CHECK(reports[0].center == 2.0);
  CHECK(reports[1].center == 5.0);
  CHECK(reports[2].center == 8.0);
  CHECK(reports[3].center == 10.0);
  CHECK(reports[1].indices.size() == 2);
  CHECK(reports[3].indices.size() == 2);
}

TEST_CASE("scan with separated eigenvalues gives diagonal singletons") {
  std::mt19937_64 rng(23);
  const auto g = testing::random_gram(6, 6, rng);
  SpectralSystem sys(RealVector::LinSpaced(6, 1.0, 6.0), g);
  const auto reports = coercivity_scan(sys, 0.4, 10.0);
  REQUIRE(reports.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(reports[i].indices.size() == 1);
    CHECK(reports[i].min_eig == Approx(g(Eigen::Index(i), Eigen::Index(i)).real()).epsilon(1e-14));
  }
}

TEST_CASE("two touching sides give 2/pi on every cluster") {
  const auto sq = square::build_square_system(300, square::GammaSpec::two_touching_sides());
  for (const auto& r : coercivity_scan(sq.system, 0.5, 300.0)) CHECK(r.min_eig == Approx(2.0 / kPi).margin(1e-10));
}

TEST_CASE("envelope fit") {
  const auto report = [](double center, double m) { return ClusterReport{center, 0.5, {}, m, {}}; };
  SECTION("flat minima give a constant") {
    std::vector<ClusterReport> r{report(2, 0.3), report(5, 0.3), report(8, 0.3)};
    const auto psi = fit_psi_envelope(r);
    CHECK(psi.form() == DecayFunction::Form::Constant);
    CHECK(psi(1e6) == Approx(0.3));
  }
  SECTION("single report") {
    std::vector<ClusterReport> r{report(4, 0.7)};
    const auto psi = fit_psi_envelope(r);
    CHECK(psi.is_lambda_independent());
    CHECK(psi(4.0) == Approx(0.7));
  }
  SECTION("zero minimum is not weakly coercive") {
    std::vector<ClusterReport> r{report(2, 0.3), report(5, 0.0)};
    CHECK_THROWS_AS(fit_psi_envelope(r), NotWeaklyCoerciveError);
  }
  SECTION("bottom side square picks p = 1 and stays below every minimum") {
    const auto sq = bottom_system(400);
    const auto reports = coercivity_scan(sq.system, 0.5, 400.0);
    const auto psi = fit_psi_envelope(reports);
    CHECK(psi.form() == DecayFunction::Form::PowerLaw);
    CHECK(psi.exponent() == 1.0);
    for (const auto& r : reports) CHECK(psi(r.center) <= r.min_eig * (1 + 1e-12));
  }
}

TEST_CASE("gap transform arithmetic") {
  const auto weak = CoercivityCertificate::make(DecayFunction::constant(1.0), DecayFunction::constant(1.0),
                                                CoercivityCertificate::Kind::WeakSpectral, "unit");
  const auto s = weak_to_spectral(weak, 1.0);
  CHECK(s.kind == CoercivityCertificate::Kind::Spectral);
  for (double l : {0.0, 1.0, 50.0}) {
    CHECK(s.epsilon(l) == Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(s.psi(l) == Approx(0.25).epsilon(1e-15));
  }
  const double delta = 0.8;
  const double M = 3.0;
  const auto weak2 = CoercivityCertificate::make(DecayFunction::constant(0.5), DecayFunction::power_law(delta, 1.0),
                                                 CoercivityCertificate::Kind::WeakSpectral, "p1");
  const auto s2 = weak_to_spectral(weak2, M);
  for (double l : {0.0, 2.0, 1e3}) {
    CHECK(s2.epsilon(l) == Approx(0.5 / (2.0 * M * (1.0 + l) / delta + 2.0)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(weak_to_spectral(s2, M), DomainError);
}

TEST_CASE("spectral to weak and back") {
  const auto spectral = CoercivityCertificate::make(DecayFunction::constant(0.08), DecayFunction::power_law(1.0, 1.0),
                                                    CoercivityCertificate::Kind::Spectral, "s");
  const auto weak = spectral_to_weak(spectral);
  const double beta = std::sqrt(0.04) * (1.0 - 1e-9);
  CHECK(weak.epsilon(0.0) == Approx(beta).epsilon(1e-15));
  CHECK(weak.psi(1.0) == Approx(1.0 / (2.0 + beta)).epsilon(1e-14));
}

TEST_CASE("weak certificate from scan shifts by half the width") {
  const auto psi = DecayFunction::power_law(1.0, 1.0);
  const auto cert = weak_certificate_from_scan(psi, 0.5);
  CHECK(cert.epsilon(7.0) == 0.25);
  CHECK(cert.psi(3.0) == Approx(psi(3.25)).epsilon(1e-15));
}

TEST_CASE("admissibility for a diagonal Gram") {
  RealVector ev(4);
  ev << 1.0, 2.0, 4.0, 7.0;
  ComplexMatrix g = ComplexMatrix::Zero(4, 4);
  g.diagonal() << 0.5, 0.9, 0.1, 2.0;
  SpectralSystem sys(ev, g);
  const std::vector<double> grid{0.0, 1.5, 3.0, 5.5, 10.0};
  const auto prof = admissibility_profile(sys, 0.25, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double oracle = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double d = ev(k) - grid[i];
      if (std::abs(d) >= 0.25) oracle = std::max(oracle, g(k, k).real() / (d * d));
    }
    CHECK(prof[i].norm_sq == Approx(oracle).epsilon(1e-13));
  }
  SpectralSystem zero(ev, ComplexMatrix::Zero(4, 4));
  CHECK(estimate_admissibility(zero, 0.25, grid) == 0.0);
  RealVector one(1);
  one << 1.0;
  SpectralSystem single(one, ComplexMatrix::Identity(1, 1));
  const std::vector<double> at{1.0};
  CHECK_THROWS_AS(estimate_admissibility(single, 0.5, at), DomainError);
}

TEST_CASE("admissibility profile dominates sampled resolvent norms") {
  std::mt19937_64 rng(24);
  const auto ev = testing::sorted_eigenvalues(10, 1.0, 20.0, rng);
  const auto g = testing::random_gram(10, 3, rng);
  SpectralSystem sys(ev, g);
  const std::vector<double> grid{0.5, 3.3, 7.1, 12.0, 19.9};
  const auto prof = admissibility_profile(sys, 0.3, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double sampled = 0.0;
    for (int s = 0; s < 2000; ++s) {
      ComplexVector v = testing::gaussian_vector(10, rng);
      for (Eigen::Index k = 0; k < 10; ++k) {
        const double d = ev(k) - grid[i];
        v(k) = std::abs(d) < 0.3 ? Complex(0.0) : v(k) / d;
      }
      // v = (A - l)^-1 u on V(l); ratio ||C v||^2 / ||u||^2
      ComplexVector u = v;
      for (Eigen::Index k = 0; k < 10; ++k) u(k) *= ev(k) - grid[i];
      if (u.squaredNorm() == 0.0) continue;
      sampled = std::max(sampled, v.dot(g * v).real() / u.squaredNorm());
    }
    CHECK(sampled <= prof[i].norm_sq * (1 + 1e-12));
    CHECK(sampled >= 0.5 * prof[i].norm_sq);
  }
}

TEST_CASE("square bottom side admissibility is at most 8/pi") {
  const auto sq = bottom_system(200);
  const auto grid = admissibility_grid(sq.system, 0.5);
  CHECK(estimate_admissibility(sq.system, 0.5, grid) <= 8.0 / kPi);
}

TEST_CASE("resolvent check trivial cases") {
  std::mt19937_64 rng(25);
  const auto ev = testing::sorted_eigenvalues(6, 1.0, 10.0, rng);
  SpectralSystem sys(ev, ComplexMatrix::Identity(6, 6));
  const auto cert = CoercivityCertificate::make(DecayFunction::constant(0.1), DecayFunction::constant(1.0),
                                                CoercivityCertificate::Kind::Spectral, "identity");
  const StateVector z(testing::gaussian_vector(6, rng));
  const double lz = frequency(z, sys);
  const std::vector<double> grid{lz, 0.0, 5.0, 20.0};
  const auto rep = resolvent_check(sys, z, grid, cert);
  CHECK(rep.rows[0].observation_bound == Approx(z.norm_sq()).epsilon(1e-13));
  CHECK(rep.rows[0].resolvent_bound == Approx(residual(z, sys) * z.norm_sq() / 0.1).epsilon(1e-10));
  // between r/eps at lambda(z) and ||z||^2 far away
  const double lo = std::min(rep.rows[0].resolvent_bound, z.norm_sq());
  const double hi = std::max(rep.rows[0].resolvent_bound, z.norm_sq());
  for (const auto& r : rep.rows) {
    CHECK(r.resolvent_bound >= lo * (1 - 1e-12));
    CHECK(r.resolvent_bound <= hi * (1 + 1e-12));
  }
  CHECK_THROWS_AS(resolvent_check(sys, StateVector(ComplexVector::Zero(6)), grid, cert), DomainError);
}

TEST_CASE("violation search") {
  SECTION("identity observation never violates psi = 1/2") {
    std::mt19937_64 rng(26);
    SpectralSystem sys(testing::sorted_eigenvalues(8, 1.0, 10.0, rng), ComplexMatrix::Identity(8, 8));
    const auto cert = CoercivityCertificate::make(DecayFunction::constant(0.3), DecayFunction::constant(0.5),
                                                  CoercivityCertificate::Kind::Spectral, "half");
    CHECK_FALSE(spectral_coercivity_violation_search(sys, cert, 2000, 1).has_value());
  }
  SECTION("pipeline certificate holds, inflated one is caught") {
    const auto sq = bottom_system(120);
    const auto pipe = build_certificate_pipeline(sq.system, 0.5);
    CHECK_FALSE(spectral_coercivity_violation_search(sq.system, pipe.spectral, 3000, 2).has_value());
    const auto inflated = CoercivityCertificate::make(pipe.spectral.epsilon, pipe.spectral.psi.scaled(10.0),
                                                      CoercivityCertificate::Kind::Spectral, "x10");
    const auto v = spectral_coercivity_violation_search(sq.system, inflated, 3000, 2);
    REQUIRE(v.has_value());
    CHECK(v->observation_ratio < 1.0);
  }
}

TEST_CASE("proven resolvent form holds for cluster-supported and spread states") {
  // ||z||^2 <= max of the two bounds at every lambda, for states near
  // eigenvectors as well as generic ones.
  const auto sq = bottom_system(150);
  const auto pipe = build_certificate_pipeline(sq.system, 0.5);
  const auto grid = linear_grid(0.0, 2.0 * sq.system.lambda_max(), 200);
  std::mt19937_64 rng(27);
  for (int t = 0; t < 60; ++t) {
    ComplexVector z = ComplexVector::Zero(sq.system.size());
    if (t % 2 == 0) {
      z = testing::gaussian_vector(sq.system.size(), rng);
    } else {
      const auto& r = pipe.reports[static_cast<std::size_t>(t) % pipe.reports.size()];
      const auto v = testing::gaussian_vector(static_cast<Eigen::Index>(r.indices.size()), rng);
      for (std::size_t i = 0; i < r.indices.size(); ++i) z(r.indices[i]) = v(Eigen::Index(i));
    }
    CHECK(resolvent_check(sq.system, StateVector(z), grid, pipe.spectral).holds_either);
  }
}
