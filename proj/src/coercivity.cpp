#include "specobs/coercivity.hpp"

#include "specobs/errors.hpp"
#include "specobs/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace specobs {

IndexList enumerate_cluster(const SpectralSystem& sys, double lambda, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("enumerate_cluster: epsilon must be positive");
  IndexList out;
  const auto& ev = sys.eigenvalues();
  // Eigenvalues are sorted: locate the window by binary search.
  const double* begin = ev.data();
  const double* end = ev.data() + ev.size();
  for (const double* it = std::upper_bound(begin, end, lambda - epsilon); it != end && *it < lambda + epsilon; ++it) {
    if (std::abs(lambda - *it) < epsilon) out.push_back(static_cast<Eigen::Index>(it - begin));
  }
  return out;
}

ClusterMinimum cluster_min_coercivity(const SpectralSystem& sys, std::span<const Eigen::Index> indices) {
  if (indices.empty()) throw DomainError("cluster_min_coercivity: empty cluster");
  for (const auto k : indices) {
    if (k < 0 || k >= sys.size()) throw ShapeError("cluster_min_coercivity: index out of range");
  }
  auto pair = min_eigenpair(sys.gram_submatrix(indices));
  return {pair.value, std::move(pair.vector)};
}

StateVector ClusterReport::embedded(Eigen::Index system_size) const {
  ComplexVector z = ComplexVector::Zero(system_size);
  for (std::size_t a = 0; a < indices.size(); ++a) z(indices[a]) = min_vec(static_cast<Eigen::Index>(a));
  return StateVector(std::move(z));
}

std::vector<ClusterReport> coercivity_scan(const SpectralSystem& sys, double epsilon, double lambda_max) {
  if (!(epsilon > 0.0)) throw DomainError("coercivity_scan: epsilon must be positive");
  std::vector<double> centers;
  for (const auto& g : sys.eigenvalue_groups()) {
    if (g.value <= lambda_max) centers.push_back(g.value);
  }
  std::vector<ClusterReport> reports(centers.size());
  parallel_for(centers.size(), [&](std::size_t i) {
    ClusterReport r;
    r.center = centers[i];
    r.epsilon = epsilon;
    r.indices = enumerate_cluster(sys, centers[i], epsilon);
    auto m = cluster_min_coercivity(sys, r.indices);
    r.min_eig = m.value;
    r.min_vec = std::move(m.vector);
    reports[i] = std::move(r);
  });
  return reports;
}

DecayFunction fit_psi_envelope(std::span<const ClusterReport> reports) {
  if (reports.empty()) throw DomainError("fit_psi_envelope: no cluster reports");
  for (const auto& r : reports) {
    if (r.min_eig <= kZeroCoercivity) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "not weakly coercive at this epsilon: cluster centered at " << r.center << " has minimal coercivity "
          << r.min_eig;
      throw NotWeaklyCoerciveError(msg.str(), r);
    }
  }
  std::vector<const ClusterReport*> sorted;
  for (const auto& r : reports) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->center < b->center; });

  std::vector<double> running(sorted.size());
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sorted.size(); ++i) running[i] = m = std::min(m, sorted[i]->min_eig);

  constexpr std::array<double, 3> kExponents{0.0, 1.0, 2.0};
  double best_p = 0.0;
  double best_spread = std::numeric_limits<double>::infinity();
  for (const double p : kExponents) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      const double v = running[i] * std::pow(1.0 + sorted[i]->center, p);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double spread = hi / lo;
    if (spread < best_spread * (1.0 - 1e-12)) {
      best_spread = spread;
      best_p = p;
    }
  }

  double c = std::numeric_limits<double>::infinity();
  for (const auto* r : sorted) c = std::min(c, r->min_eig * std::pow(1.0 + r->center, best_p));
  auto psi = best_p == 0.0 ? DecayFunction::constant(c) : DecayFunction::power_law(c, best_p);
  for (const auto* r : sorted) {
    if (psi(r->center) > r->min_eig * (1.0 + 1e-12)) {
      throw NumericError("fit_psi_envelope: fitted envelope exceeds a cluster minimum");
    }
  }
  return psi;
}

CoercivityCertificate weak_certificate_from_scan(const DecayFunction& psi_at_eigenvalues, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("weak_certificate_from_scan: epsilon must be positive");
  return CoercivityCertificate::make(DecayFunction::constant(epsilon / 2.0), psi_at_eigenvalues.shifted(epsilon / 2.0),
                                     CoercivityCertificate::Kind::WeakSpectral,
                                     "cluster scan at eigenvalue centers, half-width shift to arbitrary centers");
}

CoercivityCertificate weak_to_spectral(const CoercivityCertificate& weak, double M) {
  if (weak.kind != CoercivityCertificate::Kind::WeakSpectral)
    throw DomainError("weak_to_spectral: certificate must be WeakSpectral");
  if (!(M > 0.0)) throw DomainError("weak_to_spectral: M must be positive");
  const double eps = weak.epsilon.coefficient();
  auto epsilon = DecayFunction::gap_transform(weak.psi, M, eps);
  auto psi = weak.psi.scaled(0.25);
  static constexpr std::array<double, 5> kCheck{0.0, 1.0, 10.0, 1e3, 1e6};
  if (!is_admissible_on_grid(epsilon, kCheck) || !is_admissible_on_grid(psi, kCheck)) {
    throw NumericError("weak_to_spectral: transformed functions are not positive and non-increasing");
  }
  return CoercivityCertificate::make(std::move(epsilon), std::move(psi), CoercivityCertificate::Kind::Spectral,
                                     "gap transform of [" + weak.provenance + "]");
}

CoercivityCertificate spectral_to_weak(const CoercivityCertificate& spectral) {
  if (spectral.kind != CoercivityCertificate::Kind::Spectral)
    throw DomainError("spectral_to_weak: certificate must be Spectral");
  if (!spectral.epsilon.is_lambda_independent())
    throw DomainError("spectral_to_weak: needs a lambda-independent epsilon");
  const double beta = std::sqrt(spectral.epsilon(0.0) / 2.0) * (1.0 - 1e-9);
  return CoercivityCertificate::make(DecayFunction::constant(beta), spectral.psi.shifted(beta),
                                     CoercivityCertificate::Kind::WeakSpectral,
                                     "cluster restriction of [" + spectral.provenance + "]");
}

std::vector<double> admissibility_grid(const SpectralSystem& sys, double epsilon, std::size_t points) {
  auto grid = default_lambda_grid(sys, points);
  for (const auto& g : sys.eigenvalue_groups()) {
    const double offset = epsilon * (1.0 + 1e-12);
    if (g.value - offset >= 0.0) grid.push_back(g.value - offset);
    grid.push_back(g.value + offset);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<AdmissibilityPoint> admissibility_profile(const SpectralSystem& sys, double epsilon,
                                                      std::span<const double> lambda_grid) {
  if (!(epsilon > 0.0)) throw DomainError("estimate_admissibility: epsilon must be positive");
  if (lambda_grid.empty()) throw DomainError("estimate_admissibility: empty lambda grid");
  std::vector<AdmissibilityPoint> out(lambda_grid.size());
  parallel_for(lambda_grid.size(), [&](std::size_t i) {
    const double lambda = lambda_grid[i];
    IndexList outside;
    std::vector<double> weights;
    for (Eigen::Index k = 0; k < sys.size(); ++k) {
      const double d = sys.eigenvalues()(k) - lambda;
      if (!(std::abs(d) < epsilon)) {
        outside.push_back(k);
        weights.push_back(1.0 / d);
      }
    }
    if (outside.empty()) {
      std::ostringstream msg;
      msg << "estimate_admissibility: cluster at lambda = " << lambda << " covers every mode";
      throw DomainError(msg.str());
    }
    const RealVector w = Eigen::Map<const RealVector>(weights.data(), static_cast<Eigen::Index>(weights.size()));
    const ComplexMatrix scaled = w.asDiagonal() * sys.gram_submatrix(outside) * w.asDiagonal();
    out[i] = {lambda, std::max(0.0, max_eigenvalue(scaled))};
  });
  return out;
}

double estimate_admissibility(const SpectralSystem& sys, double epsilon, std::span<const double> lambda_grid) {
  double best = 0.0;
  for (const auto& p : admissibility_profile(sys, epsilon, lambda_grid)) best = std::max(best, p.norm_sq);
  return best;
}

ResolventReport resolvent_check(const SpectralSystem& sys, const StateVector& z,
                                std::span<const double> lambda_grid, const CoercivityCertificate& cert) {
  if (cert.kind != CoercivityCertificate::Kind::Spectral)
    throw DomainError("resolvent_check: certificate must be Spectral");
  require_state(z, sys, "resolvent_check");
  ResolventReport rep;
  rep.norm_sq = z.norm_sq();
  rep.lambda_z = frequency(z, sys);
  const double obs = sys.observation_norm_sq(z);
  const double psi = cert.psi(rep.lambda_z);
  const double eps = cert.epsilon(rep.lambda_z);
  const double tol = 1e-9 * rep.norm_sq;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  rep.holds = true;
  rep.holds_either = true;
  rep.rows.reserve(lambda_grid.size());
  for (const double lambda : lambda_grid) {
    ResolventRow row;
    row.lambda = lambda;
    row.observation_bound = obs / psi;
    const double gap = lambda - rep.lambda_z;
    row.resolvent_bound = shifted_norm_sq(z, lambda, sys) / (gap * gap + eps);
    row.margin = std::min(row.observation_bound, row.resolvent_bound) - rep.norm_sq;
    rep.worst_margin = std::min(rep.worst_margin, row.margin);
    if (row.margin < -tol) rep.holds = false;
    if (std::max(row.observation_bound, row.resolvent_bound) - rep.norm_sq < -tol) rep.holds_either = false;
    rep.rows.push_back(row);
  }
  return rep;
}

namespace {

struct SearchCluster {
  IndexList indices;
  ComplexVector min_vec;
};

struct Candidate {
  double ratio = std::numeric_limits<double>::infinity();
  std::optional<Violation> violation;
};

void evaluate(const SpectralSystem& sys, const CoercivityCertificate& cert, ComplexVector z, std::size_t trial,
              Candidate& best) {
  StateVector state(std::move(z));
  const double lz = frequency(state, sys);
  const double res = residual(state, sys);
  if (!(res < cert.epsilon(lz))) return;
  const double ratio = sys.observation_norm_sq(state) / (cert.psi(lz) * state.norm_sq());
  if (ratio < 1.0 - 1e-12 && ratio < best.ratio) {
    best.ratio = ratio;
    best.violation = Violation{std::move(state), lz, res, ratio, trial};
  }
}

}  // namespace

std::optional<Violation> spectral_coercivity_violation_search(const SpectralSystem& sys,
                                                              const CoercivityCertificate& cert,
                                                              std::size_t trials, std::uint64_t seed) {
  if (cert.kind != CoercivityCertificate::Kind::Spectral)
    throw DomainError("spectral_coercivity_violation_search: certificate must be Spectral");
  std::vector<SearchCluster> clusters;
  for (const auto& g : sys.eigenvalue_groups()) {
    const double width = std::sqrt(cert.epsilon(g.value) / 2.0) * (1.0 - 1e-9);
    auto indices = enumerate_cluster(sys, g.value, width);
    auto m = cluster_min_coercivity(sys, indices);
    clusters.push_back({std::move(indices), std::move(m.vector)});
  }
  const Eigen::Index n = sys.size();

  constexpr std::size_t kChunk = 256;
  const std::size_t chunks = (trials + kChunk - 1) / kChunk;
  std::vector<Candidate> results(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    std::seed_seq sseq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(c)};
    std::mt19937_64 rng(sseq);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Candidate& best = results[c];
    const std::size_t end = std::min(trials, (c + 1) * kChunk);
    for (std::size_t t = c * kChunk; t < end; ++t) {
      ComplexVector z = ComplexVector::Zero(n);
      if (t < clusters.size()) {
        const auto& cl = clusters[t];
        for (std::size_t a = 0; a < cl.indices.size(); ++a) z(cl.indices[a]) = cl.min_vec(static_cast<Eigen::Index>(a));
        evaluate(sys, cert, std::move(z), t, best);
        continue;
      }
      const auto& cl = clusters[std::uniform_int_distribution<std::size_t>(0, clusters.size() - 1)(rng)];
      for (const auto k : cl.indices) z(k) = Complex(gauss(rng), gauss(rng));
      if (unit(rng) < 0.5) {
        const double scale = std::pow(10.0, -(1.0 + 5.0 * unit(rng))) * z.norm();
        const int count = std::uniform_int_distribution<int>(1, 5)(rng);
        ComplexVector bump = ComplexVector::Zero(n);
        Eigen::Index below = cl.indices.front() - 1;
        Eigen::Index above = cl.indices.back() + 1;
        for (int j = 0; j < count; ++j) {
          const Complex value(gauss(rng), gauss(rng));
          if ((j % 2 == 0 || below < 0) && above < n) {
            bump(above++) = value;
          } else if (below >= 0) {
            bump(below--) = value;
          }
        }
        if (bump.norm() > 0.0) z += bump * (scale / bump.norm());
      }
      evaluate(sys, cert, std::move(z), t, best);
    }
  });

  std::optional<Violation> worst;
  double worst_ratio = std::numeric_limits<double>::infinity();
  for (auto& r : results) {
    if (r.violation && r.ratio < worst_ratio) {
      worst_ratio = r.ratio;
      worst = std::move(r.violation);
    }
  }
  return worst;
}

CertificatePipeline build_certificate_pipeline(const SpectralSystem& sys, double cluster_epsilon) {
  auto reports = coercivity_scan(sys, cluster_epsilon, sys.lambda_max());
  auto psi = fit_psi_envelope(reports);
  auto weak = weak_certificate_from_scan(psi, cluster_epsilon);
  const double half = cluster_epsilon / 2.0;
  const auto grid = admissibility_grid(sys, half);
  double m2 = estimate_admissibility(sys, half, grid);
  // A zero Gram off every cluster (M = 0) still needs a positive constant.
  if (m2 <= 0.0) m2 = std::numeric_limits<double>::min();
  auto spectral = weak_to_spectral(weak, m2);
  return {cluster_epsilon, std::move(reports), std::move(psi), std::move(weak), m2, std::move(spectral)};
}

}  // namespace specobs
