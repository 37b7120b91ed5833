#pragma once

// Eigenvalue clusters, cluster-wise coercivity of the Gram matrix, the
// resolvent (Hautus-type) inequality, certificate transforms between
// cluster-wise and spectral coercivity, and the off-cluster admissibility
// constant.

#include "specobs/decay.hpp"
#include "specobs/spectral_core.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace specobs {

using IndexList = std::vector<Eigen::Index>;

// All k with |lambda - lambda_k| < epsilon (strict), ascending.
IndexList enumerate_cluster(const SpectralSystem& sys, double lambda, double epsilon);

struct ClusterMinimum {
  double value;          // smallest eigenvalue of the Gram submatrix
  ComplexVector vector;  // unit eigenvector, coordinates follow `indices`
};

// min over unit z supported on `indices` of ||Cz||^2.
ClusterMinimum cluster_min_coercivity(const SpectralSystem& sys, std::span<const Eigen::Index> indices);

struct ClusterReport {
  double center;
  double epsilon;
  IndexList indices;
  double min_eig;
  ComplexVector min_vec;

  // min_vec embedded into a full StateVector of the system.
  StateVector embedded(Eigen::Index system_size) const;
};

// One report per distinct eigenvalue <= lambda_max, each cluster N_eps(center)
// centered at that eigenvalue. Sorted by center.
std::vector<ClusterReport> coercivity_scan(const SpectralSystem& sys, double epsilon, double lambda_max);

// Raised by fit_psi_envelope when some cluster has (numerically) zero
// coercivity.
class NotWeaklyCoerciveError : public std::domain_error {
 public:
  NotWeaklyCoerciveError(const std::string& what, ClusterReport offender)
      : std::domain_error(what), offender_(std::move(offender)) {}
  const ClusterReport& offender() const { return offender_; }

 private:
  ClusterReport offender_;
};

inline constexpr double kZeroCoercivity = 1e-14;

// PowerLaw(c, p), p in {0, 1, 2} (Constant(c) for p = 0), lying under
// every cluster minimum: c / (1 + center)^p <= min_eig for all reports, c as
// large as allowed.
// p is the exponent that makes the running minimum of the cluster minima
// flattest (smallest max/min ratio after multiplying by (1 + center)^p);
// ties go to the smaller exponent.
DecayFunction fit_psi_envelope(std::span<const ClusterReport> reports);

// Cluster-wise certificate valid at arbitrary centers, from one valid at
// eigenvalue centers with width eps: (eps / 2, psi(. + eps / 2)).
CoercivityCertificate weak_certificate_from_scan(const DecayFunction& psi_at_eigenvalues, double epsilon);

// Cluster-wise to spectral: epsilon(l) = 0.5 (2M / psi(l) + 1/eps)^-1,
// psi(l) / 4. `M` bounds ||C (A_l - l)^-1||^2 off the clusters.
CoercivityCertificate weak_to_spectral(const CoercivityCertificate& weak, double M);

// Spectral to cluster-wise for a constant epsilon: width
// beta = sqrt(eps / 2) (1 - 1e-9), psi(. + beta).
CoercivityCertificate spectral_to_weak(const CoercivityCertificate& spectral);

// Default admissibility grid: default_lambda_grid plus lambda_g +/- epsilon
// (just outside each cluster edge, where the off-cluster resolvent peaks).
std::vector<double> admissibility_grid(const SpectralSystem& sys, double epsilon, std::size_t points = 512);

struct AdmissibilityPoint {
  double lambda;
  double norm_sq;  // ||C (A_lambda - lambda)^-1||^2 on V(lambda)
};

std::vector<AdmissibilityPoint> admissibility_profile(const SpectralSystem& sys, double epsilon,
                                                      std::span<const double> lambda_grid);

// Max over the grid of ||C (A_lambda - lambda)^-1||^2, i.e. M^2 on the
// truncated model. Throws DomainError if a cluster swallows every mode.
double estimate_admissibility(const SpectralSystem& sys, double epsilon, std::span<const double> lambda_grid);

struct ResolventRow {
  double lambda;
  double observation_bound;  // ||Cz||^2 / psi(lambda(z))
  double resolvent_bound;    // ||(A - lambda)z||^2 / ((lambda - lambda(z))^2 + eps(lambda(z)))
  double margin;             // min(bounds) - ||z||^2
};

struct ResolventReport {
  double norm_sq;
  double lambda_z;
  std::vector<ResolventRow> rows;
  double worst_margin;
  // ||z||^2 <= min of both bounds at every lambda (within 1e-9 ||z||^2).
  bool holds;
  // ||z||^2 <= max of the two bounds at every lambda.
  bool holds_either;
};

ResolventReport resolvent_check(const SpectralSystem& sys, const StateVector& z,
                                std::span<const double> lambda_grid, const CoercivityCertificate& cert);

struct Violation {
  StateVector z;
  double lambda_z;
  double residual;
  double observation_ratio;  // ||Cz||^2 / (psi(lambda(z)) ||z||^2) < 1
  std::size_t trial;
};

// Randomized search for z with residual(z) < eps(lambda(z)) and
// ||Cz||^2 < psi(lambda(z)) ||z||^2. Candidates: the minimal vectors of the
// clusters N_b(lambda_n), b = sqrt(eps(lambda_n) / 2)(1 - 1e-9), then random
// complex Gaussian vectors on those clusters, half of them with a
// perturbation of relative size 10^-u (u ~ U[1, 6]) on up to 5 neighboring
// modes. Returns the worst violator; deterministic in `seed` and independent
// of the worker count.
std::optional<Violation> spectral_coercivity_violation_search(const SpectralSystem& sys,
                                                              const CoercivityCertificate& cert,
                                                              std::size_t trials, std::uint64_t seed);

// scan -> envelope -> shift to arbitrary centers -> admissibility ->
// spectral certificate.
struct CertificatePipeline {
  double cluster_epsilon;
  std::vector<ClusterReport> reports;
  DecayFunction psi_envelope;
  CoercivityCertificate weak;
  double admissibility_sq;  // M^2 for width cluster_epsilon / 2
  CoercivityCertificate spectral;
};

CertificatePipeline build_certificate_pipeline(const SpectralSystem& sys, double cluster_epsilon);

}  // namespace specobs
