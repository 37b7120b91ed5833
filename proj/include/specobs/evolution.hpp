#pragma once

// The observed energy integral_0^T ||C e^{itA} z0||^2 dt in closed form, the
// admissibility bound on it, and the weak observability inequality.

#include "specobs/decay.hpp"
#include "specobs/spectral_core.hpp"
#include "specobs/window.hpp"

namespace specobs {

// K_jk(T) = integral_0^T e^{i (lambda_k - lambda_j) t} dt. Gaps below 1e-12
// count as ties (K = T); |gap| T < 1e-4 uses the Taylor series.
Complex time_kernel(double lambda_j, double lambda_k, double T);

// H_jk = G_jk K_jk(T); integral = z0^H H z0. Hermitian positive semidefinite.
ComplexMatrix observability_form(const SpectralSystem& sys, double T);

// Closed form. Throws DomainError for T <= 0 and NumericError if the
// imaginary part exceeds 1e-10 of the result.
double observability_integral(const StateVector& z0, const SpectralSystem& sys, double T);

// Same integral by adaptive quadrature in t (oracle and diagnostic path).
double observability_integral_by_quadrature(const StateVector& z0, const SpectralSystem& sys, double T,
                                            double rel_tol = 1e-12);

// C_T ||z0||^2 - integral.
double admissibility_check(const StateVector& z0, const SpectralSystem& sys, double T, double C_T);

// Largest eigenvalue of the observability form: the smallest valid C_T on
// the truncated model.
double sharp_admissibility_constant(const SpectralSystem& sys, double T);

struct ObservabilityReport {
  double T;
  double integral;
  double lhs;    // theta2 psi(theta0 (1/T + lambda(z0))) ||z0||^2
  double t_min;  // T(lambda(z0))
  double margin; // integral - lhs
  bool applicable;
  // A negative margin was re-examined with the quadrature integral.
  bool rechecked;
};

ObservabilityReport weak_observability_check(const StateVector& z0, const SpectralSystem& sys, double T,
                                             const DecayFunction& psi, const DecayFunction& eps,
                                             const ThetaConstants& th);

}  // namespace specobs
