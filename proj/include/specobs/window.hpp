#pragma once

// The compactly supported cutoff chi(s) = (1 - |s|) e^{-2|s|} on (-1, 1), its
// Fourier transform, the constants derived from it, and the time-windowed
// quantities built on top of them.
//
// Fourier convention: chi_hat(tau) = integral chi(s) e^{-i tau s} ds (no
// normalization), so integral |chi_hat|^2 = 2 pi ||chi||^2. The time-scaled
// window chi_T(t) = chi(t / T) has chi_T_hat(s) = T chi_hat(T s).

#include "specobs/decay.hpp"
#include "specobs/spectral_core.hpp"

namespace specobs {

inline constexpr double kPi = 3.14159265358979323846;
// Fourier bounds kappa1 / (1 + tau^2) <= |chi_hat(tau)| <= kappa2 / (1 + tau^2)
// as stated for this cutoff.
inline constexpr double kKappa1 = 4.0 / (3.0 * kPi);
inline constexpr double kKappa2 = 6.0;

double chi(double s);
// Piecewise derivative -sign(s)(3 - 2|s|) e^{-2|s|} on (-1, 1); 0 at s = 0
// and outside the support.
double chi_derivative(double s);
// Closed form 2 Re[1/a - (1 - e^{-a}) / a^2] with a = 2 + i tau.
double chi_hat(double tau);
// T chi_hat(T s).
double chi_hat_scaled(double T, double s);
// Adaptive quadrature of the transform integral, split at the kink s = 0.
double chi_hat_by_quadrature(double tau, double abs_tol = 1e-12);

struct CutoffProfile {
  double l2_norm_sq;        // ||chi||^2 on (-1, 1)
  double l2_deriv_norm_sq;  // ||chi'||^2 on (-1, 1)
  double linf_norm;         // sup |chi|
  double deriv_linf_norm;   // sup |chi'|
  double kappa1;
  double kappa2;
};

// Norms by adaptive quadrature (absolute tolerance 1e-12).
CutoffProfile cutoff_profile();

enum class Theta1Variant {
  L2,       // 4 ||chi||^2 / ||chi'||^2_{L2}
  Printed,  // 4 ||chi||^2 / ||chi'||^2_{Linf}
};

struct ThetaConstants {
  double c0;        // 8 kappa2/kappa1 + kappa1/kappa2 + 6
  double c0_prime;  // ||chi'|| / ||chi||
  double theta0;    // max(c0', 8 + c0)
  double theta1;    // selected variant
  double theta1_l2;
  double theta1_printed;
  double theta2;    // 4 ||chi||^2 / ||chi||^2_{Linf}
  Theta1Variant variant;
};

ThetaConstants theta_constants(const CutoffProfile& profile, Theta1Variant variant = Theta1Variant::L2);

// Frequency of the windowed transform x_hat(tau) of e^{itA} z0:
// sum lambda_k w_k / sum w_k with w_k = |chi_T_hat(tau - lambda_k)|^2 |z_k|^2.
double windowed_frequency(const StateVector& z0, const SpectralSystem& sys, double T, double tau);

// 4 |tau| + c0 lambda(z0).
double windowed_frequency_bound(const StateVector& z0, const SpectralSystem& sys, double tau,
                                const ThetaConstants& th);

// Unique T > 0 with T eps(theta0 (1/T + lambda0)) = theta1, by bracket
// expansion (at most 200 doublings / halvings) and bisection to 1e-12
// relative. Throws NumericError if no bracket is found or the map is not
// increasing across it.
double solve_observation_time(double lambda0, const DecayFunction& eps, const ThetaConstants& th);

// T eps(theta0 (1/T + lambda0)) - theta1.
double observation_time_residual(double T, double lambda0, const DecayFunction& eps, const ThetaConstants& th);

struct PlancherelMargin {
  double lhs;     // (1 - (c0'/T + lambda(z0)) / R) ||z0||^2
  double rhs;     // (2 pi T ||chi||^2)^-1 integral_{-R}^{R} ||x_hat(tau)||^2 dtau
  double margin;  // rhs - lhs
};

// The windowed energy on [-R, R] bounds ||z0||^2 from below. Requires
// R > c0'/T + lambda(z0). The energy is normalized by the total windowed
// energy 2 pi T ||chi||^2 of a unit state, so rhs -> ||z0||^2 as R -> inf.
PlancherelMargin plancherel_lowerbound_check(const StateVector& z0, const SpectralSystem& sys, double T, double R,
                                             const CutoffProfile& profile, const ThetaConstants& th);

// integral_a^b chi_hat(u)^2 du.
double chi_hat_sq_integral(double a, double b);

}  // namespace specobs
