#include "specobs/evolution.hpp"

#include "specobs/errors.hpp"
#include "specobs/numerics.hpp"

#include <cmath>

namespace specobs {

Complex time_kernel(double lambda_j, double lambda_k, double T) {
  const double gap = lambda_k - lambda_j;
  if (gap == 0.0) return {T, 0.0};
  const double x = gap * T;
  if (std::abs(x) < 1e-4) {
    // T (e^{ix} - 1) / (ix) = T (1 + ix/2 - x^2/6 - ix^3/24 + x^4/120 + ...)
    const double x2 = x * x;
    return {T * (1.0 - x2 / 6.0 + x2 * x2 / 120.0), T * (x / 2.0 - x * x2 / 24.0)};
  }
  // (e^{ix} - 1) / (i gap) = (sin x + i (1 - cos x)) / gap, 1 - cos x = 2 sin^2(x/2)
  const double h = std::sin(x / 2.0);
  return {std::sin(x) / gap, 2.0 * h * h / gap};
}

ComplexMatrix observability_form(const SpectralSystem& sys, double T) {
  if (!(T > 0.0)) throw DomainError("observability_form: T must be positive");
  const Eigen::Index n = sys.size();
  ComplexMatrix h(n, n);
  const auto& ev = sys.eigenvalues();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) h(j, k) = sys.gram()(j, k) * time_kernel(ev(j), ev(k), T);
  }
  return h;
}

double observability_integral(const StateVector& z0, const SpectralSystem& sys, double T) {
  if (!(T > 0.0)) throw DomainError("observability_integral: T must be positive");
  if (z0.size() != sys.size()) throw ShapeError("observability_integral: dimension mismatch");
  const auto& z = z0.coefficients();
  const auto& ev = sys.eigenvalues();
  Complex total = 0.0;
  for (Eigen::Index j = 0; j < sys.size(); ++j) {
    if (z(j) == 0.0) continue;
    Complex row = 0.0;
    for (Eigen::Index k = 0; k < sys.size(); ++k) {
      if (z(k) == 0.0) continue;
      row += sys.gram()(j, k) * time_kernel(ev(j), ev(k), T) * z(k);
    }
    total += std::conj(z(j)) * row;
  }
  if (std::abs(total.imag()) > 1e-10 * std::max(std::abs(total.real()), 1e-300) &&
      std::abs(total.imag()) > 1e-14 * T * sys.gram().cwiseAbs().maxCoeff() * z0.norm_sq()) {
    throw NumericError("observability_integral: non-negligible imaginary part");
  }
  return total.real();
}

double observability_integral_by_quadrature(const StateVector& z0, const SpectralSystem& sys, double T,
                                            double rel_tol) {
  if (!(T > 0.0)) throw DomainError("observability_integral_by_quadrature: T must be positive");
  if (z0.size() != sys.size()) throw ShapeError("observability_integral_by_quadrature: dimension mismatch");
  const auto integrand = [&](double t) {
    ComplexVector zt = z0.coefficients();
    for (Eigen::Index k = 0; k < zt.size(); ++k) zt(k) *= std::polar(1.0, sys.eigenvalues()(k) * t);
    return zt.dot(sys.gram() * zt).real();
  };
  // Split so each piece spans a bounded number of oscillations.
  const double span = sys.lambda_max() - sys.lambda_min();
  const int pieces = std::max(1, static_cast<int>(std::ceil(span * T / (4.0 * kPi))));
  const auto br = linear_grid(0.0, T, static_cast<std::size_t>(pieces) + 1);
  return integrate_piecewise(integrand, br, 0.0, rel_tol).value;
}

double admissibility_check(const StateVector& z0, const SpectralSystem& sys, double T, double C_T) {
  if (!(C_T > 0.0)) throw DomainError("admissibility_check: C_T must be positive");
  return C_T * z0.norm_sq() - observability_integral(z0, sys, T);
}

double sharp_admissibility_constant(const SpectralSystem& sys, double T) {
  return max_eigenvalue(observability_form(sys, T));
}

ObservabilityReport weak_observability_check(const StateVector& z0, const SpectralSystem& sys, double T,
                                             const DecayFunction& psi, const DecayFunction& eps,
                                             const ThetaConstants& th) {
  require_state(z0, sys, "weak_observability_check");
  if (!(T > 0.0)) throw DomainError("weak_observability_check: T must be positive");
  ObservabilityReport rep{};
  const double lz = frequency(z0, sys);
  rep.T = T;
  rep.integral = observability_integral(z0, sys, T);
  rep.lhs = th.theta2 * psi(th.theta0 * (1.0 / T + lz)) * z0.norm_sq();
  rep.t_min = solve_observation_time(lz, eps, th);
  rep.applicable = T >= rep.t_min;
  rep.margin = rep.integral - rep.lhs;
  if (rep.margin < 0.0) {
    rep.integral = observability_integral_by_quadrature(z0, sys, T, 1e-12);
    rep.margin = rep.integral - rep.lhs;
    rep.rechecked = true;
  }
  return rep;
}

}  // namespace specobs
