#include "specobs/window.hpp"

#include "specobs/errors.hpp"
#include "specobs/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

namespace specobs {

double chi(double s) {
  const double a = std::abs(s);
  if (a >= 1.0) return 0.0;
  return (1.0 - a) * std::exp(-2.0 * a);
}

double chi_derivative(double s) {
  const double a = std::abs(s);
  if (a >= 1.0 || s == 0.0) return 0.0;
  const double v = -(3.0 - 2.0 * a) * std::exp(-2.0 * a);
  return s > 0.0 ? v : -v;
}

double chi_hat(double tau) {
  const std::complex<double> a(2.0, tau);
  const std::complex<double> v = 1.0 / a - (1.0 - std::exp(-a)) / (a * a);
  return 2.0 * v.real();
}

double chi_hat_scaled(double T, double s) {
  return T * chi_hat(T * s);
}

double chi_hat_by_quadrature(double tau, double abs_tol) {
  // The integrand is even in s; the sine part cancels between the halves.
  const auto f = [tau](double s) { return chi(s) * std::cos(tau * s); };
  const double left = integrate(f, -1.0, 0.0, abs_tol / 2.0).value;
  const double right = integrate(f, 0.0, 1.0, abs_tol / 2.0).value;
  return left + right;
}

CutoffProfile cutoff_profile() {
  const double l2 = integrate([](double s) { return chi(s) * chi(s); }, -1.0, 0.0).value +
                    integrate([](double s) { return chi(s) * chi(s); }, 0.0, 1.0).value;
  const auto d2 = [](double s) {
    const double d = chi_derivative(s);
    return d * d;
  };
  const double dl2 = integrate(d2, -1.0, 0.0).value + integrate(d2, 0.0, 1.0).value;
  // |chi| and |chi'| are monotone on (0, 1), so both suprema sit at s -> 0.
  return {l2, dl2, chi(0.0), std::abs(chi_derivative(std::nextafter(0.0, 1.0))), kKappa1, kKappa2};
}

ThetaConstants theta_constants(const CutoffProfile& p, Theta1Variant variant) {
  ThetaConstants th{};
  th.c0 = 8.0 * p.kappa2 / p.kappa1 + p.kappa1 / p.kappa2 + 6.0;
  th.c0_prime = std::sqrt(p.l2_deriv_norm_sq / p.l2_norm_sq);
  th.theta0 = std::max(th.c0_prime, 8.0 + th.c0);
  th.theta1_l2 = 4.0 * p.l2_norm_sq / p.l2_deriv_norm_sq;
  th.theta1_printed = 4.0 * p.l2_norm_sq / (p.deriv_linf_norm * p.deriv_linf_norm);
  th.theta1 = variant == Theta1Variant::L2 ? th.theta1_l2 : th.theta1_printed;
  th.theta2 = 4.0 * p.l2_norm_sq / (p.linf_norm * p.linf_norm);
  th.variant = variant;
  return th;
}

double windowed_frequency(const StateVector& z0, const SpectralSystem& sys, double T, double tau) {
  require_state(z0, sys, "windowed_frequency");
  if (!(T > 0.0)) throw DomainError("windowed_frequency: T must be positive");
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index k = 0; k < sys.size(); ++k) {
    const double mass = std::norm(z0.coefficients()(k));
    if (mass == 0.0) continue;
    const double h = chi_hat_scaled(T, tau - sys.eigenvalues()(k));
    const double w = h * h * mass;
    num += sys.eigenvalues()(k) * w;
    den += w;
  }
  if (!(den > 0.0)) throw NumericError("windowed_frequency: windowed energy underflowed");
  return num / den;
}

double windowed_frequency_bound(const StateVector& z0, const SpectralSystem& sys, double tau,
                                const ThetaConstants& th) {
  return 4.0 * std::abs(tau) + th.c0 * frequency(z0, sys);
}

double observation_time_residual(double T, double lambda0, const DecayFunction& eps, const ThetaConstants& th) {
  return T * eps(th.theta0 * (1.0 / T + lambda0)) - th.theta1;
}

double solve_observation_time(double lambda0, const DecayFunction& eps, const ThetaConstants& th) {
  if (!(lambda0 >= 0.0)) throw DomainError("solve_observation_time: lambda0 must be non-negative");
  const auto g = [&](double T) { return observation_time_residual(T, lambda0, eps, th); };
  double lo = 1.0;
  double hi = 1.0;
  int steps = 0;
  while (g(hi) < 0.0) {
    if (++steps > 200) throw NumericError("solve_observation_time: no upper bracket after 200 doublings");
    lo = hi;
    hi *= 2.0;
  }
  steps = 0;
  while (g(lo) > 0.0) {
    if (++steps > 200) throw NumericError("solve_observation_time: no lower bracket after 200 halvings");
    hi = lo;
    lo /= 2.0;
  }
  double prev = g(lo);
  for (int i = 1; i <= 16; ++i) {
    const double v = g(lo + (hi - lo) * i / 16.0);
    if (v < prev) throw NumericError("solve_observation_time: map is not increasing on the bracket");
    prev = v;
  }
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double chi_hat_sq_integral(double a, double b) {
  if (a > b) return -chi_hat_sq_integral(b, a);
  // Primitive from 0 by geometric breakpoints; chi_hat^2 is even.
  const auto primitive = [](double u) {
    const double x = std::abs(u);
    std::vector<double> br{0.0};
    for (double t = 1.0; t < x; t *= 2.0) br.push_back(t);
    br.push_back(x);
    const double v =
        integrate_piecewise([](double s) { return chi_hat(s) * chi_hat(s); }, br, 1e-13, 1e-13).value;
    return u < 0.0 ? -v : v;
  };
  return primitive(b) - primitive(a);
}

PlancherelMargin plancherel_lowerbound_check(const StateVector& z0, const SpectralSystem& sys, double T, double R,
                                             const CutoffProfile& profile, const ThetaConstants& th) {
  require_state(z0, sys, "plancherel_lowerbound_check");
  if (!(T > 0.0)) throw DomainError("plancherel_lowerbound_check: T must be positive");
  const double lz = frequency(z0, sys);
  const double threshold = th.c0_prime / T + lz;
  if (!(R > threshold)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "plancherel_lowerbound_check: need R > c0'/T + lambda(z0) = " << threshold << ", got " << R;
    throw DomainError(msg.str());
  }
  const double norm_sq = z0.norm_sq();
  // Substituting u = T (tau - lambda_k) turns each mode's windowed energy into
  // an integral of chi_hat^2 alone.
  double energy = 0.0;
  for (Eigen::Index k = 0; k < sys.size(); ++k) {
    const double mass = std::norm(z0.coefficients()(k));
    if (mass == 0.0) continue;
    const double lk = sys.eigenvalues()(k);
    energy += mass * chi_hat_sq_integral(T * (-R - lk), T * (R - lk));
  }
  PlancherelMargin out;
  out.lhs = (1.0 - threshold / R) * norm_sq;
  out.rhs = energy / (2.0 * kPi * profile.l2_norm_sq);
  out.margin = out.rhs - out.lhs;
  return out;
}

}  // namespace specobs
