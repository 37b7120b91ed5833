#pragma once

#include "specobs/spectral_core.hpp"

#include <cmath>
#include <functional>
#include <random>

namespace testing {

using specobs::Complex;
using specobs::ComplexMatrix;
using specobs::ComplexVector;
using specobs::RealVector;

inline ComplexVector gaussian_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexVector z(n);
  for (auto& c : z) c = Complex(g(rng), g(rng));
  return z;
}

// B^H B: Hermitian PSD of rank <= rank.
inline ComplexMatrix random_gram(Eigen::Index n, Eigen::Index rank, std::mt19937_64& rng) {
  ComplexMatrix b(rank, n);
  for (Eigen::Index i = 0; i < rank; ++i) b.row(i) = gaussian_vector(n, rng).transpose() / std::sqrt(double(n));
  return b.adjoint() * b;
}

inline RealVector sorted_eigenvalues(Eigen::Index n, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  RealVector ev(n);
  for (auto& v : ev) v = u(rng);
  std::sort(ev.begin(), ev.end());
  return ev;
}

// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace testing
