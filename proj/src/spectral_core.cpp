#include "specobs/spectral_core.hpp"

#include "specobs/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>

namespace specobs {

StateVector StateVector::basis(Eigen::Index size, Eigen::Index k) {
  if (k < 0 || k >= size) throw ShapeError("StateVector::basis: index out of range");
  ComplexVector v = ComplexVector::Zero(size);
  v(k) = 1.0;
  return StateVector(std::move(v));
}

SpectralSystem::SpectralSystem(RealVector eigenvalues, ComplexMatrix gram, std::string label)
    : eigenvalues_(std::move(eigenvalues)), gram_(std::move(gram)), label_(std::move(label)) {
  const Eigen::Index n = eigenvalues_.size();
  if (n == 0) throw ShapeError("SpectralSystem: empty eigenvalue list");
  if (gram_.rows() != n || gram_.cols() != n) {
    std::ostringstream msg;
    msg << "SpectralSystem: gram is " << gram_.rows() << "x" << gram_.cols() << ", expected " << n
        << "x" << n;
    throw ShapeError(msg.str());
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(eigenvalues_(k) > 0.0) || !std::isfinite(eigenvalues_(k)))
      throw DomainError("SpectralSystem: eigenvalue " + std::to_string(k) + " is not positive");
    if (k > 0 && eigenvalues_(k) < eigenvalues_(k - 1))
      throw DomainError("SpectralSystem: eigenvalues not sorted at index " + std::to_string(k));
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j; k < n; ++k) {
      if (std::abs(gram_(j, k) - std::conj(gram_(k, j))) > kHermitianTol) {
        std::ostringstream msg;
        msg << "SpectralSystem: gram not Hermitian at (" << j << "," << k << ")";
        throw ShapeError(msg.str());
      }
    }
  }
  // Symmetrize away sub-tolerance noise so downstream solvers see an exact
  // Hermitian matrix.
  gram_ = (0.5 * (gram_ + gram_.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram_, Eigen::EigenvaluesOnly);
  const double top = std::max(es.eigenvalues().maxCoeff(), 0.0);
  if (es.eigenvalues().minCoeff() < -kPsdRelTol * top) {
    throw DomainError("SpectralSystem: gram is not positive semidefinite");
  }
}

double SpectralSystem::observation_norm_sq(const StateVector& z) const {
  if (z.size() != size()) throw ShapeError("observation_norm_sq: dimension mismatch");
  const Complex v = z.coefficients().dot(gram_ * z.coefficients());
  return v.real();
}

ComplexMatrix SpectralSystem::gram_submatrix(std::span<const Eigen::Index> indices) const {
  const auto m = static_cast<Eigen::Index>(indices.size());
  ComplexMatrix sub(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      sub(a, b) = gram_(indices[static_cast<std::size_t>(a)], indices[static_cast<std::size_t>(b)]);
    }
  }
  return sub;
}

std::vector<SpectralSystem::Group> SpectralSystem::eigenvalue_groups(double tol) const {
  std::vector<Group> groups;
  Eigen::Index first = 0;
  for (Eigen::Index k = 1; k <= size(); ++k) {
    if (k == size() || eigenvalues_(k) - eigenvalues_(first) > tol) {
      groups.push_back({first, k - 1, eigenvalues_(first)});
      first = k;
    }
  }
  return groups;
}

void require_state(const StateVector& z, const SpectralSystem& sys, const char* where) {
  if (z.size() != sys.size()) {
    std::ostringstream msg;
    msg << where << ": state has " << z.size() << " modes, system has " << sys.size();
    throw ShapeError(msg.str());
  }
  if (z.norm_sq() < kZeroNormSq) throw DomainError(std::string(where) + ": zero state");
}

double frequency(const StateVector& z, const SpectralSystem& sys) {
  require_state(z, sys, "frequency");
  const auto w = z.coefficients().cwiseAbs2();
  return w.dot(sys.eigenvalues()) / w.sum();
}

double residual(const StateVector& z, const SpectralSystem& sys) {
  require_state(z, sys, "residual");
  const auto w = z.coefficients().cwiseAbs2();
  const double mass = w.sum();
  const double m1 = w.dot(sys.eigenvalues()) / mass;
  const double m2 = w.dot(sys.eigenvalues().cwiseAbs2()) / mass;
  return m2 - m1 * m1;
}

double residual_direct(const StateVector& z, const SpectralSystem& sys) {
  const double lz = frequency(z, sys);
  return shifted_norm_sq(z, lz, sys) / z.norm_sq();
}

FrequencyReport frequency_report(const StateVector& z, const SpectralSystem& sys) {
  return {frequency(z, sys), residual(z, sys), z.norm_sq()};
}

double shifted_norm_sq(const StateVector& z, double lambda, const SpectralSystem& sys) {
  if (z.size() != sys.size()) throw ShapeError("shifted_norm_sq: dimension mismatch");
  const auto w = z.coefficients().cwiseAbs2();
  const RealVector shift = (sys.eigenvalues().array() - lambda).square().matrix();
  return w.dot(shift);
}

double key_identity_gap(const StateVector& z, double lambda, const SpectralSystem& sys) {
  require_state(z, sys, "key_identity_gap");
  const double lz = frequency(z, sys);
  const double lhs = shifted_norm_sq(z, lambda, sys);
  const double rhs = (lambda - lz) * (lambda - lz) * z.norm_sq() + shifted_norm_sq(z, lz, sys);
  if (lhs == 0.0) return rhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(lhs - rhs) / lhs;
}

}  // namespace specobs
