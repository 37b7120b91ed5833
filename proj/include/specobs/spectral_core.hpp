#pragma once

// Spectral representation of an evolution system dz/dt = iAz, y = Cz.
//
// A is diagonal in an orthonormal eigenbasis {phi_k} of X with eigenvalues
// lambda_k > 0. The observation C enters only through the Gram matrix
//
//   G_jk = <C phi_j, C phi_k>_Y      (conjugate-linear in the first slot)
//
// so that ||Cz||_Y^2 = z^H G z for z = sum_k z_k phi_k. Everything is
// truncated to the first N modes.

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace specobs {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdRelTol = 1e-10;
inline constexpr double kZeroNormSq = 1e-300;

// Coefficients of a state in the eigenbasis; ||z||_X^2 = sum |z_k|^2.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(ComplexVector coefficients) : coeffs_(std::move(coefficients)) {}

  static StateVector basis(Eigen::Index size, Eigen::Index k);

  const ComplexVector& coefficients() const { return coeffs_; }
  Eigen::Index size() const { return coeffs_.size(); }
  double norm_sq() const { return coeffs_.squaredNorm(); }

 private:
  ComplexVector coeffs_;
};

class SpectralSystem {
 public:
  // Validates every invariant: eigenvalues positive and non-decreasing,
  // gram square of matching size, Hermitian to 1e-12 absolute, positive
  // semidefinite to -1e-10 relative. Throws ShapeError / DomainError.
  SpectralSystem(RealVector eigenvalues, ComplexMatrix gram, std::string label = {});

  const RealVector& eigenvalues() const { return eigenvalues_; }
  const ComplexMatrix& gram() const { return gram_; }
  const std::string& label() const { return label_; }
  Eigen::Index size() const { return eigenvalues_.size(); }
  double lambda_min() const { return eigenvalues_(0); }
  double lambda_max() const { return eigenvalues_(eigenvalues_.size() - 1); }

  // ||Cz||_Y^2 = z^H G z.
  double observation_norm_sq(const StateVector& z) const;

  // Gram submatrix on an index set, in the order given.
  ComplexMatrix gram_submatrix(std::span<const Eigen::Index> indices) const;

  // Contiguous groups [first, last] of equal eigenvalues (|diff| <= tol).
  struct Group {
    Eigen::Index first;
    Eigen::Index last;
    double value;
  };
  std::vector<Group> eigenvalue_groups(double tol = 1e-12) const;

 private:
  RealVector eigenvalues_;
  ComplexMatrix gram_;
  std::string label_;
};

struct FrequencyReport {
  double lambda_z;
  double residual;
  double norm_sq;
};

// A-frequency lambda(z) = <Az, z> / ||z||^2.
double frequency(const StateVector& z, const SpectralSystem& sys);

// ||Az||^2/||z||^2 - lambda(z)^2, evaluated through the moment formula.
double residual(const StateVector& z, const SpectralSystem& sys);

// ||(A - lambda(z) I) z||^2 / ||z||^2, evaluated directly from the shifted
// operator. Equal to residual() by algebra; kept separate as a cross-check.
double residual_direct(const StateVector& z, const SpectralSystem& sys);

FrequencyReport frequency_report(const StateVector& z, const SpectralSystem& sys);

// ||(A - lambda I) z||^2.
double shifted_norm_sq(const StateVector& z, double lambda, const SpectralSystem& sys);

// Relative gap between ||(A - lambda I)z||^2 and
// (lambda - lambda(z))^2 ||z||^2 + ||(A - lambda(z) I)z||^2.
// Returns 0 when both sides vanish.
double key_identity_gap(const StateVector& z, double lambda, const SpectralSystem& sys);

// Throws DomainError if ||z||^2 < 1e-300 and ShapeError on size mismatch.
void require_state(const StateVector& z, const SpectralSystem& sys, const char* where);

}  // namespace specobs
