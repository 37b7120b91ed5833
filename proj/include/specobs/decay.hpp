#pragma once

// Positive non-increasing functions of a frequency lambda >= 0 (the class of
// admissible coercivity / gap functions), plus the certificate that pairs two
// of them.

#include <memory>
#include <span>
#include <string>

namespace specobs {

class DecayFunction {
 public:
  enum class Form { Constant, PowerLaw, Exponential, Shifted, Scaled, GapTransform };

  // c > 0.
  static DecayFunction constant(double c);
  // c / (1 + lambda)^p with c > 0, p >= 0.
  static DecayFunction power_law(double c, double p);
  // c * exp(-a lambda) with c > 0, a >= 0.
  static DecayFunction exponential(double c, double a);
  // lambda -> 0.5 * (2M / psi(lambda) + 1/eps)^-1, the gap function that turns
  // a cluster-wise coercivity bound into a spectral one. M > 0, eps > 0.
  static DecayFunction gap_transform(const DecayFunction& psi, double M, double eps);

  // lambda -> f(lambda + shift), shift >= 0.
  DecayFunction shifted(double shift) const;
  // lambda -> factor * f(lambda), factor > 0.
  DecayFunction scaled(double factor) const;

  double operator()(double lambda) const;

  Form form() const;
  // Parameters of the leaf forms; zero where not applicable.
  double coefficient() const;
  double exponent() const;
  double rate() const;

  bool is_constant_form() const { return form() == Form::Constant; }
  // True for forms that are constant in lambda, including composites of
  // constants.
  bool is_lambda_independent() const;

  std::string describe() const;

 private:
  struct Node;
  explicit DecayFunction(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Positivity and non-increase of f on a grid (sorted ascending internally).
bool is_admissible_on_grid(const DecayFunction& f, std::span<const double> grid);

struct CoercivityCertificate {
  enum class Kind { Spectral, WeakSpectral };

  DecayFunction epsilon;
  DecayFunction psi;
  Kind kind;
  std::string provenance;

  // Throws DomainError if a WeakSpectral certificate carries a non-constant
  // epsilon.
  static CoercivityCertificate make(DecayFunction epsilon, DecayFunction psi, Kind kind,
                                    std::string provenance);
};

const char* to_string(CoercivityCertificate::Kind kind);

}  // namespace specobs
