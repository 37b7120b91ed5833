#include "specobs/decay.hpp"

#include "specobs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <variant>
#include <vector>

namespace specobs {

namespace {

struct ConstantForm {
  double c;
};
struct PowerLawForm {
  double c;
  double p;
};
struct ExponentialForm {
  double c;
  double a;
};
struct ShiftedForm {
  DecayFunction base;
  double shift;
};
struct ScaledForm {
  DecayFunction base;
  double factor;
};
struct GapForm {
  DecayFunction psi;
  double M;
  double eps;
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string("DecayFunction: ") + what + " must be positive");
}

void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v))
    throw DomainError(std::string("DecayFunction: ") + what + " must be non-negative");
}

}  // namespace

struct DecayFunction::Node {
  std::variant<ConstantForm, PowerLawForm, ExponentialForm, ShiftedForm, ScaledForm, GapForm> v;
};

DecayFunction DecayFunction::constant(double c) {
  require_positive(c, "c");
  return DecayFunction(std::make_shared<const Node>(Node{ConstantForm{c}}));
}

DecayFunction DecayFunction::power_law(double c, double p) {
  require_positive(c, "c");
  require_nonnegative(p, "p");
  return DecayFunction(std::make_shared<const Node>(Node{PowerLawForm{c, p}}));
}

DecayFunction DecayFunction::exponential(double c, double a) {
  require_positive(c, "c");
  require_nonnegative(a, "a");
  return DecayFunction(std::make_shared<const Node>(Node{ExponentialForm{c, a}}));
}

DecayFunction DecayFunction::gap_transform(const DecayFunction& psi, double M, double eps) {
  require_positive(M, "M");
  require_positive(eps, "eps");
  return DecayFunction(std::make_shared<const Node>(Node{GapForm{psi, M, eps}}));
}

DecayFunction DecayFunction::shifted(double shift) const {
  require_nonnegative(shift, "shift");
  return DecayFunction(std::make_shared<const Node>(Node{ShiftedForm{*this, shift}}));
}

DecayFunction DecayFunction::scaled(double factor) const {
  require_positive(factor, "factor");
  return DecayFunction(std::make_shared<const Node>(Node{ScaledForm{*this, factor}}));
}

double DecayFunction::operator()(double lambda) const {
  return std::visit(
      Overloaded{
          [](const ConstantForm& f) { return f.c; },
          [lambda](const PowerLawForm& f) { return f.c / std::pow(1.0 + lambda, f.p); },
          [lambda](const ExponentialForm& f) { return f.c * std::exp(-f.a * lambda); },
          [lambda](const ShiftedForm& f) { return f.base(lambda + f.shift); },
          [lambda](const ScaledForm& f) { return f.factor * f.base(lambda); },
          [lambda](const GapForm& f) { return 0.5 / (2.0 * f.M / f.psi(lambda) + 1.0 / f.eps); },
      },
      node_->v);
}

DecayFunction::Form DecayFunction::form() const {
  return static_cast<Form>(node_->v.index());
}

double DecayFunction::coefficient() const {
  return std::visit(Overloaded{
                        [](const ConstantForm& f) { return f.c; },
                        [](const PowerLawForm& f) { return f.c; },
                        [](const ExponentialForm& f) { return f.c; },
                        [](const auto&) { return 0.0; },
                    },
                    node_->v);
}

double DecayFunction::exponent() const {
  if (const auto* f = std::get_if<PowerLawForm>(&node_->v)) return f->p;
  return 0.0;
}

double DecayFunction::rate() const {
  if (const auto* f = std::get_if<ExponentialForm>(&node_->v)) return f->a;
  return 0.0;
}

bool DecayFunction::is_lambda_independent() const {
  return std::visit(Overloaded{
                        [](const ConstantForm&) { return true; },
                        [](const PowerLawForm& f) { return f.p == 0.0; },
                        [](const ExponentialForm& f) { return f.a == 0.0; },
                        [](const ShiftedForm& f) { return f.base.is_lambda_independent(); },
                        [](const ScaledForm& f) { return f.base.is_lambda_independent(); },
                        [](const GapForm& f) { return f.psi.is_lambda_independent(); },
                    },
                    node_->v);
}

std::string DecayFunction::describe() const {
  std::ostringstream out;
  out.precision(17);
  std::visit(Overloaded{
                 [&](const ConstantForm& f) { out << "Constant(" << f.c << ")"; },
                 [&](const PowerLawForm& f) { out << "PowerLaw(" << f.c << ", " << f.p << ")"; },
                 [&](const ExponentialForm& f) { out << "Exponential(" << f.c << ", " << f.a << ")"; },
                 [&](const ShiftedForm& f) { out << "Shifted(" << f.base.describe() << ", " << f.shift << ")"; },
                 [&](const ScaledForm& f) { out << "Scaled(" << f.base.describe() << ", " << f.factor << ")"; },
                 [&](const GapForm& f) {
                   out << "GapTransform(" << f.psi.describe() << ", M=" << f.M << ", eps=" << f.eps << ")";
                 },
             },
             node_->v);
  return out.str();
}

bool is_admissible_on_grid(const DecayFunction& f, std::span<const double> grid) {
  std::vector<double> xs(grid.begin(), grid.end());
  std::sort(xs.begin(), xs.end());
  double prev = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double v = f(xs[i]);
    if (!(v > 0.0) || !std::isfinite(v)) return false;
    if (i > 0 && v > prev) return false;
    prev = v;
  }
  return true;
}

CoercivityCertificate CoercivityCertificate::make(DecayFunction epsilon, DecayFunction psi, Kind kind,
                                                  std::string provenance) {
  if (kind == Kind::WeakSpectral && !epsilon.is_constant_form())
    throw DomainError("CoercivityCertificate: weak spectral certificates need a Constant epsilon");
  return {std::move(epsilon), std::move(psi), kind, std::move(provenance)};
}

const char* to_string(CoercivityCertificate::Kind kind) {
  return kind == CoercivityCertificate::Kind::Spectral ? "Spectral" : "WeakSpectral";
}

}  // namespace specobs
