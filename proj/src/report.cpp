#include "specobs/report.hpp"

#include "specobs/coercivity.hpp"
#include "specobs/errors.hpp"
#include "specobs/evolution.hpp"
#include "specobs/numerics.hpp"
#include "specobs/window.hpp"

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace specobs::report {

ConfigError::ConfigError(Kind kind, int line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), kind_(kind), line_(line) {}

int ConfigError::exit_code() const {
  switch (kind_) {
    case Kind::Parse: return kExitParseError;
    case Kind::Schema: return kExitSchemaError;
    case Kind::Invariant: return kExitInvariantError;
  }
  return kExitParseError;
}

namespace {

struct ScenarioName {
  Scenario scenario;
  const char* name;
};

constexpr ScenarioName kScenarioNames[] = {
    {Scenario::VerifyCutoff, "verify-cutoff"},
    {Scenario::CoercivityScan, "coercivity-scan"},
    {Scenario::ResolventScan, "resolvent-scan"},
    {Scenario::WeakObservability, "weak-observability"},
    {Scenario::AssumptionI, "assumption-i"},
    {Scenario::AssumptionII_III, "assumption-ii-iii"},
    {Scenario::Admissibility, "admissibility"},
};

}  // namespace

const char* to_string(Scenario s) {
  for (const auto& e : kScenarioNames) {
    if (e.scenario == s) return e.name;
  }
  return "?";
}

Scenario scenario_from_string(const std::string& name) {
  std::string key = name;
  std::replace(key.begin(), key.end(), '_', '-');
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
  for (const auto& e : kScenarioNames) {
    if (key == e.name) return e.scenario;
  }
  // CamelCase spellings
  if (key == "verifycutoff") return Scenario::VerifyCutoff;
  if (key == "coercivityscan") return Scenario::CoercivityScan;
  if (key == "resolventscan") return Scenario::ResolventScan;
  if (key == "weakobservability") return Scenario::WeakObservability;
  if (key == "assumptioni") return Scenario::AssumptionI;
  if (key == "assumptionii-iii") return Scenario::AssumptionII_III;
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

double parse_angle(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(static_cast<char>(std::tolower(c)));
  }
  const auto number = [&](const std::string& part) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size() || part.empty()) {
      throw std::invalid_argument("not an angle: '" + text + "'");
    }
    return v;
  };
  const auto pos = s.find("pi");
  if (pos == std::string::npos) return number(s);
  std::string head = s.substr(0, pos);
  if (!head.empty() && head.back() == '*') head.pop_back();
  const double factor = head.empty() ? 1.0 : number(head);
  const std::string tail = s.substr(pos + 2);
  double divisor = 1.0;
  if (!tail.empty()) {
    if (tail.front() != '/') throw std::invalid_argument("not an angle: '" + text + "'");
    divisor = number(tail.substr(1));
    if (divisor == 0.0) throw std::invalid_argument("zero divisor in angle '" + text + "'");
  }
  return factor * kPi / divisor;
}

namespace {

int line_of(const YAML::Node& node) {
  return node.Mark().line >= 0 ? node.Mark().line + 1 : 0;
}

[[noreturn]] void schema_error(const YAML::Node& node, const std::string& what) {
  throw ConfigError(ConfigError::Kind::Schema, line_of(node), what);
}

[[noreturn]] void invariant_error(const YAML::Node& node, const std::string& what) {
  throw ConfigError(ConfigError::Kind::Invariant, line_of(node), what);
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) schema_error(node, "'" + key + "' must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    schema_error(node, "'" + key + "' has the wrong type");
  }
}

double angle(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) schema_error(node, "'" + key + "' must be a number or an expression in pi");
  try {
    return parse_angle(node.Scalar());
  } catch (const std::invalid_argument& e) {
    schema_error(node, "'" + key + "': " + e.what());
  }
}

Complex complex_entry(const YAML::Node& node, const std::string& where) {
  if (node.IsScalar()) return {scalar<double>(node, where), 0.0};
  if (node.IsSequence() && node.size() == 2) {
    return {scalar<double>(node[0], where), scalar<double>(node[1], where)};
  }
  schema_error(node, where + " must be a real number or a [re, im] pair");
}

void check_keys(const YAML::Node& map, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      schema_error(kv.first, "unknown key '" + key + "' in " + where);
    }
  }
}

SquareConfig parse_square(const YAML::Node& node) {
  if (!node.IsMap()) schema_error(node, "'square' must be a map");
  check_keys(node, {"gamma", "n_max_eigenvalue"}, "square");
  SquareConfig sq{};
  if (!node["n_max_eigenvalue"]) schema_error(node, "square: missing 'n_max_eigenvalue'");
  sq.n_max_eigenvalue = scalar<int>(node["n_max_eigenvalue"], "n_max_eigenvalue");
  if (sq.n_max_eigenvalue < 2) invariant_error(node["n_max_eigenvalue"], "n_max_eigenvalue must be at least 2");
  const auto gamma = node["gamma"];
  if (!gamma || !gamma.IsSequence() || gamma.size() == 0) {
    schema_error(gamma ? gamma : node, "square: 'gamma' must be a nonempty list of patches");
  }
  for (const auto& patch : gamma) {
    if (!patch.IsMap()) schema_error(patch, "gamma patch must be a map with side, alpha, beta");
    check_keys(patch, {"side", "alpha", "beta"}, "gamma patch");
    if (!patch["side"]) schema_error(patch, "gamma patch: missing 'side'");
    square::BoundaryPatch bp{};
    try {
      bp.side = square::side_from_string(scalar<std::string>(patch["side"], "side"));
    } catch (const DomainError& e) {
      schema_error(patch["side"], e.what());
    }
    bp.alpha = patch["alpha"] ? angle(patch["alpha"], "alpha") : 0.0;
    bp.beta = patch["beta"] ? angle(patch["beta"], "beta") : kPi;
    sq.gamma.push_back(bp);
  }
  try {
    square::GammaSpec check(sq.gamma);
  } catch (const DomainError& e) {
    invariant_error(gamma, e.what());
  }
  return sq;
}

CustomConfig parse_custom(const YAML::Node& node) {
  if (!node.IsMap()) schema_error(node, "'custom' must be a map");
  check_keys(node, {"eigenvalues", "gram"}, "custom");
  const auto ev = node["eigenvalues"];
  const auto gram = node["gram"];
  if (!ev || !ev.IsSequence() || ev.size() == 0) schema_error(ev ? ev : node, "custom: 'eigenvalues' must be a nonempty list");
  if (!gram || !gram.IsSequence()) schema_error(gram ? gram : node, "custom: 'gram' must be a list of rows");
  CustomConfig c;
  const auto n = static_cast<Eigen::Index>(ev.size());
  c.eigenvalues.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) c.eigenvalues(k) = scalar<double>(ev[static_cast<std::size_t>(k)], "eigenvalue");
  if (static_cast<Eigen::Index>(gram.size()) != n) {
    invariant_error(gram, "gram has " + std::to_string(gram.size()) + " rows but there are " + std::to_string(n) +
                              " eigenvalues");
  }
  c.gram.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto row = gram[static_cast<std::size_t>(j)];
    if (!row.IsSequence() || static_cast<Eigen::Index>(row.size()) != n) {
      invariant_error(row, "gram row " + std::to_string(j) + " must have " + std::to_string(n) + " entries");
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      c.gram(j, k) = complex_entry(row[static_cast<std::size_t>(k)], "gram entry");
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j; k < n; ++k) {
      if (std::abs(c.gram(j, k) - std::conj(c.gram(k, j))) > kHermitianTol) {
        schema_error(gram[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)],
                     "gram is not Hermitian at (" + std::to_string(j) + "," + std::to_string(k) + ")");
      }
    }
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(c.eigenvalues(k) > 0.0)) invariant_error(ev[static_cast<std::size_t>(k)], "eigenvalues must be positive");
    if (k > 0 && c.eigenvalues(k) < c.eigenvalues(k - 1)) {
      invariant_error(ev[static_cast<std::size_t>(k)], "eigenvalues must be non-decreasing");
    }
  }
  return c;
}

}  // namespace

RunConfig load_config_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(ConfigError::Kind::Parse, e.mark.line >= 0 ? e.mark.line + 1 : 0, e.msg);
  }
  if (!root.IsMap()) throw ConfigError(ConfigError::Kind::Schema, line_of(root), "top level must be a map");
  check_keys(root, {"system", "scenario", "epsilon_cluster", "trials", "seed", "T", "output_path"}, "config");

  RunConfig cfg;
  cfg.source_text = text;
  if (!root["scenario"]) schema_error(root, "missing 'scenario'");
  try {
    cfg.scenario = scenario_from_string(scalar<std::string>(root["scenario"], "scenario"));
  } catch (const std::invalid_argument& e) {
    schema_error(root["scenario"], e.what());
  }
  if (const auto sys = root["system"]) {
    if (!sys.IsMap() || sys.size() != 1) schema_error(sys, "'system' must hold exactly one of 'square' or 'custom'");
    if (sys["square"]) {
      cfg.system = parse_square(sys["square"]);
    } else if (sys["custom"]) {
      cfg.system = parse_custom(sys["custom"]);
    } else {
      schema_error(sys, "'system' must hold exactly one of 'square' or 'custom'");
    }
  }
  if (const auto e = root["epsilon_cluster"]) {
    cfg.epsilon_cluster = scalar<double>(e, "epsilon_cluster");
    if (!(cfg.epsilon_cluster > 0.0)) invariant_error(e, "epsilon_cluster must be positive");
  }
  if (const auto t = root["trials"]) {
    cfg.trials = scalar<int>(t, "trials");
    if (cfg.trials < 1) invariant_error(t, "trials must be at least 1");
  }
  if (const auto s = root["seed"]) cfg.seed = scalar<std::uint64_t>(s, "seed");
  if (const auto t = root["T"]) {
    cfg.T = scalar<double>(t, "T");
    if (!(*cfg.T > 0.0)) invariant_error(t, "T must be positive");
  }
  if (const auto o = root["output_path"]) cfg.output_path = scalar<std::string>(o, "output_path");
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(ConfigError::Kind::Parse, 0, "cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_config_text(buf.str());
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto feed = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  feed(cfg.source_text);
  feed("|scenario=" + std::string(to_string(cfg.scenario)));
  feed("|eps=" + format_number(cfg.epsilon_cluster));
  feed("|trials=" + std::to_string(cfg.trials));
  feed("|seed=" + std::to_string(cfg.seed));
  feed("|T=" + (cfg.T ? format_number(*cfg.T) : std::string("auto")));
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return out;
}

bool ReportBundle::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

namespace {

struct BuiltSystem {
  SpectralSystem system;
  std::optional<square::GammaSpec> gamma;
  int n_max = 0;
};

BuiltSystem build_system(const RunConfig& cfg) {
  if (const auto* sq = std::get_if<SquareConfig>(&cfg.system)) {
    square::GammaSpec gamma(sq->gamma);
    auto built = square::build_square_system(sq->n_max_eigenvalue, gamma);
    return {std::move(built.system), gamma, sq->n_max_eigenvalue};
  }
  if (const auto* c = std::get_if<CustomConfig>(&cfg.system)) {
    return {SpectralSystem(c->eigenvalues, c->gram, "custom"), std::nullopt, 0};
  }
  throw DomainError("scenario needs a 'system' block");
}

const SquareConfig& require_square(const RunConfig& cfg) {
  const auto* sq = std::get_if<SquareConfig>(&cfg.system);
  if (!sq) throw DomainError("scenario needs a square system");
  return *sq;
}

// Even trials: Gaussian over every mode. Odd trials: Gaussian on one
// cluster plus a small spill onto the rest, which is where the coercivity
// bounds are tight.
StateVector random_state(const SpectralSystem& sys, double eps, std::mt19937_64& rng, std::size_t trial) {
  std::normal_distribution<double> g(0.0, 1.0);
  const Eigen::Index n = sys.size();
  ComplexVector z = ComplexVector::Zero(n);
  if (trial % 2 == 0) {
    for (Eigen::Index k = 0; k < n; ++k) z(k) = Complex(g(rng), g(rng));
    return StateVector(z);
  }
  const auto groups = sys.eigenvalue_groups();
  std::uniform_int_distribution<std::size_t> pick(0, groups.size() - 1);
  const auto& grp = groups[pick(rng)];
  for (const auto k : enumerate_cluster(sys, grp.value, eps)) z(k) = Complex(g(rng), g(rng));
  const double spill = 1e-3 * std::sqrt(z.squaredNorm() / static_cast<double>(n));
  for (Eigen::Index k = 0; k < n; ++k) z(k) += spill * Complex(g(rng), g(rng));
  return StateVector(z);
}

std::vector<std::pair<std::string, double>> constants_block(const CutoffProfile& p) {
  const auto th = theta_constants(p, Theta1Variant::L2);
  return {
      {"kappa1", p.kappa1},
      {"kappa2", p.kappa2},
      {"chi_l2_norm_sq", p.l2_norm_sq},
      {"chi_deriv_l2_norm_sq", p.l2_deriv_norm_sq},
      {"chi_linf_norm", p.linf_norm},
      {"chi_deriv_linf_norm", p.deriv_linf_norm},
      {"c0", th.c0},
      {"c0_prime", th.c0_prime},
      {"theta0", th.theta0},
      {"theta1_l2", th.theta1_l2},
      {"theta1_printed", th.theta1_printed},
      {"theta2", th.theta2},
  };
}

void verify_cutoff(ReportBundle& out) {
  Table t{"cutoff", {"tau", "chi_hat", "weighted", "chi_hat_quadrature", "abs_diff"}, {}};
  const auto grid = linear_grid(-200.0, 200.0, 4001);
  t.rows.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const double tau = grid[i];
    const double h = chi_hat(tau);
    const double q = chi_hat_by_quadrature(tau);
    t.rows[i] = {tau, h, (1.0 + tau * tau) * std::abs(h), q, std::abs(h - q)};
  });
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double tau_hi = 0.0;
  double diff = 0.0;
  for (const auto& r : t.rows) {
    lo = std::min(lo, r[2]);
    if (r[2] > hi) {
      hi = r[2];
      tau_hi = r[0];
    }
    diff = std::max(diff, r[4]);
  }
  const double at0 = chi_hat(0.0);
  const double at0_quad = chi_hat_by_quadrature(0.0);
  out.summary = {{"weighted_min", lo},      {"weighted_max", hi},     {"weighted_argmax", tau_hi},
                 {"chi_hat_0", at0},        {"chi_hat_0_quadrature", at0_quad},
                 {"max_abs_diff", diff}};
  std::ostringstream d;
  d << std::setprecision(17) << "range [" << lo << ", " << hi << "] vs [" << kKappa1 << ", " << kKappa2 << "]";
  out.verdicts.push_back({"sandwich", lo >= kKappa1 - 1e-9 && hi <= kKappa2 + 1e-9, d.str()});
  out.verdicts.push_back({"chi_hat_at_zero", std::abs(at0 - at0_quad) <= 1e-12, "closed form vs quadrature"});
  out.verdicts.push_back({"closed_vs_quadrature", diff <= 1e-9, "max |difference| on the grid"});
  out.tables.push_back(std::move(t));
}

void coercivity_table(ReportBundle& out, const SpectralSystem& sys, double eps) {
  const auto reports = coercivity_scan(sys, eps, sys.lambda_max());
  Table t{"clusters", {"center", "size", "min_eig", "center_times_min_eig"}, {}};
  double delta_hat = std::numeric_limits<double>::infinity();
  double min_eig = delta_hat;
  for (const auto& r : reports) {
    t.rows.push_back({r.center, static_cast<double>(r.indices.size()), r.min_eig, r.center * r.min_eig});
    delta_hat = std::min(delta_hat, r.center * r.min_eig);
    min_eig = std::min(min_eig, r.min_eig);
  }
  out.summary.push_back({"delta_hat", delta_hat});
  out.summary.push_back({"min_cluster_eig", min_eig});
  out.tables.push_back(std::move(t));
  try {
    const auto psi = fit_psi_envelope(reports);
    out.summary.push_back({"psi_coefficient", psi.coefficient()});
    out.summary.push_back({"psi_exponent", psi.form() == DecayFunction::Form::Constant ? 0.0 : psi.exponent()});
    out.verdicts.push_back({"weakly_coercive", true, psi.describe()});
  } catch (const NotWeaklyCoerciveError& e) {
    out.verdicts.push_back({"weakly_coercive", false, e.what()});
  }
}

void resolvent_scan(ReportBundle& out, const RunConfig& cfg, const SpectralSystem& sys) {
  const auto pipe = build_certificate_pipeline(sys, cfg.epsilon_cluster);
  out.summary.push_back({"admissibility_sq", pipe.admissibility_sq});
  const auto grid = admissibility_grid(sys, cfg.epsilon_cluster / 2.0);
  const auto trials = static_cast<std::size_t>(cfg.trials);
  std::vector<StateVector> states;
  std::mt19937_64 rng(cfg.seed);
  // Gaussian over every mode. States on a single cluster violate the inf
  // form at lambda = lambda(z) whenever their residual is below eps.
  for (std::size_t i = 0; i < trials; ++i) states.push_back(random_state(sys, cfg.epsilon_cluster, rng, 0));
  Table t{"resolvent", {"trial", "lambda_z", "norm_sq", "worst_margin", "holds", "holds_either"}, {}};
  t.rows.resize(trials);
  parallel_for(trials, [&](std::size_t i) {
    const auto r = resolvent_check(sys, states[i], grid, pipe.spectral);
    t.rows[i] = {static_cast<double>(i), r.lambda_z,          r.norm_sq,
                 r.worst_margin,         r.holds ? 1.0 : 0.0, r.holds_either ? 1.0 : 0.0};
  });
  const auto failures = std::count_if(t.rows.begin(), t.rows.end(), [](const auto& r) { return r[4] == 0.0; });
  const auto failures_either = std::count_if(t.rows.begin(), t.rows.end(), [](const auto& r) { return r[5] == 0.0; });
  out.verdicts.push_back({"resolvent_inequality", failures == 0, std::to_string(failures) + " negative margins"});
  out.verdicts.push_back({"resolvent_inequality_either", failures_either == 0,
                          std::to_string(failures_either) + " states below both bounds"});
  const auto violation = spectral_coercivity_violation_search(sys, pipe.spectral, trials, cfg.seed + 1);
  out.verdicts.push_back({"spectral_coercivity", !violation,
                          violation ? "counterexample at trial " + std::to_string(violation->trial)
                                    : "no counterexample in " + std::to_string(trials) + " trials"});
  out.tables.push_back(std::move(t));
}

void weak_observability(ReportBundle& out, const RunConfig& cfg, const SpectralSystem& sys) {
  const auto pipe = build_certificate_pipeline(sys, cfg.epsilon_cluster);
  const auto profile = cutoff_profile();
  const auto th = theta_constants(profile, Theta1Variant::L2);
  const auto th_printed = theta_constants(profile, Theta1Variant::Printed);
  const auto trials = static_cast<std::size_t>(cfg.trials);
  std::vector<StateVector> states;
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t i = 0; i < trials; ++i) states.push_back(random_state(sys, cfg.epsilon_cluster, rng, i));
  Table t{"weak_observability",
          {"trial", "lambda_z", "T", "t_min_l2", "t_min_printed", "integral", "lhs", "margin", "rechecked"},
          {}};
  t.rows.resize(trials);
  parallel_for(trials, [&](std::size_t i) {
    const double lz = frequency(states[i], sys);
    const double t_min = solve_observation_time(lz, pipe.spectral.epsilon, th);
    const double T = cfg.T ? *cfg.T : 2.0 * t_min;
    const auto r = weak_observability_check(states[i], sys, T, pipe.spectral.psi, pipe.spectral.epsilon, th);
    const double t_printed = solve_observation_time(lz, pipe.spectral.epsilon, th_printed);
    t.rows[i] = {static_cast<double>(i), lz, T, t_min, t_printed, r.integral, r.lhs, r.margin, r.rechecked ? 1.0 : 0.0};
  });
  std::size_t applicable = 0;
  std::size_t negative = 0;
  for (const auto& r : t.rows) {
    if (r[2] >= r[3]) {
      ++applicable;
      if (r[7] < 0.0) ++negative;
    }
  }
  out.summary.push_back({"applicable_trials", static_cast<double>(applicable)});
  out.verdicts.push_back({"weak_observability", negative == 0,
                          std::to_string(negative) + " negative margins in " + std::to_string(applicable) +
                              " applicable trials"});
  out.tables.push_back(std::move(t));
}

void assumption_one(ReportBundle& out, const RunConfig& cfg) {
  const auto& sq = require_square(cfg);
  const auto rep = square::assumption_I_check(sq.n_max_eigenvalue);
  Table t{"circles", {"N", "size", "mu", "abs_dev_2_over_pi"}, {}};
  for (const auto& r : rep.table) t.rows.push_back({double(r.N), double(r.size), r.mu, std::abs(r.mu - 2.0 / kPi)});
  out.summary = {{"min_mu", rep.min_mu}, {"max_deviation", rep.max_deviation}, {"psi_coefficient", rep.psi.coefficient()}};
  out.verdicts.push_back({"mu_equals_2_over_pi", rep.max_deviation <= 1e-10, "max |mu_N - 2/pi|"});
  out.verdicts.push_back({"psi_constant", rep.psi.form() == DecayFunction::Form::Constant, rep.psi.describe()});
  out.tables.push_back(std::move(t));
}

void assumption_two_three(ReportBundle& out, const RunConfig& cfg) {
  const auto& sq = require_square(cfg);
  const square::GammaSpec gamma(sq.gamma);
  const auto fit = square::delta_gamma_fit(gamma, sq.n_max_eigenvalue);
  const bool full_side = gamma.patches().size() == 1 && gamma.patches()[0].alpha == 0.0 &&
                         std::abs(gamma.patches()[0].beta - kPi) < 1e-15;
  Table t{"circles", {"N", "size", "mu", "n_mu", "q_min", "closed_form_n_mu", "generalized"}, {}};
  double closed_dev = 0.0;
  std::size_t below = 0;
  for (const auto& r : fit.table) {
    const double closed = 2.0 * r.q_min * r.q_min / kPi;
    closed_dev = std::max(closed_dev, std::abs(closed - r.n_mu));
    if (r.generalized < fit.delta_hat) ++below;
    t.rows.push_back({double(r.N), double(r.size), r.mu, r.n_mu, double(r.q_min), closed, r.generalized});
  }
  out.summary = {{"delta_hat", fit.delta_hat},
                 {"argmin_N", double(fit.argmin_N)},
                 {"min_generalized", fit.min_generalized}};
  out.verdicts.push_back({"delta_hat_positive", fit.delta_hat > 0.0, "min over clusters of N mu_N"});
  out.verdicts.push_back({"generalized_dominates_delta_hat", below == 0,
                          std::to_string(below) + " clusters with generalized eigenvalue below delta_hat"});
  if (full_side) {
    out.summary.push_back({"closed_form_max_dev", closed_dev});
    out.verdicts.push_back({"closed_form_n_mu", closed_dev <= 1e-10, "N mu_N vs 2 q_min^2 / pi"});
  }
  out.tables.push_back(std::move(t));
}

void admissibility(ReportBundle& out, const RunConfig& cfg, const SpectralSystem& sys) {
  const double eps = cfg.epsilon_cluster / 2.0;
  const auto grid = admissibility_grid(sys, eps);
  const auto profile = admissibility_profile(sys, eps, grid);
  Table t{"profile", {"lambda", "norm_sq"}, {}};
  double m2 = 0.0;
  for (const auto& p : profile) {
    t.rows.push_back({p.lambda, p.norm_sq});
    m2 = std::max(m2, p.norm_sq);
  }
  const double T = cfg.T ? *cfg.T : 1.0;
  const double c_t = sharp_admissibility_constant(sys, T);
  std::mt19937_64 rng(cfg.seed);
  Table checks{"admissibility_checks", {"trial", "norm_sq", "margin"}, {}};
  std::size_t negative = 0;
  for (int i = 0; i < cfg.trials; ++i) {
    const auto z = random_state(sys, cfg.epsilon_cluster, rng, static_cast<std::size_t>(i));
    const double margin = admissibility_check(z, sys, T, c_t);
    if (margin < -1e-9 * c_t * z.norm_sq()) ++negative;
    checks.rows.push_back({double(i), z.norm_sq(), margin});
  }
  out.summary = {{"admissibility_sq", m2}, {"T", T}, {"C_T", c_t}};
  out.verdicts.push_back({"admissibility", negative == 0, std::to_string(negative) + " negative margins"});
  out.tables.push_back(std::move(t));
  out.tables.push_back(std::move(checks));
}

}  // namespace

ReportBundle run_scenario(const RunConfig& cfg) {
  ReportBundle out;
  out.scenario = to_string(cfg.scenario);
  out.version = kToolkitVersion;
  out.config_hash = config_hash(cfg);
  out.seed = cfg.seed;
  out.constants = constants_block(cutoff_profile());
  const auto context = [&](const std::string& what) { return out.scenario + ": " + what; };
  try {
    switch (cfg.scenario) {
      case Scenario::VerifyCutoff:
        verify_cutoff(out);
        break;
      case Scenario::CoercivityScan: {
        const auto built = build_system(cfg);
        coercivity_table(out, built.system, cfg.epsilon_cluster);
        break;
      }
      case Scenario::ResolventScan:
        resolvent_scan(out, cfg, build_system(cfg).system);
        break;
      case Scenario::WeakObservability:
        weak_observability(out, cfg, build_system(cfg).system);
        break;
      case Scenario::AssumptionI:
        assumption_one(out, cfg);
        break;
      case Scenario::AssumptionII_III:
        assumption_two_three(out, cfg);
        break;
      case Scenario::Admissibility:
        admissibility(out, cfg, build_system(cfg).system);
        break;
    }
  } catch (const NotWeaklyCoerciveError& e) {
    throw NotWeaklyCoerciveError(context(e.what()), e.offender());
  } catch (const ShapeError& e) {
    throw ShapeError(context(e.what()));
  } catch (const DomainError& e) {
    throw DomainError(context(e.what()));
  } catch (const NumericError& e) {
    throw NumericError(context(e.what()));
  }
  return out;
}

namespace {

nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);  // JSON has no inf/nan
}

}  // namespace

void write_structured(std::ostream& out, const ReportBundle& b) {
  nlohmann::ordered_json j;
  j["scenario"] = b.scenario;
  j["version"] = b.version;
  j["csv_layout_version"] = kCsvLayoutVersion;
  j["config_hash"] = b.config_hash;
  j["seed"] = b.seed;
  j["pass"] = b.all_pass();
  auto& c = j["constants"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : b.constants) c[k] = number(v);
  auto& s = j["summary"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : b.summary) s[k] = number(v);
  auto& verdicts = j["verdicts"] = nlohmann::ordered_json::array();
  for (const auto& v : b.verdicts) verdicts.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  auto& tables = j["tables"] = nlohmann::ordered_json::array();
  for (const auto& t : b.tables) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (double v : r) row.push_back(number(v));
      rows.push_back(std::move(row));
    }
    tables.push_back({{"name", t.name}, {"columns", t.columns}, {"rows", std::move(rows)}});
  }
  out << j.dump(2) << '\n';
}

void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& r : table.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_number(r[i]);
    out << '\n';
  }
}

void write_summary(std::ostream& out, const ReportBundle& b) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::setprecision(6);
  s << b.scenario << " (specobs " << b.version << ", config " << b.config_hash << ", seed " << b.seed << ")\n";
  for (const auto& [k, v] : b.summary) s << "  " << k << " = " << v << '\n';
  for (const auto& v : b.verdicts) s << "  [" << (v.pass ? "PASS" : "FAIL") << "] " << v.name << ": " << v.detail << '\n';
  out << s.str();
}

}  // namespace specobs::report
