// specobs: verification scenarios for spectral observability certificates.
//
//   specobs <subcommand> [--config PATH] [--out PATH] [--seed N] [--trials N]
//                        [--T X] [--format csv|structured]
//
// Exit codes: 0 all verdicts pass, 2 a verdict failed, 3 input or parse
// error, 4 numeric failure, 5 config schema error, 6 config invariant error.

#include "specobs/coercivity.hpp"
#include "specobs/errors.hpp"
#include "specobs/report.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace specobs;
using namespace specobs::report;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<double> T;
  std::string format = "structured";
};

std::string csv_path(const std::string& out, const std::string& table, std::size_t count) {
  if (count == 1) return out;
  const std::filesystem::path p(out);
  auto name = p.stem().string() + "." + table + (p.has_extension() ? p.extension().string() : ".csv");
  return (p.parent_path() / name).string();
}

int emit(const ReportBundle& bundle, const Options& opt, const std::string& out_path) {
  if (opt.format == "structured") {
    if (out_path.empty()) {
      write_structured(std::cout, bundle);
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) throw std::invalid_argument("cannot write '" + out_path + "'");
      write_structured(f, bundle);
    }
  } else {
    for (const auto& t : bundle.tables) {
      if (out_path.empty()) {
        if (bundle.tables.size() > 1) std::cout << "# " << t.name << '\n';
        write_csv(std::cout, t);
      } else {
        const auto path = csv_path(out_path, t.name, bundle.tables.size());
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::invalid_argument("cannot write '" + path + "'");
        write_csv(f, t);
      }
    }
  }
  write_summary(std::cerr, bundle);
  return bundle.all_pass() ? kExitPass : kExitVerdictFailed;
}

int run(Scenario scenario, const Options& opt) {
  RunConfig cfg;
  if (!opt.config.empty()) {
    cfg = load_config_file(opt.config);
    if (cfg.scenario != scenario) {
      std::cerr << "note: config names scenario '" << to_string(cfg.scenario) << "', running '"
                << to_string(scenario) << "'\n";
    }
  } else if (scenario != Scenario::VerifyCutoff) {
    throw ConfigError(ConfigError::Kind::Schema, 0, std::string(to_string(scenario)) + " needs --config");
  }
  cfg.scenario = scenario;
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.trials) {
    if (*opt.trials < 1) throw ConfigError(ConfigError::Kind::Invariant, 0, "--trials must be at least 1");
    cfg.trials = *opt.trials;
  }
  if (opt.T) {
    if (!(*opt.T > 0.0)) throw ConfigError(ConfigError::Kind::Invariant, 0, "--T must be positive");
    cfg.T = *opt.T;
  }
  const auto bundle = run_scenario(cfg);
  return emit(bundle, opt, opt.out.empty() ? cfg.output_path : opt.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral observability verification toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolkitVersion));

  Options opt;
  std::optional<Scenario> chosen;
  const std::pair<Scenario, const char*> commands[] = {
      {Scenario::VerifyCutoff, "Cutoff transform sandwich and closed form vs quadrature"},
      {Scenario::CoercivityScan, "Cluster-wise Gram minima and the fitted envelope"},
      {Scenario::ResolventScan, "Certificate pipeline, resolvent inequality and violation search"},
      {Scenario::WeakObservability, "Weak observability margins at the certified time"},
      {Scenario::AssumptionI, "Square, two touching sides observed"},
      {Scenario::AssumptionII_III, "Square, one side or a patch of it observed"},
      {Scenario::Admissibility, "Off-cluster admissibility profile and C_T checks"},
  };
  for (const auto& [scenario, help] : commands) {
    auto* sub = app.add_subcommand(to_string(scenario), help);
    sub->add_option("--config", opt.config, "YAML run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output file (default: config output_path, else stdout)");
    sub->add_option("--seed", opt.seed, "Random seed");
    sub->add_option("--trials", opt.trials, "Number of random trials");
    sub->add_option("--T", opt.T, "Observation horizon");
    sub->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv", "structured"}));
    sub->callback([&chosen, scenario = scenario] { chosen = scenario; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitParseError;
  }

  try {
    return run(*chosen, opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const NotWeaklyCoerciveError& e) {
    std::cerr << "verdict: " << e.what() << '\n';
    return kExitVerdictFailed;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumericFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitParseError;
  } catch (const std::domain_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitParseError;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumericFailure;
  }
}
