#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "nlfkpp/bounds.hpp"
#include "nlfkpp/harness.hpp"
#include "nlfkpp/io.hpp"
#include "nlfkpp/kinetic.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBlowUp = 2;
constexpr int kExitConfig = 3;
constexpr int kExitRuntime = 1;

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw nlfkpp::ConfigError("not a number in list: '" + item + "'");
    }
  }
  if (out.empty()) throw nlfkpp::ConfigError("empty value list");
  return out;
}

void print_outcome(const nlfkpp::RunOutcome& o) {
  std::cerr << "status: " << nlfkpp::to_string(o.status);
  if (o.blew_up())
    std::cerr << " (" << nlfkpp::to_string(o.reason) << " at t=" << o.event_time << ", x=" << o.event_location
              << ")";
  std::cerr << ", accepted steps " << o.accepted_steps << ", rejected " << o.rejected_steps << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal Fisher-KPP solver and experiment runner"};
  app.require_subcommand(1);

  std::string config_path, out_dir, snapshots_path, param = "alpha", mode = "bisect", values, eps_list = "0.1,0.05,0.025";
  double lo = 0.0, hi = 1.0, tol = 0.05;
  int threads = 0;
  bool list_presets = false;
  std::string preset_name;

  auto* simulate = app.add_subcommand("simulate", "run one experiment and write its artifacts");
  simulate->add_option("--config", config_path, "experiment JSON")->required();
  simulate->add_option("--out", out_dir, "output directory (default: ./<name>)");

  auto* bounds = app.add_subcommand("bounds", "explicit a-priori bound M for a configuration");
  bounds->add_option("--config", config_path, "experiment JSON")->required();

  auto* diagnose = app.add_subcommand("diagnose", "hair-trigger, entropy-monitor and pattern report for snapshots");
  diagnose->add_option("--snapshots", snapshots_path, "NDJSON snapshots written by simulate")->required();
  diagnose->add_option("--config", config_path, "experiment JSON the snapshots came from")->required();

  auto* sweep = app.add_subcommand("sweep", "blow-up threshold bisection or parameter scan");
  sweep->add_option("--config", config_path, "base experiment JSON")->required();
  sweep->add_option("--param", param, "alpha, beta, mu, kappa, diffusion or sigma");
  sweep->add_option("--mode", mode, "bisect or scan")->check(CLI::IsMember({"bisect", "scan"}));
  sweep->add_option("--lo", lo);
  sweep->add_option("--hi", hi);
  sweep->add_option("--tol", tol);
  sweep->add_option("--values", values, "comma-separated values for scan mode");
  sweep->add_option("--threads", threads, "worker threads (default NLFKPP_THREADS or all cores)");

  auto* kinetic = app.add_subcommand("kinetic-limit", "two-speed kinetic model against the parabolic limit");
  kinetic->add_option("--config", config_path, "experiment JSON supplying the model parameters and kernel")->required();
  kinetic->add_option("--eps", eps_list, "comma-separated eps values");

  auto* preset_cmd = app.add_subcommand("preset", "run a figure preset");
  preset_cmd->add_option("name", preset_name, "preset name");
  preset_cmd->add_option("--out", out_dir, "output root (default: current directory)");
  preset_cmd->add_flag("--list", list_presets, "print preset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*simulate) {
      const auto config = nlfkpp::load_config(config_path);
      const auto result = nlfkpp::run_experiment(config);
      nlfkpp::write_artifacts(config, result, out_dir.empty() ? config.name : out_dir);
      print_outcome(result.outcome);
      return result.outcome.blew_up() ? kExitBlowUp : kExitOk;
    }
    if (*bounds) {
      const auto config = nlfkpp::load_config(config_path);
      std::cout << nlfkpp::bound_report_json(nlfkpp::bound_M(nlfkpp::bound_inputs(config))) << "\n";
      return kExitOk;
    }
    if (*diagnose) {
      const auto config = nlfkpp::load_config(config_path);
      const auto snaps = nlfkpp::io::read_snapshots_ndjson(snapshots_path, config.grid.build());
      std::cout << nlfkpp::diagnose_snapshots_json(config, snaps) << "\n";
      return kExitOk;
    }
    if (*sweep) {
      const auto config = nlfkpp::load_config(config_path);
      nlfkpp::SweepSpec spec;
      spec.param = param;
      spec.mode = mode == "scan" ? nlfkpp::SweepMode::Scan : nlfkpp::SweepMode::Bisect;
      spec.lo = lo;
      spec.hi = hi;
      spec.tol = tol;
      spec.threads = threads;
      if (spec.mode == nlfkpp::SweepMode::Scan) spec.values = parse_list(values);
      std::cout << nlfkpp::sweep_report_json(nlfkpp::sweep(config, spec)) << "\n";
      return kExitOk;
    }
    if (*kinetic) {
      const auto config = nlfkpp::load_config(config_path);
      const auto rows = nlfkpp::kinetic_limit_study(config.params, config.kernel, parse_list(eps_list));
      std::cout << "eps,error,order\n";
      for (const auto& r : rows)
        std::cout << nlfkpp::io::format_double(r.eps) << ',' << nlfkpp::io::format_double(r.error) << ','
                  << nlfkpp::io::format_double(r.order) << "\n";
      return kExitOk;
    }
    if (*preset_cmd) {
      if (list_presets) {
        for (const auto& n : nlfkpp::preset_names()) std::cout << n << "\n";
        return kExitOk;
      }
      if (preset_name.empty()) throw nlfkpp::ConfigError("preset needs a name (see --list)");
      const auto result = nlfkpp::run_preset(preset_name, out_dir.empty() ? "." : out_dir);
      print_outcome(result.outcome);
      return kExitOk;
    }
  } catch (const nlfkpp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
