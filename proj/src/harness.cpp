#include "nlfkpp/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "nlfkpp/io.hpp"

namespace nlfkpp {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

std::string initial_kind_name(InitialKind k) {
  switch (k) {
    case InitialKind::Front: return "front";
    case InitialKind::OscillatoryBump: return "oscillatory_bump";
    case InitialKind::ConstantTimesNoise: return "constant_times_noise";
    case InitialKind::Custom: return "custom";
  }
  return "front";
}

InitialKind initial_kind_from(const std::string& s) {
  if (s == "front") return InitialKind::Front;
  if (s == "oscillatory_bump") return InitialKind::OscillatoryBump;
  if (s == "constant_times_noise") return InitialKind::ConstantTimesNoise;
  if (s == "custom") return InitialKind::Custom;
  throw ConfigError("unknown initial kind '" + s + "'");
}

Kernel kernel_from_json(const json& k) {
  reject_unknown(k, {"shape", "sigma", "samples", "delta0", "eta"}, "kernel");
  const KernelShape shape = kernel_shape_from_string(get_or<std::string>(k, "shape", "uniform"));
  const double sigma = get_or(k, "sigma", 1.0);
  switch (shape) {
    case KernelShape::Uniform: return Kernel::uniform(sigma);
    case KernelShape::Logistic: return Kernel::logistic(sigma);
    case KernelShape::Gaussian: return Kernel::gaussian(sigma);
    case KernelShape::Dirac: return Kernel::dirac();
    case KernelShape::Tabulated: {
      if (!k.contains("samples") || !k.contains("delta0") || !k.contains("eta"))
        throw ConfigError("tabulated kernel needs samples, delta0 and eta");
      std::vector<std::pair<double, double>> samples;
      for (const auto& s : k.at("samples")) {
        if (!s.is_array() || s.size() != 2) throw ConfigError("kernel samples must be [x, y] pairs");
        samples.emplace_back(s[0].get<double>(), s[1].get<double>());
      }
      return Kernel::tabulated(std::move(samples), k.at("delta0").get<double>(), k.at("eta").get<double>(), sigma);
    }
  }
  throw ConfigError("unsupported kernel shape");
}

json kernel_to_json(const Kernel& k) {
  json j{{"shape", to_string(k.shape())}, {"sigma", k.sigma()}};
  if (k.shape() == KernelShape::Tabulated) {
    json samples = json::array();
    for (const auto& [x, y] : k.samples()) samples.push_back({x, y});
    j["samples"] = samples;
    j["delta0"] = k.base_delta0();
    j["eta"] = k.base_eta();
  }
  return j;
}

json residuals_to_json(const ResidualReport& r) {
  json pairs = json::array();
  for (const auto& p : r.pairs)
    pairs.push_back({{"t0", p.t0}, {"t1", p.t1}, {"max_residual", p.max_residual}, {"tolerance", p.tolerance},
                     {"location", p.location}});
  json j{{"passed", r.passed},
         {"refused", r.refused},
         {"delta_used", r.delta_used},
         {"delta_admissible", r.delta_admissible},
         {"delta_in_range", r.delta_in_range},
         {"pairs", pairs}};
  if (r.refused) j["refusal"] = r.refusal;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

json hair_trigger_to_json(const HairTriggerReport& h) {
  json series = json::array();
  for (const auto& [t, d] : h.sup_distance_series) series.push_back({t, d});
  json j{{"a", h.a},
         {"b", h.b},
         {"target", h.target},
         {"converged", h.converged},
         {"hypothesis_A", h.hypothesis_A},
         {"hypothesis_B", h.hypothesis_B},
         {"sup_distance_series", series}};
  j["converged_time"] = h.converged_time ? json(*h.converged_time) : json(nullptr);
  j["hypothesis_B_sup"] = std::isfinite(h.hypothesis_B_sup) ? json(h.hypothesis_B_sup) : json(nullptr);
  return j;
}

json pattern_to_json(const PatternMetrics& p) {
  return {{"crossing_count", p.crossing_count},
          {"max_amplitude", p.max_amplitude},
          {"dominant_wavelength", p.dominant_wavelength}};
}

// Snapshot stride giving about 200 snapshots over the run.
int default_stride(double t_end, double dt) {
  return std::max(1, static_cast<int>(std::lround(t_end / dt / 200.0)));
}

ExperimentConfig front_preset(const std::string& name, double alpha, double mu, double diffusion, Kernel kernel) {
  ExperimentConfig c;
  c.name = name;
  c.params = {alpha, 1.0, mu, 1.0, diffusion};
  c.kernel = std::move(kernel);
  c.grid = GridSpec{};
  c.initial.kind = InitialKind::Front;
  c.solver.integrator = Integrator::IMEX;
  c.solver.dt_initial = 1e-4;
  c.solver.dt_min = 1e-6;
  c.solver.t_end = 10.0;
  c.solver.snapshot_stride = default_stride(c.solver.t_end, c.solver.dt_initial);
  return c;
}

ExperimentConfig bump_preset(const std::string& name, double alpha, double beta, double kappa, double mu,
                             Kernel kernel, double t_end) {
  ExperimentConfig c;
  c.name = name;
  c.params = {alpha, beta, mu, kappa, 1.0};
  c.kernel = std::move(kernel);
  c.grid = GridSpec{-5.0, 5.0, 1000, true, 1.0, 0.0};
  c.initial.kind = InitialKind::OscillatoryBump;
  c.solver.integrator = Integrator::IMEX;
  c.solver.dt_initial = 1e-4;
  c.solver.dt_min = 1e-6;
  c.solver.t_end = t_end;
  c.solver.snapshot_stride = default_stride(t_end, c.solver.dt_initial);
  DiagnosticsSpec d;
  d.horizon = t_end;
  c.diagnostics = d;
  return c;
}

}  // namespace

Grid1D GridSpec::build() const {
  if (periodic) return Grid1D(x_left, x_right, n_cells, Periodic{});
  return Grid1D(x_left, x_right, n_cells, DirichletExtension{left_value, right_value});
}

Field make_initial(const InitialSpec& spec, const Grid1D& grid) {
  const std::size_t n = grid.node_count();
  std::vector<double> v(n);
  switch (spec.kind) {
    case InitialKind::Front:
      return front_initial_condition(grid);
    case InitialKind::OscillatoryBump:
      for (std::size_t i = 0; i < n; ++i)
        v[i] = spec.floor + spec.amplitude * 0.5 * (1.0 + std::cos(spec.wavenumber * grid.x(i)));
      break;
    case InitialKind::ConstantTimesNoise: {
      std::mt19937_64 rng(spec.seed);
      std::uniform_real_distribution<double> unit(-1.0, 1.0);
      for (std::size_t i = 0; i < n; ++i) v[i] = spec.level * (1.0 + spec.noise * unit(rng));
      break;
    }
    case InitialKind::Custom: {
      if (!spec.values.empty()) {
        v = spec.values;
      } else {
        if (spec.file.empty()) throw ConfigError("custom initial data needs values or a file");
        std::ifstream is(spec.file);
        if (!is) throw ConfigError("cannot open initial data file " + spec.file);
        v.clear();
        double x;
        while (is >> x) v.push_back(x);
      }
      if (v.size() != n)
        throw ConfigError("custom initial data has " + std::to_string(v.size()) + " values, grid has " +
                          std::to_string(n) + " nodes");
      break;
    }
  }
  for (double x : v)
    if (x < 0.0) throw ConfigError("initial data must be nonnegative");
  return Field(grid, std::move(v), 0.0);
}

void ExperimentConfig::validate() const {
  params.validate();
  solver.validate();
  (void)grid.build();
  if (diagnostics) diagnostics->lyapunov.validate();
  if (N < 1) throw ConfigError("N must be >= 1");
}

std::vector<double> ExperimentConfig::resolved_display_times() const {
  if (!display_times.empty()) return display_times;
  const double t = solver.t_end;
  return {0.0, 0.25 * t, 0.5 * t, t};
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"name", "alpha", "beta", "mu", "kappa", "diffusion", "kernel", "grid", "initial", "solver",
                  "diagnostics", "display_times", "K", "u0_sup", "G", "N", "m"},
                 "config");
  ExperimentConfig c;
  c.name = get_or<std::string>(j, "name", "custom");
  c.params.alpha = get_or(j, "alpha", 1.0);
  c.params.beta = get_or(j, "beta", 1.0);
  c.params.mu = get_or(j, "mu", 1.0);
  c.params.kappa = get_or(j, "kappa", 1.0);
  c.params.diffusion = get_or(j, "diffusion", 1.0);
  if (j.contains("kernel")) c.kernel = kernel_from_json(j.at("kernel"));

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    reject_unknown(g, {"x_left", "x_right", "n_cells", "boundary", "left_value", "right_value"}, "grid");
    c.grid.x_left = get_or(g, "x_left", c.grid.x_left);
    c.grid.x_right = get_or(g, "x_right", c.grid.x_right);
    c.grid.n_cells = get_or(g, "n_cells", c.grid.n_cells);
    const std::string b = get_or<std::string>(g, "boundary", "dirichlet");
    if (b != "dirichlet" && b != "periodic") throw ConfigError("grid boundary must be dirichlet or periodic");
    c.grid.periodic = b == "periodic";
    c.grid.left_value = get_or(g, "left_value", c.grid.left_value);
    c.grid.right_value = get_or(g, "right_value", c.grid.right_value);
  }

  if (j.contains("initial")) {
    const json& i = j.at("initial");
    reject_unknown(i, {"kind", "amplitude", "wavenumber", "floor", "level", "noise", "seed", "values", "file"},
                   "initial");
    c.initial.kind = initial_kind_from(get_or<std::string>(i, "kind", "front"));
    c.initial.amplitude = get_or(i, "amplitude", c.initial.amplitude);
    c.initial.wavenumber = get_or(i, "wavenumber", c.initial.wavenumber);
    c.initial.floor = get_or(i, "floor", c.initial.floor);
    c.initial.level = get_or(i, "level", c.initial.level);
    c.initial.noise = get_or(i, "noise", c.initial.noise);
    c.initial.seed = get_or<std::uint64_t>(i, "seed", 0);
    c.initial.values = get_or(i, "values", std::vector<double>{});
    c.initial.file = get_or<std::string>(i, "file", "");
  }

  if (j.contains("solver")) {
    const json& s = j.at("solver");
    reject_unknown(s,
                   {"dt_initial", "dt_min", "cfl_safety", "t_end", "blowup_threshold", "convolution", "integrator",
                    "snapshot_stride", "output_times", "adaptive", "saturation_fraction"},
                   "solver");
    SolverConfig& sc = c.solver;
    sc.dt_initial = get_or(s, "dt_initial", sc.dt_initial);
    sc.dt_min = get_or(s, "dt_min", sc.dt_min);
    sc.cfl_safety = get_or(s, "cfl_safety", sc.cfl_safety);
    sc.t_end = get_or(s, "t_end", sc.t_end);
    sc.blowup_threshold = get_or(s, "blowup_threshold", sc.blowup_threshold);
    const std::string conv = get_or<std::string>(s, "convolution", "fft");
    if (conv != "fft" && conv != "direct") throw ConfigError("convolution must be fft or direct");
    sc.convolution_method = conv == "fft" ? ConvolutionMethod::FFT : ConvolutionMethod::Direct;
    sc.integrator = integrator_from_string(get_or<std::string>(s, "integrator", "rk4"));
    sc.snapshot_stride = get_or(s, "snapshot_stride", sc.snapshot_stride);
    sc.output_times = get_or(s, "output_times", std::vector<double>{});
    sc.adaptive = get_or(s, "adaptive", sc.adaptive);
    sc.saturation_fraction = get_or(s, "saturation_fraction", sc.saturation_fraction);
  }

  if (j.contains("diagnostics") && !j.at("diagnostics").is_null()) {
    const json& d = j.at("diagnostics");
    reject_unknown(d,
                   {"a", "b", "tol", "horizon", "monitor", "delta", "interior_margin", "residual_c1", "residual_c2",
                    "hypothesis_slack", "pattern_level"},
                   "diagnostics");
    DiagnosticsSpec ds;
    ds.a = get_or(d, "a", ds.a);
    ds.b = get_or(d, "b", ds.b);
    ds.tol = get_or(d, "tol", ds.tol);
    ds.horizon = get_or(d, "horizon", c.solver.t_end);
    ds.monitor = get_or(d, "monitor", ds.monitor);
    ds.lyapunov.delta = get_or(d, "delta", ds.lyapunov.delta);
    ds.lyapunov.interior_margin = get_or(d, "interior_margin", ds.lyapunov.interior_margin);
    ds.lyapunov.residual_c1 = get_or(d, "residual_c1", ds.lyapunov.residual_c1);
    ds.lyapunov.residual_c2 = get_or(d, "residual_c2", ds.lyapunov.residual_c2);
    ds.lyapunov.hypothesis_slack = get_or(d, "hypothesis_slack", ds.lyapunov.hypothesis_slack);
    if (d.contains("pattern_level") && !d.at("pattern_level").is_null())
      ds.pattern_level = d.at("pattern_level").get<double>();
    c.diagnostics = ds;
  }

  c.display_times = get_or(j, "display_times", std::vector<double>{});
  c.K = get_or(j, "K", c.K);
  if (j.contains("u0_sup") && !j.at("u0_sup").is_null()) c.u0_sup = j.at("u0_sup").get<double>();
  c.G = get_or(j, "G", c.G);
  c.N = get_or(j, "N", c.N);
  if (j.contains("m") && !j.at("m").is_null()) c.m = j.at("m").get<int>();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = io::read_text(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text);
}

std::string serialize_config(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["alpha"] = c.params.alpha;
  j["beta"] = c.params.beta;
  j["mu"] = c.params.mu;
  j["kappa"] = c.params.kappa;
  j["diffusion"] = c.params.diffusion;
  j["kernel"] = kernel_to_json(c.kernel);
  j["grid"] = {{"x_left", c.grid.x_left},
               {"x_right", c.grid.x_right},
               {"n_cells", c.grid.n_cells},
               {"boundary", c.grid.periodic ? "periodic" : "dirichlet"},
               {"left_value", c.grid.left_value},
               {"right_value", c.grid.right_value}};
  json init{{"kind", initial_kind_name(c.initial.kind)},
            {"amplitude", c.initial.amplitude},
            {"wavenumber", c.initial.wavenumber},
            {"floor", c.initial.floor},
            {"level", c.initial.level},
            {"noise", c.initial.noise},
            {"seed", c.initial.seed}};
  if (!c.initial.values.empty()) init["values"] = c.initial.values;
  if (!c.initial.file.empty()) init["file"] = c.initial.file;
  j["initial"] = init;
  const SolverConfig& s = c.solver;
  j["solver"] = {{"dt_initial", s.dt_initial},
                 {"dt_min", s.dt_min},
                 {"cfl_safety", s.cfl_safety},
                 {"t_end", s.t_end},
                 {"blowup_threshold", s.blowup_threshold},
                 {"convolution", s.convolution_method == ConvolutionMethod::FFT ? "fft" : "direct"},
                 {"integrator", to_string(s.integrator)},
                 {"snapshot_stride", s.snapshot_stride},
                 {"output_times", s.output_times},
                 {"adaptive", s.adaptive},
                 {"saturation_fraction", s.saturation_fraction}};
  if (c.diagnostics) {
    const DiagnosticsSpec& d = *c.diagnostics;
    j["diagnostics"] = {{"a", d.a},
                        {"b", d.b},
                        {"tol", d.tol},
                        {"horizon", d.horizon},
                        {"monitor", d.monitor},
                        {"delta", d.lyapunov.delta},
                        {"interior_margin", d.lyapunov.interior_margin},
                        {"residual_c1", d.lyapunov.residual_c1},
                        {"residual_c2", d.lyapunov.residual_c2},
                        {"hypothesis_slack", d.lyapunov.hypothesis_slack},
                        {"pattern_level", d.pattern_level ? json(*d.pattern_level) : json(nullptr)}};
  }
  j["display_times"] = c.display_times;
  j["K"] = c.K;
  j["u0_sup"] = c.u0_sup ? json(*c.u0_sup) : json(nullptr);
  j["G"] = c.G;
  j["N"] = c.N;
  j["m"] = c.m ? json(*c.m) : json(nullptr);
  return j.dump(2);
}

std::vector<std::string> preset_names() {
  return {"fig1a", "fig1b", "fig1c", "fig1d", "fig1e", "fig1f", "fig1g", "fig1h", "fig1i", "fig2a", "fig2b",
          "fig2c", "fig3a", "fig3b", "fig3c", "fig3d", "fig3e", "fig3f", "fig4a", "fig4b", "fig4c", "fig4d",
          "fig5",  "fig6"};
}

ExperimentConfig preset(const std::string& name) {
  const Kernel U = Kernel::uniform();
  const Kernel L = Kernel::logistic();
  // Front data on [-5, 5] with u = 1 / 0 outside, beta = kappa = 1.
  if (name == "fig1a") return front_preset(name, 1.0, 1.0, 1.0, U);
  if (name == "fig1b") return front_preset(name, 3000.0, 1.0, 1.0, U);
  if (name == "fig1c") return front_preset(name, 2.8, 1.0, 0.0, U);
  if (name == "fig1d") return front_preset(name, 2.0, 10.0, 1.0, U);
  if (name == "fig1e") return front_preset(name, 6.0, 10.0, 1.0, U);
  if (name == "fig1f") return front_preset(name, 1.9, 10.0, 0.0, U);
  if (name == "fig1g") return front_preset(name, 2.0, 100.0, 1.0, U);
  if (name == "fig1h") return front_preset(name, 2.56, 100.0, 1.0, U);
  if (name == "fig1i") return front_preset(name, 1.2, 100.0, 0.0, U);
  if (name == "fig2a") return front_preset(name, 4.22, 10.0, 1.0, L);
  if (name == "fig2b") return front_preset(name, 2.3, 100.0, 1.0, L);
  if (name == "fig2c") return front_preset(name, 3.0, 1.0, 0.0, L);
  // Oscillatory bump on a periodic domain of length 10.
  if (name == "fig3a") {
    ExperimentConfig c = bump_preset(name, 1.5, 1.0, 1.0, 1.0, U, 1.0);
    c.display_times = {0.0};
    return c;
  }
  if (name == "fig3b") return bump_preset(name, 1.5, 1.0, 1.0, 1.0, U, 50.0);
  if (name == "fig3c") return bump_preset(name, 1.5, 1.0, 1.0, 50.0, U, 50.0);
  if (name == "fig3d") return bump_preset(name, 1.5, 1.0, 1.0, 150.0, U, 50.0);
  if (name == "fig3e") return bump_preset(name, 2.0, 1.0, 1.0, 150.0, U, 50.0);
  if (name == "fig3f") return bump_preset(name, 4.0, 1.0, 1.0, 150.0, U, 50.0);
  if (name == "fig4a") return bump_preset(name, 1.5, 1.0, 1.0, 1.0, L, 50.0);
  if (name == "fig4b") return bump_preset(name, 1.5, 1.0, 1.0, 50.0, L, 50.0);
  if (name == "fig4c") return bump_preset(name, 1.5, 1.0, 1.0, 150.0, L, 50.0);
  if (name == "fig4d") return bump_preset(name, 3.8, 1.0, 1.0, 150.0, L, 50.0);
  if (name == "fig5") {
    ExperimentConfig c = bump_preset(name, 1.1, 0.1, 0.2, 150.0, U, 100.0);
    c.display_times = {0.0, 1.25, 100.0};
    return c;
  }
  if (name == "fig6") {
    ExperimentConfig c = bump_preset(name, 1.09, 0.1, 0.01, 48.0, U, 100.0);
    // The constant state here is 0.01^-10 = 1e20, above the default threshold.
    c.solver.blowup_threshold = 1e30;
    c.display_times = {0.0, 1.295, 100.0};
    return c;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Grid1D grid = config.grid.build();
  const Field u0 = make_initial(config.initial, grid);
  if (config.diagnostics && !(u0.inf() > 0.0))
    throw ConfigError("diagnostics need strictly positive initial data");
  SolverConfig sc = config.solver;
  for (double t : config.resolved_display_times()) sc.output_times.push_back(t);

  ExperimentResult r;
  r.outcome = run(u0, config.params, config.kernel, sc);
  if (config.diagnostics) {
    const DiagnosticsSpec& d = *config.diagnostics;
    r.hair_trigger =
        hair_trigger_diagnose(r.outcome, config.params, d.a, d.b, d.tol, d.horizon, d.lyapunov.delta);
    if (d.monitor) r.residuals = monitor_inequality(r.outcome, config.params, config.kernel, d.lyapunov);
  }
  const double level = config.diagnostics && config.diagnostics->pattern_level ? *config.diagnostics->pattern_level
                                                                               : steady_state(config.params);
  r.final_pattern = pattern_metrics(r.outcome.final_field(), level);
  return r;
}

std::string diagnostics_json(const ExperimentConfig& config, const ExperimentResult& r) {
  const RunOutcome& o = r.outcome;
  json j;
  j["name"] = config.name;
  j["status"] = to_string(o.status);
  j["reason"] = to_string(o.reason);
  j["event_time"] = o.blew_up() ? json(o.event_time) : json(nullptr);
  j["event_location"] = o.blew_up() ? json(o.event_location) : json(nullptr);
  j["final_time"] = o.final_field().time();
  j["final_sup"] = o.final_field().sup_abs();
  j["final_inf"] = o.final_field().inf();
  j["accepted_steps"] = o.accepted_steps;
  j["rejected_steps"] = o.rejected_steps;
  j["clamped_count"] = o.clamped_count;
  j["hair_trigger"] = r.hair_trigger ? hair_trigger_to_json(*r.hair_trigger) : json(nullptr);
  j["lyapunov_residuals"] = r.residuals ? residuals_to_json(*r.residuals) : json(nullptr);
  j["pattern"] = pattern_to_json(r.final_pattern);
  return j.dump(2);
}

std::string diagnose_snapshots_json(const ExperimentConfig& config, const std::vector<Field>& snapshots) {
  if (snapshots.empty()) throw ConfigError("no snapshots to diagnose");
  const DiagnosticsSpec d = config.diagnostics.value_or(DiagnosticsSpec{});
  json j;
  j["hair_trigger"] =
      hair_trigger_to_json(hair_trigger_diagnose(snapshots, config.params, d.a, d.b, d.tol, d.horizon, d.lyapunov.delta));
  const ResidualReport res = monitor_inequality(snapshots, config.params, config.kernel, d.lyapunov);
  json summary = residuals_to_json(res);
  j["lyapunov_residuals"] = summary["pairs"];
  summary.erase("pairs");
  j["lyapunov_summary"] = summary;
  const double level = d.pattern_level ? *d.pattern_level : steady_state(config.params);
  json pattern = json::array();
  for (const Field& f : snapshots) {
    json p = pattern_to_json(pattern_metrics(f, level));
    p["t"] = f.time();
    pattern.push_back(p);
  }
  j["pattern"] = pattern;
  return j.dump(2);
}

void write_artifacts(const ExperimentConfig& config, const ExperimentResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  io::write_snapshots_ndjson(dir / "snapshots.ndjson", r.outcome.snapshots);
  io::write_summary_csv(dir / "summary.csv", r.outcome.history);
  io::write_profile_csv(dir / "profile.csv", r.outcome.snapshots, config.resolved_display_times());
  io::write_text(dir / "diagnostics.json", diagnostics_json(config, r) + "\n");
  io::write_text(dir / "config.json", serialize_config(config) + "\n");
}

ExperimentResult run_preset(const std::string& name, const std::filesystem::path& out_root) {
  const ExperimentConfig c = preset(name);
  ExperimentResult r = run_experiment(c);
  write_artifacts(c, r, out_root / name);
  return r;
}

BoundInputs bound_inputs(const ExperimentConfig& c) {
  BoundInputs in;
  in.N = c.N;
  in.alpha = c.params.alpha;
  in.beta = c.params.beta;
  in.kappa = c.params.kappa;
  if (c.kernel.shape() == KernelShape::Dirac) throw ConfigError("the Dirac kernel has no (delta0, eta) constants");
  in.delta0 = c.kernel.delta0();
  in.eta = c.kernel.eta();
  in.G = c.G;
  in.K = c.K;
  in.u0_sup = c.u0_sup ? *c.u0_sup : make_initial(c.initial, c.grid.build()).sup_abs();
  in.m = c.m;
  return in;
}

std::string bound_report_json(const BoundReport& r) {
  json j;
  j["alpha_star"] = r.alpha_star;
  j["s_star"] = std::isinf(r.s_star) ? json("infinity") : json(r.s_star);
  j["A"] = r.A;
  j["exponent"] = r.exponent;
  j["M"] = r.M;
  j["mu_star"] = r.mu_star ? json(*r.mu_star) : json(nullptr);
  j["mu_star_note"] = r.mu_star_note;
  j["inputs"] = {{"N", r.inputs.N},         {"alpha", r.inputs.alpha}, {"beta", r.inputs.beta},
                 {"kappa", r.inputs.kappa}, {"delta0", r.inputs.delta0}, {"eta", r.inputs.eta},
                 {"G", r.inputs.G},         {"K", r.inputs.K},         {"u0_sup", r.inputs.u0_sup}};
  j["G_note"] = "G(s*, N) is a user-supplied Sobolev constant (default 1); M scales monotonically with it";
  return j.dump(2);
}

int sweep_concurrency() {
  if (const char* env = std::getenv("NLFKPP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
    throw ConfigError(std::string("NLFKPP_THREADS must be a positive integer, got '") + env + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ExperimentConfig with_parameter(const ExperimentConfig& base, const std::string& param, double value) {
  ExperimentConfig c = base;
  if (param == "alpha") c.params.alpha = value;
  else if (param == "beta") c.params.beta = value;
  else if (param == "mu") c.params.mu = value;
  else if (param == "kappa") c.params.kappa = value;
  else if (param == "diffusion") c.params.diffusion = value;
  else if (param == "sigma") c.kernel = c.kernel.with_sigma(value);
  else throw ConfigError("cannot sweep unknown parameter '" + param + "'");
  return c;
}

namespace {

std::vector<SweepPoint> run_batch(const ExperimentConfig& base, const std::string& param,
                                  const std::vector<double>& values, int threads) {
  std::vector<SweepPoint> out(values.size());
  const Grid1D grid = base.grid.build();
  const Field u0 = make_initial(base.initial, grid);
  auto work = [&](std::size_t i) {
    const ExperimentConfig c = with_parameter(base, param, values[i]);
    SolverConfig sc = c.solver;
    sc.snapshot_stride = 0;
    sc.output_times.clear();
    const RunOutcome o = run(u0, c.params, c.kernel, sc);
    out[i] = SweepPoint{values[i], o.status, o.reason, o.blew_up() ? o.event_time : o.final_field().time()};
  };
  const int workers = std::min<int>(threads, static_cast<int>(values.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < values.size(); ++i) work(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      // Each run owns one core; nested node parallelism would oversubscribe.
      omp_set_num_threads(1);
      try {
        for (std::size_t i; (i = next.fetch_add(1)) < values.size();) work(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace

SweepReport sweep(const ExperimentConfig& base, const SweepSpec& spec) {
  base.validate();
  (void)with_parameter(base, spec.param, 1.0);
  const int threads = spec.threads > 0 ? spec.threads : sweep_concurrency();
  SweepReport rep;
  rep.mode = spec.mode;
  rep.param = spec.param;

  if (spec.mode == SweepMode::Scan) {
    if (spec.values.empty()) throw ConfigError("scan mode needs a list of values");
    std::vector<double> values = spec.values;
    std::sort(values.begin(), values.end());
    rep.points = run_batch(base, spec.param, values, threads);
    return rep;
  }

  if (!(spec.lo < spec.hi)) throw ConfigError("bisection needs lo < hi");
  if (!(spec.tol > 0.0)) throw ConfigError("bisection needs tol > 0");
  auto ends = run_batch(base, spec.param, {spec.lo, spec.hi}, threads);
  rep.points = ends;
  rep.bracket_lo = spec.lo;
  rep.bracket_hi = spec.hi;
  if (ends[0].blew_up() || !ends[1].blew_up()) {
    rep.in_range = false;
    std::ostringstream os;
    os << "threshold outside range [" << spec.lo << ", " << spec.hi << "]: "
       << (ends[0].blew_up() ? "blow-up already at the lower end" : "bounded at the upper end");
    rep.message = os.str();
    return rep;
  }
  double lo = spec.lo, hi = spec.hi;
  // k-section: each round probes `threads` equally spaced interior points.
  while (hi - lo > spec.tol) {
    const int k = std::max(1, threads);
    std::vector<double> probes;
    for (int i = 1; i <= k; ++i) probes.push_back(lo + (hi - lo) * i / (k + 1));
    const auto pts = run_batch(base, spec.param, probes, threads);
    rep.points.insert(rep.points.end(), pts.begin(), pts.end());
    double new_lo = lo, new_hi = hi;
    for (const auto& p : pts) {
      if (p.blew_up()) {
        new_hi = p.value;
        break;
      }
      new_lo = p.value;
    }
    lo = new_lo;
    hi = new_hi;
  }
  std::sort(rep.points.begin(), rep.points.end(), [](const SweepPoint& a, const SweepPoint& b) { return a.value < b.value; });
  rep.bracket_lo = lo;
  rep.bracket_hi = hi;
  rep.threshold = hi;
  return rep;
}

std::string sweep_report_json(const SweepReport& r) {
  json pts = json::array();
  for (const auto& p : r.points)
    pts.push_back({{"value", p.value},
                   {"status", to_string(p.status)},
                   {"reason", to_string(p.reason)},
                   {"time", p.event_time}});
  json j{{"mode", r.mode == SweepMode::Bisect ? "bisect" : "scan"}, {"param", r.param}, {"points", pts}};
  if (r.mode == SweepMode::Bisect) {
    j["in_range"] = r.in_range;
    j["bracket"] = {r.bracket_lo, r.bracket_hi};
    j["threshold"] = r.threshold ? json(*r.threshold) : json(nullptr);
    if (!r.message.empty()) j["message"] = r.message;
  }
  return j.dump(2);
}

}  // namespace nlfkpp
