#include "floqscar/cli.hpp"

#include "floqscar/errors.hpp"
#include "floqscar/evolve.hpp"
#include "floqscar/floquet.hpp"
#include "floqscar/graph.hpp"
#include "floqscar/io.hpp"
#include "floqscar/observables.hpp"
#include "floqscar/perturbation.hpp"
#include "floqscar/validation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <ostream>

namespace floqscar {

namespace {

using Json = nlohmann::ordered_json;

template <class T>
Json json_value(const T& v) {
  return Json(v);
}

template <class T>
Json json_value(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::string text_value(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return format_double(v.get<double>());
  return v.dump();
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ParameterError(message);
}

double parse_number(std::string_view text, std::string_view what) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc() || ptr != text.data() + text.size()) throw ParseError("bad number in " + std::string(what));
  return x;
}

} // namespace

double RunConfig::drive_omega() const {
  return omega_sqrt2_mult ? *omega_sqrt2_mult * std::numbers::sqrt2 : omega;
}

DriveProtocol RunConfig::protocol() const {
  if (u) return DriveProtocol::constant(*u);
  return DriveProtocol(u0, um, drive_omega());
}

void RunConfig::validate() const {
  require(L >= 2 && L % 2 == 0, "L must be even and at least 2");
  require(L <= 12, "L above 12 is beyond the dense routines");
  for (double x : {delta, J, u0, um, omega, t_end, sample_dt, steps_per_unit, tau, tau_f, omega_min, omega_max,
                   floor_factor, relative_floor, window_sigmas, tol, weight_floor, u_target, line_step})
    require(std::isfinite(x), "all numeric parameters must be finite");
  if (u) require(std::isfinite(*u), "u must be finite");
  if (omega_sqrt2_mult) require(std::isfinite(*omega_sqrt2_mult) && *omega_sqrt2_mult > 0.0, "omega-sqrt2-mult must be positive");
  require(drive_omega() > 0.0, "omega must be positive");
  require(steps_per_unit >= 1.0, "steps-per-unit must be at least 1");
  require(t_end > 0.0 && sample_dt > 0.0, "t-end and sample-dt must be positive");
  require(tau > 0.0 && tau_f > 0.0, "tau and tau-f must be positive");
  require(omega_max > omega_min && omega_min >= 0.0, "need 0 <= omega-min < omega-max");
  require(bins >= 3, "bins must be at least 3");
  require(tol > 0.0, "tol must be positive");
  require(omega_axis_unit == "sqrt2" || omega_axis_unit == "1", "omega-axis-unit is sqrt2 or 1");
  require(optimal == "line" || optimal == "emergence" || optimal == "fixed", "optimal is line, emergence or fixed");
  require(line_step > 0.0, "line-step must be positive");
  require(format == "dot" || format == "json" || format == "both", "format is dot, json or both");
}

Axis parse_axis(std::string_view name, std::string_view text) {
  const auto a = text.find(':');
  const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
  if (b == std::string_view::npos) throw ParseError("axis '" + std::string(name) + "' must be min:max:points");
  Axis axis{std::string(name), parse_number(text.substr(0, a), name), parse_number(text.substr(a + 1, b - a - 1), name),
            0};
  const auto pts = parse_number(text.substr(b + 1), name);
  if (pts < 1 || pts != std::floor(pts)) throw ParseError("axis '" + std::string(name) + "' needs a positive point count");
  axis.points = static_cast<int>(pts);
  if (!std::isfinite(axis.min) || !std::isfinite(axis.max) || (axis.points > 1 && !(axis.max > axis.min)))
    throw ParameterError("axis '" + std::string(name) + "' must have finite min < max");
  return axis;
}

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv("FLOQSCAR_OUTPUT_DIR"); env && *env) return env;
  return "floqscar-out";
}

namespace {

class Registry {
public:
  explicit Registry(CLI::App& app) : app_(app) {}

  template <class T>
  CLI::Option* option(const std::string& name, T& ref, const std::string& help) {
    fields_.emplace_back(name, [&ref] { return json_value(ref); });
    return app_.add_option("--" + name, ref, help)->capture_default_str();
  }

  CLI::Option* flag(const std::string& name, bool& ref, const std::string& help) {
    fields_.emplace_back(name, [&ref] { return Json(ref); });
    return app_.add_flag("--" + name, ref, help);
  }

  Json to_json() const {
    Json out = Json::object();
    for (const auto& [name, get] : fields_) out[name] = get();
    return out;
  }

private:
  CLI::App& app_;
  std::vector<std::pair<std::string, std::function<Json()>>> fields_;
};

std::string tag(std::initializer_list<std::pair<const char*, double>> items) {
  std::string out;
  for (const auto& [key, value] : items) {
    if (!out.empty()) out += '_';
    out += key + format_double(value);
  }
  return out;
}

struct Job {
  const RunConfig& cfg;
  std::filesystem::path dir;
  std::ostream& out;
  Json outputs = Json::array();
  Json results = Json::object();

  std::filesystem::path file(const std::string& name) {
    outputs.push_back(name);
    return dir / name;
  }

  std::string drive_tag() const {
    if (cfg.u) return tag({{"L", cfg.L}, {"delta", cfg.delta}, {"U", *cfg.u}});
    return tag({{"L", cfg.L}, {"delta", cfg.delta}, {"u0", cfg.u0}, {"um", cfg.um}, {"omega", cfg.drive_omega()}});
  }

  HamiltonianParts parts() const { return build_parts(half_filled_space(cfg.L), cfg.J, cfg.delta); }

  TowerOptions tower_options() const {
    return {cfg.bins, cfg.floor_factor, cfg.relative_floor, cfg.window_sigmas};
  }

  FourierOptions fourier_options() const { return {cfg.tau_f, cfg.omega_min, cfg.omega_max}; }

  ScanSettings scan_settings() const {
    ScanSettings s;
    s.sites = cfg.L;
    s.J = cfg.J;
    s.delta = cfg.delta;
    s.scar_state = cfg.psi;
    s.thermal_state = cfg.thermal;
    s.tau = cfg.tau;
    s.sample_dt = cfg.sample_dt;
    s.steps_per_unit = cfg.steps_per_unit;
    s.fourier = fourier_options();
    s.threads = cfg.threads;
    return s;
  }

  Json towers_json(const ScarTowers& towers) const {
    Json centers = Json::array();
    for (const auto& c : towers.centers) centers.push_back({{"energy", c.energy}, {"overlap", c.overlap}});
    return {{"count", towers.centers.size()},
            {"spacing", std::isfinite(towers.spacing) ? Json(towers.spacing) : Json(nullptr)},
            {"structured", towers.structured()},
            {"centers", centers}};
  }
};

void cmd_evolve(Job& job) {
  const auto& cfg = job.cfg;
  const auto parts = job.parts();
  const auto psi0 = fock_state(parts.space, resolve_state(cfg.psi, cfg.L));
  EvolveOptions opts;
  opts.steps_per_unit = cfg.steps_per_unit;
  opts.stepper = parse_stepper(cfg.stepper);
  opts.record_entropy = !cfg.skip_entropy;
  opts.record_imbalance = !cfg.skip_imbalance;
  const auto samples = uniform_samples(0.0, cfg.t_end, cfg.sample_dt);
  const auto traj = evolve(psi0, parts, cfg.protocol(), cfg.t_end, samples, opts);
  write_trajectory_csv(job.file("trajectory_" + job.drive_tag() + "_psi-" + cfg.psi + ".csv"), traj);

  job.results["first_revival"] = std::isfinite(first_revival_time(traj)) ? Json(first_revival_time(traj)) : Json(nullptr);
  if (cfg.t_end >= cfg.tau) job.results["average_fidelity"] = average_fidelity(traj, cfg.tau);
  if (cfg.t_end >= cfg.tau_f) {
    const auto fo = job.fourier_options();
    write_fourier_csv(job.file("fourier_" + job.drive_tag() + "_psi-" + cfg.psi + ".csv"), traj, fo);
    const auto peak = fourier_revival(traj, fo);
    job.results["fourier_peak"] = {{"omega_r", peak.omega}, {"magnitude", peak.magnitude}, {"real_part", peak.real_part}};
  }
  job.out << "samples " << traj.size() << '\n';
  for (const auto& [key, value] : job.results.items()) job.out << key << ' ' << value.dump() << '\n';
}

void cmd_spectrum(Job& job) {
  const auto& cfg = job.cfg;
  const double U = cfg.u ? *cfg.u : cfg.u0;
  const auto parts = job.parts();
  const auto spec = static_spectrum(parts, U, fock_state(parts.space, resolve_state(cfg.psi, cfg.L)));
  const auto towers = detect_towers(spec, job.tower_options());
  const auto [lo, hi] = overlap_window(spec, cfg.window_sigmas);
  write_spectrum_csv(job.file("spectrum_" + tag({{"L", cfg.L}, {"delta", cfg.delta}, {"U", U}}) + "_psi-" + cfg.psi + ".csv"),
                     spec.energies, spec.overlaps, towers, "energy");
  job.results["window"] = {lo, hi};
  job.results["towers"] = job.towers_json(towers);
  job.out << "towers " << towers.centers.size() << " spacing " << format_double(towers.spacing) << '\n';
}

void cmd_floquet(Job& job) {
  const auto& cfg = job.cfg;
  const auto parts = job.parts();
  const auto protocol = cfg.protocol();
  require(!cfg.u, "floquet needs a drive (u0, um, omega), not a static u");
  const FloquetOperator op(parts, protocol);
  const auto spec = quasienergy_spectrum(op, fock_state(parts.space, resolve_state(cfg.psi, cfg.L)), false);
  const auto towers = detect_towers(spec, job.tower_options());
  write_spectrum_csv(job.file("quasienergy_" + job.drive_tag() + "_psi-" + cfg.psi + ".csv"), spec.quasienergies,
                     spec.overlaps, towers, "quasienergy");
  job.results["towers"] = job.towers_json(towers);
  if (std::isfinite(towers.spacing)) job.results["spacing_over_omega"] = towers.spacing / protocol.omega();
  job.out << "towers " << towers.centers.size() << " spacing " << format_double(towers.spacing) << '\n';
}

void cmd_perturb(Job& job) {
  const auto& cfg = job.cfg;
  const double omega = cfg.drive_omega();
  const double u0 = cfg.k ? cfg.delta - *cfg.k * omega + cfg.n * omega : cfg.u0;
  const DriveProtocol protocol(u0, cfg.um, omega);
  const auto parts = job.parts();
  const std::size_t ref = parts.space.index_of_label(format_label(resolve_state(cfg.reference, cfg.L)));
  const auto set = build_degenerate_set(ref, parts, protocol, cfg.tol);
  const auto name = tag({{"L", cfg.L}, {"delta", cfg.delta}, {"u0", u0}, {"um", cfg.um}, {"omega", omega}});
  write_degenerate_set_csv(job.file("degenerate_set_" + name + ".csv"), set, parts);
  const auto block = perturbative_floquet_block(set, parts, protocol);
  const auto towers = detect_towers(block.quasienergies, block.overlaps, -0.5 * omega, 0.5 * omega, job.tower_options());
  write_spectrum_csv(job.file("perturbative_" + name + ".csv"), block.quasienergies, block.overlaps, towers,
                     "quasienergy");
  job.results["u0"] = u0;
  job.results["members"] = set.size();
  job.results["doublon_histogram"] = set.doublon_histogram();
  job.results["towers"] = job.towers_json(towers);
  job.out << "members " << set.size() << " u0 " << format_double(u0) << '\n';
}

void cmd_graph(Job& job) {
  const auto& cfg = job.cfg;
  const auto branch = parse_branch(cfg.branch);
  const double U = cfg.u ? *cfg.u : (branch == EffectiveBranch::Minus ? cfg.u0 - cfg.um : cfg.u0 + cfg.um);
  const auto space = half_filled_space(cfg.L);
  const Eigen::MatrixXd h = build_effective(space, cfg.J, cfg.delta, U, branch);
  const std::vector<std::size_t> refs{space.index_of_label(format_label(resolve_state("s", cfg.L))),
                                      space.index_of_label(format_label(resolve_state("s-flip", cfg.L)))};
  const auto graph = build_adjacency(h, space, doublon_free_states(space), refs, cfg.weight_floor);
  const auto name = "graph_" + cfg.branch + "_" + job.drive_tag();
  for (const auto& [fmt, ext] : {std::pair{GraphFormat::Dot, "dot"}, std::pair{GraphFormat::Json, "json"}}) {
    if (cfg.format != "both" && cfg.format != ext) continue;
    std::ofstream f(job.file(name + "." + ext));
    f << export_graph(graph, fmt);
  }
  job.results["U"] = U;
  job.results["vertices"] = graph.vertices.size();
  job.results["edges"] = graph.edges.size();
  job.out << "vertices " << graph.vertices.size() << " edges " << graph.edges.size() << '\n';
}

Json grid_summary(const ScanGrid& grid) {
  std::size_t failed = 0;
  std::size_t below = 0;
  for (const auto& c : grid.cells) {
    failed += c.failed;
    below += !c.failed && c.below_threshold;
  }
  Json out{{"cells", grid.cells.size()}, {"failed", failed}, {"below_threshold", below}};
  if (failed < grid.cells.size()) {
    const auto& best = find_optimal_u0(grid);
    out["optimum"] = {{"u0", best.u0}, {"um", best.um}, {"omega", best.omega}, {"rho", best.rho}};
  }
  return out;
}

void cmd_scan_u0um(Job& job) {
  const auto& cfg = job.cfg;
  const ScanContext ctx(job.scan_settings());
  const double omega = cfg.drive_omega();
  const auto grid = scan_u0_um(ctx, omega, parse_axis("u0", cfg.u0_axis), parse_axis("um", cfg.um_axis));
  write_scan_csv(job.file("scan_u0um_" + tag({{"L", cfg.L}, {"delta", cfg.delta}, {"omega", omega}}) + ".csv"), grid);
  job.results = grid_summary(grid);
  job.out << job.results.dump() << '\n';
}

Axis omega_axis(const RunConfig& cfg) {
  Axis axis = parse_axis("omega", cfg.omega_axis);
  if (cfg.omega_axis_unit == "sqrt2") {
    axis.min *= std::numbers::sqrt2;
    axis.max *= std::numbers::sqrt2;
  }
  return axis;
}

LineSearch line_search(const RunConfig& cfg) {
  return {cfg.optimal == "emergence" ? LineCandidates::Emergence : LineCandidates::Grid, cfg.line_step};
}

void cmd_scan_omega(Job& job) {
  const auto& cfg = job.cfg;
  const ScanContext ctx(job.scan_settings());
  const auto axis = omega_axis(cfg);
  std::function<double(double)> choose = [&](double) { return cfg.u0; };
  if (cfg.optimal != "fixed")
    choose = [&](double w) { return optimal_u0_on_line(ctx, w, cfg.u_target, line_search(cfg)).u0; };
  const auto grid = scan_omega_um(ctx, axis, parse_axis("um", cfg.um_axis), choose);
  write_scan_csv(job.file("scan_omega_" + tag({{"L", cfg.L}, {"delta", cfg.delta}}) + ".csv"), grid);
  job.results = grid_summary(grid);
  job.out << job.results.dump() << '\n';
}

void cmd_period_doubling(Job& job) {
  const auto& cfg = job.cfg;
  const ScanContext ctx(job.scan_settings());
  const auto rows = period_doubling_check(ctx, omega_axis(cfg).values(), cfg.u_target, line_search(cfg));
  write_period_doubling_csv(
      job.file("period_doubling_" + tag({{"L", cfg.L}, {"delta", cfg.delta}, {"U", cfg.u_target}}) + ".csv"), rows);
  std::size_t halved = 0;
  for (const auto& r : rows) {
    halved += r.ratio >= 0.45 && r.ratio <= 0.55;
    job.out << format_double(r.omega) << ' ' << format_double(r.ratio) << '\n';
  }
  job.results["rows"] = rows.size();
  job.results["ratio_near_half"] = halved;
}

void cmd_validate(Job& job) {
  const auto checks = run_validation_suite();
  print_checks(job.out, checks);
  CsvWriter csv(job.file("validation.csv"), {"check", "passed", "measured", "threshold"});
  for (const auto& c : checks) csv.cell(c.name).cell(c.passed).cell(c.measured).cell(c.threshold).end_row();
  job.results["passed"] = all_passed(checks);
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Tilted Fermi-Hubbard ring under square-wave interaction drive", "floqscar"};
  app.set_config("--config", "", "key=value file mirroring the flag names; flags take precedence");
  app.require_subcommand(1, 1);
  Registry reg(app);

  reg.option("L", cfg.L, "number of sites (even)");
  reg.option("delta", cfg.delta, "tilt");
  reg.option("J", cfg.J, "hopping");
  reg.option("psi", cfg.psi, "initial state: s, s-flip, doublon, doublon-flip, th or a label");
  reg.option("thermal", cfg.thermal, "thermal reference state for scans");
  reg.option("u", cfg.u, "static interaction (disables the drive)");
  reg.option("u0", cfg.u0, "mean interaction");
  reg.option("um", cfg.um, "drive amplitude");
  reg.option("omega", cfg.omega, "drive frequency");
  reg.option("omega-sqrt2-mult", cfg.omega_sqrt2_mult, "drive frequency as a multiple of sqrt 2");
  reg.option("t-end", cfg.t_end, "evolution horizon");
  reg.option("sample-dt", cfg.sample_dt, "observable sampling interval");
  reg.option("steps-per-unit", cfg.steps_per_unit, "time steps per unit time");
  reg.option("stepper", cfg.stepper, "trotter, rk4 or exact");
  reg.flag("skip-entropy", cfg.skip_entropy, "do not record the half-chain entropy");
  reg.flag("skip-imbalance", cfg.skip_imbalance, "do not record the imbalance");
  reg.option("tau", cfg.tau, "fidelity-average horizon");
  reg.option("tau-f", cfg.tau_f, "Fourier horizon");
  reg.option("omega-min", cfg.omega_min, "lower edge of the Fourier search");
  reg.option("omega-max", cfg.omega_max, "upper edge of the Fourier search");
  reg.option("bins", cfg.bins, "tower-detection bins");
  reg.option("floor-factor", cfg.floor_factor, "tower floor in units of the mean overlap");
  reg.option("relative-floor", cfg.relative_floor, "tower floor as a fraction of the largest overlap");
  reg.option("window-sigmas", cfg.window_sigmas, "static tower window half-width in energy spreads");
  reg.option("k", cfg.k, "perturb: u0 = delta - k omega + n omega");
  reg.option("n", cfg.n, "perturb: see k");
  reg.option("tol", cfg.tol, "degeneracy tolerance on the period phase");
  reg.option("reference", cfg.reference, "perturb: reference Fock state");
  reg.option("branch", cfg.branch, "graph: effective Hamiltonian, plus or minus");
  reg.option("format", cfg.format, "graph: dot, json or both");
  reg.option("weight-floor", cfg.weight_floor, "graph: smallest edge weight kept");
  reg.option("u0-axis", cfg.u0_axis, "scan axis min:max:points");
  reg.option("um-axis", cfg.um_axis, "scan axis min:max:points");
  reg.option("omega-axis", cfg.omega_axis, "scan axis min:max:points");
  reg.option("omega-axis-unit", cfg.omega_axis_unit, "sqrt2 or 1");
  reg.option("optimal", cfg.optimal,
             "u0 choice: line (grid on um = u-target - u0), emergence (emergence values on that line) or fixed");
  reg.option("line-step", cfg.line_step, "u0 grid step for the line search");
  reg.option("u-target", cfg.u_target, "u0 + um for the optimal-u0 line");
  reg.option("threads", cfg.threads, "worker cap for scans (0: all cores)");
  reg.option("output-dir", cfg.output_dir, "artifact directory (default $FLOQSCAR_OUTPUT_DIR or ./floqscar-out)");

  using Command = void (*)(Job&);
  const std::vector<std::tuple<std::string, std::string, Command>> commands{
      {"evolve", "time evolution and trajectory CSV", cmd_evolve},
      {"spectrum", "static exact diagonalisation and towers", cmd_spectrum},
      {"floquet", "quasienergy spectrum and towers", cmd_floquet},
      {"scan-u0um", "relative discrepancy over (u0, um)", cmd_scan_u0um},
      {"scan-omega", "relative discrepancy and revival over (omega, um)", cmd_scan_omega},
      {"perturb", "degenerate set and first-order Floquet block", cmd_perturb},
      {"graph", "adjacency graph of the doublon-free sector", cmd_graph},
      {"validate", "built-in invariant checks", cmd_validate},
      {"period-doubling", "driven-to-undriven revival frequency ratios", cmd_period_doubling},
  };
  for (const auto& [name, help, fn] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  cfg.subcommand = app.get_subcommands().front()->get_name();
  try {
    cfg.validate();
    const std::filesystem::path dir = cfg.output_dir.empty() ? default_output_dir() : std::filesystem::path(cfg.output_dir);
    std::filesystem::create_directories(dir);
    Job job{cfg, dir, out};
    for (const auto& [name, help, fn] : commands)
      if (name == cfg.subcommand) fn(job);

    const Json config = reg.to_json();
    {
      std::ofstream ini(dir / "run.ini");
      for (const auto& [key, value] : config.items())
        if (!value.is_null() && key != "output-dir") ini << key << '=' << text_value(value) << '\n';
    }
    Json manifest;
    manifest["program"] = "floqscar";
    manifest["version"] = std::string(version());
    manifest["subcommand"] = cfg.subcommand;
    manifest["rerun"] = "floqscar " + cfg.subcommand + " --config run.ini";
    manifest["config"] = config;
    manifest["outputs"] = job.outputs;
    manifest["results"] = job.results;
    write_json(dir / "manifest.json", manifest);
    if (cfg.subcommand == "validate" && !job.results["passed"].get<bool>()) return 1;
    return 0;
  } catch (const std::exception& e) {
    err << "floqscar " << cfg.subcommand << ": " << e.what() << '\n';
    return 2;
  }
}

} // namespace floqscar
