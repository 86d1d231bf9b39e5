// Acceptance run: one PASS/FAIL line per reproduction criterion.
//
//   acceptance [name ...] [--threads N] [--list]
//
// Without names every criterion runs. Exit status is the number of failures.

#include "floqscar/evolve.hpp"
#include "floqscar/floquet.hpp"
#include "floqscar/io.hpp"
#include "floqscar/observables.hpp"
#include "floqscar/perturbation.hpp"
#include "floqscar/scan.hpp"
#include "floqscar/validation.hpp"
#include "oracle/jordan_wigner.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

using namespace floqscar;

namespace {

const double kSqrt2 = std::numbers::sqrt2;
const double kPi = std::numbers::pi;
const double kTStar = kSqrt2 * kPi; // undriven revival period quoted for delta = U = 10

struct Outcome {
  bool passed;
  std::string summary;
};

struct Criterion {
  std::string name;
  std::function<Outcome()> run;
};

std::string fmt(double x, int digits = 5) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

bool within(double x, double target, double rel) { return std::abs(x - target) <= rel * std::abs(target); }

unsigned g_threads = 0;

HamiltonianParts parts_l8() { return build_parts(half_filled_space(8), 1.0, 10.0); }

StateMatrix scar_state(const HamiltonianParts& parts) {
  return fock_state(parts.space, resolve_state("s", parts.space.sites()));
}

Trajectory quench(const HamiltonianParts& parts, const DriveProtocol& d, double t_end, double dt = 0.02) {
  EvolveOptions opts;
  opts.record_entropy = false;
  opts.record_imbalance = false;
  const auto samples = uniform_samples(0.0, t_end, dt);
  return evolve(scar_state(parts), parts, d, t_end, samples, opts);
}

ScanSettings scan_settings() {
  ScanSettings s;
  s.threads = g_threads;
  return s;
}

Outcome dimension() {
  const auto dim = half_filled_space(8).dim();
  return {dim == 4900, "dim=" + std::to_string(dim) + " expected 4900"};
}

Outcome undriven_revival_time() {
  const auto parts = parts_l8();
  const double t = first_revival_time(quench(parts, DriveProtocol::constant(10.0), 10.0));
  return {within(t, kTStar, 0.05), "T*=" + fmt(t) + " target " + fmt(kTStar) + " +-5%"};
}

Outcome static_towers() {
  const auto parts = parts_l8();
  const auto spec = static_spectrum(parts, 10.0, scar_state(parts));
  const auto towers = detect_towers(spec);
  return {towers.structured() && within(towers.spacing, kSqrt2, 0.10),
          "towers=" + std::to_string(towers.centers.size()) + " spacing=" + fmt(towers.spacing) + " target " +
              fmt(kSqrt2) + " +-10%"};
}

Outcome driven_towers() {
  const auto parts = parts_l8();
  const double omega = 2.0 * kSqrt2;
  const DriveProtocol d(4.4, 5.6, omega);
  const auto spec = quasienergy_spectrum(FloquetOperator(parts, d), scar_state(parts), false);
  const auto towers = detect_towers(spec);
  const auto peak = fourier_revival(quench(parts, d, 100.0));
  const double t_r = 2.0 * kPi / peak.omega;
  const bool count_ok = towers.centers.size() == 4;
  const bool spacing_ok = within(towers.spacing, omega / 4.0, 0.10);
  const bool period_ok = within(t_r, 2.0 * kTStar, 0.10);
  return {count_ok && spacing_ok && period_ok,
          "towers=" + std::to_string(towers.centers.size()) + " (4) spacing=" + fmt(towers.spacing) + " target " +
              fmt(omega / 4.0) + " +-10%; T_r=2pi/omega_r=" + fmt(t_r) + " target " + fmt(2.0 * kTStar) + " +-10%"};
}

Outcome emergence_lines() {
  const ScanContext ctx(scan_settings());
  const double omega = 2.0 * kSqrt2;
  const Axis u0{"u0", 0.0, 10.0, 101};
  const auto grid = scan_u0_um(ctx, omega, u0, {"um", 5.6, 5.6, 1});
  std::vector<double> rho;
  for (int i = 0; i < u0.points; ++i) {
    const auto& c = grid.at(i, 0);
    rho.push_back(c.failed ? -INFINITY : c.rho);
  }
  const auto lines = emergence_conditions(10.0, omega, 0.0, 10.0);
  std::string maxima;
  int count = 0;
  bool all_on_lines = true;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const bool left = i == 0 || rho[i] > rho[i - 1];
    const bool right = i + 1 == rho.size() || rho[i] >= rho[i + 1];
    if (!left || !right || rho[i] < 1.0) continue;
    const double x = u0.at(static_cast<int>(i));
    double nearest = INFINITY;
    for (const auto& p : lines) nearest = std::min(nearest, std::abs(p.u0 - x));
    const bool on = nearest <= u0.step() + 1e-9;
    all_on_lines = all_on_lines && on;
    ++count;
    maxima += " " + fmt(x, 3) + "(rho=" + fmt(rho[i], 3) + (on ? ")" : ",off)");
  }
  std::string targets;
  for (const auto& p : lines) targets += " " + fmt(p.u0, 4);
  return {count >= 2 && all_on_lines,
          "maxima with rho>=1:" + maxima + "; lines:" + targets + "; step " + fmt(u0.step())};
}

Outcome undriven_ridge() {
  const ScanContext ctx(scan_settings());
  const Axis um{"um", 0.0, 1.3, 14};
  const auto grid = scan_u0_um(ctx, 4.0, {"u0", 10.0, 10.0, 1}, um);
  double lowest = INFINITY;
  double where = 0.0;
  for (const auto& c : grid.cells) {
    const double r = c.failed ? -INFINITY : c.rho;
    if (r < lowest) {
      lowest = r;
      where = c.um;
    }
  }
  return {lowest > 2.0, "min rho over um in [0, 1.3] (step 0.1) = " + fmt(lowest) + " at um=" + fmt(where, 3) +
                            "; need > 2"};
}

Outcome degenerate_set() {
  const auto parts = build_parts(half_filled_space(6), 1.0, 10.0);
  const double omega = 2.0 * kSqrt2;
  const DriveProtocol d(10.0 - 3.0 * omega, 5.6, omega);
  const auto set = build_degenerate_set(parts.space.index_of_label(format_label(resolve_state("s", 6))), parts, d);
  const auto hist = set.doublon_histogram();
  std::string split;
  for (auto h : hist) split += (split.empty() ? "" : "/") + std::to_string(h);
  return {set.size() == 63 && hist == std::vector<std::size_t>{20, 30, 12, 1},
          "members=" + std::to_string(set.size()) + " split " + split + " expected 63 = 20/30/12/1"};
}

Outcome fourier_reference() {
  const auto parts = parts_l8();
  const auto traj = quench(parts, DriveProtocol::constant(10.0), 100.0);
  const auto peak = fourier_revival(traj);
  const double target = 16.12;
  return {within(peak.magnitude, target, 0.10),
          "|f(omega*)|=" + fmt(peak.magnitude) + " Re f=" + fmt(peak.real_part) + " at omega*=" + fmt(peak.omega) +
              " target " + fmt(target) + " +-10% (trapezoid, dt=0.02, tau=100)"};
}

Outcome wannier_stark() {
  const auto parts = parts_l8();
  const auto traj = quench(parts, DriveProtocol::constant(0.0), 20.0, 0.005);
  const double spacing = mean_peak_spacing(traj, 0.5);
  return {within(spacing, 0.628, 0.02), "period=" + fmt(spacing) + " target 0.628 +-2% (2pi/delta=" +
                                            fmt(2.0 * kPi / 10.0) + ")"};
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

Outcome trotter_error_law() {
  const auto parts = parts_l8();
  const DriveProtocol d(4.4, 5.6, 2.0 * kSqrt2);
  const double t_end = 100.0;
  const auto samples = uniform_samples(0.0, t_end, 0.05);
  const auto ref = rk4_oracle(scar_state(parts), parts, d, t_end, 1.0 / 1000.0, samples);
  const std::vector<double> ns{25, 50, 100, 200, 400};
  std::vector<std::vector<double>> errors(3);
  for (double n : ns) {
    EvolveOptions opts;
    opts.steps_per_unit = n;
    opts.record_entropy = false;
    opts.record_imbalance = false;
    const auto tr = evolve(scar_state(parts), parts, d, t_end, samples, opts);
    errors[0].push_back(lp_error(tr, ref, Norm::L1, Quantity::Fidelity));
    errors[1].push_back(lp_error(tr, ref, Norm::L2, Quantity::Fidelity));
    errors[2].push_back(lp_error(tr, ref, Norm::LInf, Quantity::Fidelity));
  }
  bool ok = true;
  std::string text;
  const char* names[] = {"L1", "L2", "Linf"};
  for (int p = 0; p < 3; ++p) {
    const double s = fit_slope(ns, errors[static_cast<std::size_t>(p)]);
    ok = ok && std::abs(s + 1.0) <= 0.2;
    text += std::string(p ? "; " : "") + names[p] + " slope=" + fmt(s, 4) + " (n=400 err " +
            fmt(errors[static_cast<std::size_t>(p)].back(), 3) + ")";
  }
  return {ok, text + "; target -1 +-0.2, t=100, RK4 dt=1e-3"};
}

CheckResult bipartition_oracle() {
  const int L = 4;
  const oracle::JordanWigner jw(L, oracle::ModeOrder::SideMajor);
  int mismatches = 0;
  for (int nu = 0; nu <= L; ++nu)
    for (int nd = 0; nd <= L; ++nd) {
      const FockSpace space(L, nu, nd);
      const BipartitionMap map(space);
      const Eigen::MatrixXd emb = jw.sector_embedding(space);
      for (std::size_t i = 0; i < space.dim(); ++i) {
        const auto& e = map.entry(space.up_index(i), space.down_index(i));
        const Eigen::Index full = static_cast<Eigen::Index>(e.left) + (Eigen::Index{1} << L) * e.right;
        mismatches += emb(full, static_cast<Eigen::Index>(i)) != static_cast<double>(e.sign);
      }
    }
  return {"bipartition-sign-oracle", mismatches == 0, static_cast<double>(mismatches), 0.5, "all L=4 sectors"};
}

CheckResult hopping_oracle() {
  double worst = 0.0;
  for (int L = 2; L <= 4; ++L) {
    const oracle::JordanWigner jw(L, oracle::ModeOrder::SpinMajor);
    const auto full = oracle::hubbard_ring(jw, 1.3, 0.7, 2.1);
    for (int nu = 0; nu <= L; ++nu)
      for (int nd = 0; nd <= L; ++nd) {
        const FockSpace space(L, nu, nd);
        const Eigen::MatrixXd ours = assemble_full(build_parts(space, 1.3, 0.7), 2.1);
        const Eigen::MatrixXd theirs = oracle::project(full, jw.sector_embedding(space));
        worst = std::max(worst, (ours - theirs).cwiseAbs().maxCoeff());
      }
  }
  return {"hopping-jordan-wigner-oracle", worst < 1e-12, worst, 1e-12, "all sectors, L=2..4"};
}

Outcome property_suite() {
  auto checks = run_property_suite();
  checks.push_back(run_check("bipartition-sign-oracle", bipartition_oracle));
  checks.push_back(run_check("hopping-jordan-wigner-oracle", hopping_oracle));
  std::string failed;
  for (const auto& c : checks)
    if (!c.passed) failed += " " + c.name + "(" + fmt(c.measured, 3) + ")";
  return {failed.empty(), std::to_string(checks.size()) + " checks" + (failed.empty() ? ", all within bounds" : "; failed:" + failed)};
}

Outcome period_doubling() {
  const ScanContext ctx(scan_settings());
  std::vector<double> omegas;
  for (double m : {1.0, 1.5, 2.0, 2.5, 3.0}) omegas.push_back(m * kSqrt2);
  const auto start = std::chrono::steady_clock::now();
  const auto rows = period_doubling_check(ctx, omegas, 10.0);
  const double minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60.0;
  bool harmonic_ok = false;
  int halved = 0;
  std::string text;
  for (const auto& r : rows) {
    const bool is_sqrt2 = std::abs(r.omega - kSqrt2) < 1e-12;
    if (is_sqrt2)
      harmonic_ok = r.ratio >= 0.9 && r.ratio <= 1.1;
    else
      halved += r.ratio >= 0.45 && r.ratio <= 0.55;
    text += " " + fmt(r.omega / kSqrt2, 2) + "sqrt2:u0=" + fmt(r.u0, 4) + ",ratio=" + fmt(r.ratio, 4);
  }
  const bool fast = minutes < 5.0;
  return {harmonic_ok && halved >= 3 && fast,
          "rows" + text + "; sqrt2 ratio in [0.9,1.1]: " + (harmonic_ok ? "yes" : "no") + "; others in [0.45,0.55]: " +
              std::to_string(halved) + "/4 (need 3); runtime " + fmt(minutes, 3) + " min (limit 5)"};
}

} // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"dimension", dimension},
      {"undriven-revival", undriven_revival_time},
      {"static-towers", static_towers},
      {"driven-towers", driven_towers},
      {"emergence-lines", emergence_lines},
      {"undriven-ridge", undriven_ridge},
      {"degenerate-set", degenerate_set},
      {"fourier-reference", fourier_reference},
      {"wannier-stark", wannier_stark},
      {"trotter-error-law", trotter_error_law},
      {"property-suite", property_suite},
      {"period-doubling", period_doubling},
  };

  CLI::App app{"Reproduction acceptance checks", "acceptance"};
  std::vector<std::string> selected;
  bool list = false;
  app.add_option("names", selected, "criteria to run (default: all)");
  app.add_option("--threads", g_threads, "scan worker cap (0: all cores)");
  app.add_flag("--list", list, "print criterion names and exit");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& c : criteria) std::cout << c.name << '\n';
    return 0;
  }
  for (const auto& s : selected)
    if (std::none_of(criteria.begin(), criteria.end(), [&](const Criterion& c) { return c.name == s; })) {
      std::cerr << "unknown criterion " << s << '\n';
      return 64;
    }

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.name) == selected.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.passed;
    std::cout << (o.passed ? "PASS " : "FAIL ") << c.name << ": " << o.summary << " [" << fmt(sec, 3) << " s]"
              << std::endl;
  }
  return failures;
}
