#include "floqscar/scan.hpp"

#include "floqscar/errors.hpp"
#include "floqscar/io.hpp"
#include "floqscar/perturbation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace floqscar {

double Axis::at(int k) const {
  if (k < 0 || k >= points) throw ParameterError("axis index out of range");
  if (points == 1) return min;
  return min + (max - min) * static_cast<double>(k) / static_cast<double>(points - 1);
}

double Axis::step() const { return points > 1 ? (max - min) / static_cast<double>(points - 1) : 0.0; }

std::vector<double> Axis::values() const {
  std::vector<double> out;
  for (int k = 0; k < points; ++k) out.push_back(at(k));
  return out;
}

namespace {

void check_axis(const Axis& a) {
  if (a.points < 1) throw ParameterError("axis '" + a.name + "' needs at least one point");
  if (!std::isfinite(a.min) || !std::isfinite(a.max)) throw ParameterError("axis '" + a.name + "' is not finite");
  if (a.points > 1 && !(a.max > a.min)) throw ParameterError("axis '" + a.name + "' must have max > min");
}

} // namespace

ScanContext::ScanContext(ScanSettings settings)
    : settings_(std::move(settings)),
      parts_(build_parts(half_filled_space(settings_.sites), settings_.J, settings_.delta)),
      scar_(fock_state(parts_.space, resolve_state(settings_.scar_state, settings_.sites))),
      thermal_(fock_state(parts_.space, resolve_state(settings_.thermal_state, settings_.sites))) {
  if (!(settings_.tau > 0.0) || !(settings_.fourier.tau > 0.0)) throw ParameterError("horizons must be positive");
  if (!(settings_.sample_dt > 0.0)) throw ParameterError("sample interval must be positive");
}

Trajectory ScanContext::quench(const StateMatrix& psi0, const DriveProtocol& protocol, double horizon) const {
  const auto samples = uniform_samples(0.0, horizon, settings_.sample_dt);
  EvolveOptions opts;
  opts.steps_per_unit = settings_.steps_per_unit;
  opts.record_entropy = false;
  opts.record_imbalance = false;
  return evolve(psi0, parts_, protocol, horizon, samples, opts);
}

CellResult ScanContext::evaluate(const DriveProtocol& protocol, bool with_fourier) const {
  CellResult cell;
  cell.u0 = protocol.u0();
  cell.um = protocol.um();
  cell.omega = protocol.omega();
  try {
    const double horizon = with_fourier ? std::max(settings_.tau, settings_.fourier.tau) : settings_.tau;
    const auto scar = quench(scar_, protocol, horizon);
    const auto thermal = quench(thermal_, protocol, settings_.tau);
    cell.average_scar = average_fidelity(scar, settings_.tau);
    cell.average_thermal = average_fidelity(thermal, settings_.tau);
    if (!(cell.average_thermal >= settings_.min_thermal_average))
      throw NumericalError("thermal average below " + format_double(settings_.min_thermal_average));
    cell.rho = relative_discrepancy(cell.average_scar, cell.average_thermal);
    cell.below_threshold = cell.rho < 1.0;
    if (with_fourier) {
      cell.peak = fourier_revival(scar, settings_.fourier);
      cell.has_peak = true;
    }
  } catch (const std::exception& e) {
    cell.failed = true;
    cell.error = e.what();
  }
  return cell;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < n; k = next++) {
          try {
            fn(k);
          } catch (...) {
            const std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

const CellResult& ScanGrid::at(int i, int j) const {
  if (i < 0 || i >= first.points || j < 0 || j >= second.points) throw ParameterError("grid index out of range");
  return cells[static_cast<std::size_t>(i) * static_cast<std::size_t>(second.points) + static_cast<std::size_t>(j)];
}

bool ScanGrid::complete() const {
  return cells.size() == static_cast<std::size_t>(first.points) * static_cast<std::size_t>(second.points);
}

namespace {

ScanGrid run_grid(const ScanContext& ctx, const Axis& first, const Axis& second,
                  const std::function<DriveProtocol(double, double)>& protocol, bool with_fourier) {
  check_axis(first);
  check_axis(second);
  ScanGrid grid{first, second, {}};
  const auto n = static_cast<std::size_t>(first.points) * static_cast<std::size_t>(second.points);
  grid.cells.resize(n);
  parallel_for(n, ctx.settings().threads, [&](std::size_t k) {
    const auto i = static_cast<int>(k / static_cast<std::size_t>(second.points));
    const auto j = static_cast<int>(k % static_cast<std::size_t>(second.points));
    CellResult cell;
    try {
      cell = ctx.evaluate(protocol(first.at(i), second.at(j)), with_fourier);
    } catch (const std::exception& e) {
      cell.failed = true;
      cell.error = e.what();
    }
    grid.cells[k] = std::move(cell);
  });
  return grid;
}

} // namespace

ScanGrid scan_u0_um(const ScanContext& ctx, double omega, const Axis& u0, const Axis& um) {
  return run_grid(ctx, u0, um, [omega](double a, double b) { return DriveProtocol(a, b, omega); }, false);
}

const CellResult& find_optimal_u0(const ScanGrid& grid) {
  const CellResult* best = nullptr;
  for (const auto& c : grid.cells) {
    if (c.failed) continue;
    if (!best || c.rho > best->rho ||
        (c.rho == best->rho && (c.u0 < best->u0 || (c.u0 == best->u0 && c.um < best->um))))
      best = &c;
  }
  if (!best) throw ParameterError("no completed cells in the grid");
  return *best;
}

ScanGrid scan_omega_um(const ScanContext& ctx, const Axis& omega, const Axis& um,
                       const std::function<double(double)>& optimal_u0) {
  check_axis(omega);
  std::vector<double> u0(static_cast<std::size_t>(omega.points));
  for (int k = 0; k < omega.points; ++k) u0[static_cast<std::size_t>(k)] = optimal_u0(omega.at(k));
  return run_grid(
      ctx, omega, um,
      [&](double w, double m) {
        const auto k = static_cast<std::size_t>(std::lround((w - omega.min) / (omega.step() > 0 ? omega.step() : 1.0)));
        return DriveProtocol(u0[std::min(k, u0.size() - 1)], m, w);
      },
      true);
}

Response classify_response(double omega, double omega_r, double rel_tol, int k_max) {
  if (!(omega_r > 0.0) || !(omega > 0.0)) throw ParameterError("frequencies must be positive");
  for (int k = 1; k <= k_max; ++k) {
    const double target = omega / k;
    if (std::abs(omega_r - target) <= rel_tol * target)
      return {k == 1 ? ResponseKind::Harmonic : ResponseKind::Subharmonic, k};
  }
  return {ResponseKind::Incommensurate, 0};
}

std::string to_string(const Response& r) {
  switch (r.kind) {
  case ResponseKind::Harmonic: return "harmonic";
  case ResponseKind::Subharmonic: return "subharmonic(" + std::to_string(r.k) + ")";
  case ResponseKind::Incommensurate: return "incommensurate";
  }
  return "incommensurate";
}

bool flag_transition_state(const Trajectory& scar, const Trajectory& thermal, const ScarTowers& towers,
                           const TransitionThresholds& thresholds) {
  const double avg_s = average_fidelity(scar, thresholds.tau);
  const double avg_th = average_fidelity(thermal, thresholds.tau);
  if (!(avg_s > thresholds.min_average) || !(avg_th > thresholds.min_average)) return false;
  const auto [lo, hi] = std::minmax_element(scar.fidelity.begin(), scar.fidelity.end());
  if (!(*lo > thresholds.min_fidelity)) return false;
  // a frozen fidelity (no oscillation) is not a transition state
  if (!(*hi - *lo > thresholds.min_fidelity)) return false;
  return !towers.structured();
}

FourierPeak undriven_revival(const ScanContext& ctx, double U) {
  const auto traj = ctx.quench(ctx.scar_state(), DriveProtocol::constant(U), ctx.settings().fourier.tau);
  return fourier_revival(traj, ctx.settings().fourier);
}

OptimalChoice optimal_u0_on_line(const ScanContext& ctx, double omega, double u_target, const LineSearch& search) {
  if (!(u_target > 0.0) || !std::isfinite(u_target)) throw ParameterError("u_target must be positive");
  std::vector<double> candidates;
  if (search.candidates == LineCandidates::Grid) {
    if (!(search.step > 0.0) || !std::isfinite(search.step)) throw ParameterError("line search step must be positive");
    for (int k = 0; k * search.step < u_target - 1e-9; ++k) candidates.push_back(k * search.step);
  } else {
    for (const auto& p : emergence_conditions(ctx.settings().delta, omega, 0.0, u_target))
      if (p.u0 < u_target - 1e-9) candidates.push_back(p.u0);
    std::ranges::sort(candidates);
  }
  if (candidates.empty()) throw ParameterError("no emergence line below the target interaction");
  std::vector<CellResult> cells(candidates.size());
  parallel_for(candidates.size(), ctx.settings().threads, [&](std::size_t k) {
    cells[k] = ctx.evaluate(DriveProtocol(candidates[k], u_target - candidates[k], omega), false);
  });
  const CellResult* best = nullptr;
  for (const auto& c : cells)
    if (!c.failed && (!best || c.rho > best->rho)) best = &c;
  if (!best) throw NumericalError("every candidate cell failed");
  return {best->u0, best->um, best->rho};
}

std::vector<PeriodDoublingRow> period_doubling_check(const ScanContext& ctx, const std::vector<double>& omegas,
                                                     double u_target, const LineSearch& search) {
  const double omega_star = undriven_revival(ctx, u_target).omega;
  std::vector<PeriodDoublingRow> rows;
  for (double w : omegas) {
    const auto choice = optimal_u0_on_line(ctx, w, u_target, search);
    const auto cell = ctx.evaluate(DriveProtocol(choice.u0, choice.um, w), true);
    if (cell.failed) throw NumericalError("period-doubling cell failed: " + cell.error);
    rows.push_back({w, choice.u0, choice.um, cell.rho, cell.peak.omega, omega_star, cell.peak.omega / omega_star});
  }
  return rows;
}

void write_scan_csv(const std::filesystem::path& path, const ScanGrid& grid) {
  CsvWriter csv(path, {"u0", "um", "omega", "avg_scar", "avg_thermal", "rho", "omega_r", "f_magnitude", "f_real",
                       "response", "status"});
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  for (const auto& c : grid.cells) {
    csv.cell(c.u0).cell(c.um).cell(c.omega);
    if (c.failed) {
      csv.cell(kNaN).cell(kNaN).cell(kNaN).cell(kNaN).cell(kNaN).cell(kNaN).cell("").cell("failed").end_row();
      continue;
    }
    csv.cell(c.average_scar).cell(c.average_thermal).cell(c.rho);
    if (c.has_peak)
      csv.cell(c.peak.omega).cell(c.peak.magnitude).cell(c.peak.real_part)
          .cell(c.peak.omega > 0.0 ? to_string(classify_response(c.omega, c.peak.omega)) : "");
    else
      csv.cell(kNaN).cell(kNaN).cell(kNaN).cell("");
    csv.cell(c.below_threshold ? "below-threshold" : "ok").end_row();
  }
}

void write_period_doubling_csv(const std::filesystem::path& path, const std::vector<PeriodDoublingRow>& rows) {
  CsvWriter csv(path, {"omega", "u0", "um", "rho", "omega_r", "omega_star", "ratio"});
  for (const auto& r : rows)
    csv.cell(r.omega).cell(r.u0).cell(r.um).cell(r.rho).cell(r.omega_r).cell(r.omega_star).cell(r.ratio).end_row();
}

} // namespace floqscar
