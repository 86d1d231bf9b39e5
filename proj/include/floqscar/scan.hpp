#pragma once

#include "floqscar/evolve.hpp"
#include "floqscar/floquet.hpp"
#include "floqscar/observables.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace floqscar {

/// Evenly spaced axis; a single point when points == 1.
struct Axis {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  int points = 1;

  double at(int k) const;
  double step() const;
  std::vector<double> values() const;
};

struct ScanSettings {
  int sites = 8;
  double J = 1.0;
  double delta = 10.0;
  std::string scar_state = "s";
  std::string thermal_state = "th";
  double tau = 50.0;             ///< horizon of the fidelity averages
  double sample_dt = 0.02;       ///< fidelity sampling interval
  double steps_per_unit = 200.0; ///< Trotter step density
  FourierOptions fourier;        ///< horizon tau = 100 by default
  unsigned threads = 0;          ///< 0: hardware concurrency
  double min_thermal_average = 1e-6;
};

struct CellResult {
  double u0 = 0.0;
  double um = 0.0;
  double omega = 0.0;
  double average_scar = 0.0;
  double average_thermal = 0.0;
  double rho = 0.0;
  FourierPeak peak;      ///< only filled when requested
  bool has_peak = false;
  bool failed = false;
  std::string error;
  bool below_threshold = false; ///< rho < 1
};

/// Shared Hamiltonian pieces and initial states for a family of runs.
class ScanContext {
public:
  explicit ScanContext(ScanSettings settings);

  const ScanSettings& settings() const { return settings_; }
  const HamiltonianParts& parts() const { return parts_; }
  const StateMatrix& scar_state() const { return scar_; }
  const StateMatrix& thermal_state() const { return thermal_; }

  Trajectory quench(const StateMatrix& psi0, const DriveProtocol& protocol, double horizon) const;

  /// <F_s>, <F_th>, rho, and optionally the Fourier peak of F_s over the
  /// Fourier horizon. Never throws; failures are recorded in the cell.
  CellResult evaluate(const DriveProtocol& protocol, bool with_fourier) const;

private:
  ScanSettings settings_;
  HamiltonianParts parts_;
  StateMatrix scar_;
  StateMatrix thermal_;
};

/// Runs fn(0..n-1) on a worker pool. Results must depend only on the index.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

struct ScanGrid {
  Axis first;  ///< slow axis
  Axis second; ///< fast axis
  std::vector<CellResult> cells;

  const CellResult& at(int i, int j) const;
  bool complete() const;
};

/// rho over (u0, um) at fixed omega.
ScanGrid scan_u0_um(const ScanContext& ctx, double omega, const Axis& u0, const Axis& um);

/// Completed cell with the largest rho; ties go to the lowest u0, then um.
const CellResult& find_optimal_u0(const ScanGrid& grid);

/// rho and Fourier revival over (omega, um) with u0 = optimal_u0(omega).
ScanGrid scan_omega_um(const ScanContext& ctx, const Axis& omega, const Axis& um,
                       const std::function<double(double)>& optimal_u0);

enum class ResponseKind { Harmonic, Subharmonic, Incommensurate };

struct Response {
  ResponseKind kind;
  int k; ///< omega_r ~ omega / k; 0 when incommensurate
};

Response classify_response(double omega, double omega_r, double rel_tol = 0.05, int k_max = 8);
std::string to_string(const Response& r);

struct TransitionThresholds {
  double min_average = 0.1;  ///< both <F_s> and <F_th>; ergodic cells sit near 0.02 at L = 8
  double min_fidelity = 0.05; ///< over the whole scar trajectory
  double tau = 50.0;
};

/// Large, oscillating fidelity for both states, no collapse of F_s, and no
/// tower structure in the scar-state overlap profile.
bool flag_transition_state(const Trajectory& scar, const Trajectory& thermal, const ScarTowers& towers,
                           const TransitionThresholds& thresholds = {});

/// Fourier revival frequency of the undriven quench from the scar state.
FourierPeak undriven_revival(const ScanContext& ctx, double U);

struct OptimalChoice {
  double u0;
  double um;
  double rho;
};

enum class LineCandidates { Grid, Emergence };

/// Which u0 values the line search tries: every multiple of step in
/// [0, u_target), or only the emergence values in that range.
struct LineSearch {
  LineCandidates candidates = LineCandidates::Grid;
  double step = 0.1;
};

/// Best rho on the line um = u_target - u0; the undriven end point
/// u0 = u_target is excluded. Ties keep the smaller u0.
OptimalChoice optimal_u0_on_line(const ScanContext& ctx, double omega, double u_target, const LineSearch& search = {});

struct PeriodDoublingRow {
  double omega;
  double u0;
  double um;
  double rho;
  double omega_r;
  double omega_star;
  double ratio; ///< omega_r / omega_star
};

std::vector<PeriodDoublingRow> period_doubling_check(const ScanContext& ctx, const std::vector<double>& omegas,
                                                     double u_target, const LineSearch& search = {});

/// One row per cell: u0, um, omega, avg_scar, avg_thermal, rho, omega_r,
/// f_magnitude, f_real, response, status.
void write_scan_csv(const std::filesystem::path& path, const ScanGrid& grid);
void write_period_doubling_csv(const std::filesystem::path& path, const std::vector<PeriodDoublingRow>& rows);

} // namespace floqscar
