#pragma once

#include "floqscar/hamiltonian.hpp"
#include "floqscar/state.hpp"
#include "floqscar/trajectory.hpp"

#include <span>
#include <string_view>

namespace floqscar {

enum class Stepper {
  Trotter,        ///< M <- exp(-i dt F) o (A M B)
  RungeKutta4,    ///< classical RK4 on i dM/dt = H_up M + M H_dn + F o M
  ExactPiecewise, ///< exact propagator of the full H on each constant piece
};

Stepper parse_stepper(std::string_view text);

/// One Trotter step with U held constant.
StateMatrix trotter_step(const StateMatrix& state, const HamiltonianParts& parts, double U, double dt);

struct EvolveOptions {
  double steps_per_unit = 200.0; ///< n: steps per unit time (upper bound on dt = 1/n)
  Stepper stepper = Stepper::Trotter;
  bool record_entropy = true;
  bool record_imbalance = true;
  bool keep_snapshots = false;
};

/// Evolves from psi0 (at psi0.time) to t_end, recording observables at the
/// given sample times. Step boundaries are aligned with sample times and
/// drive switching instants; within each aligned gap, equal steps of length
/// <= 1/n are taken with U evaluated at the gap midpoint.
Trajectory evolve(const StateMatrix& psi0, const HamiltonianParts& parts, const DriveProtocol& protocol,
                  double t_end, std::span<const double> samples, const EvolveOptions& opts = {});

/// RK4 reference with step dt (boundaries aligned as in evolve()).
Trajectory rk4_oracle(const StateMatrix& psi0, const HamiltonianParts& parts,
                      const DriveProtocol& protocol, double t_end, double dt,
                      std::span<const double> samples);

} // namespace floqscar
