#pragma once

#include "floqscar/hamiltonian.hpp"

#include <Eigen/Dense>

#include <complex>
#include <filesystem>
#include <vector>

namespace floqscar {

/// Unperturbed (J = 0) energy of a Fock state, E(t) = static_part + doublons * U(t).
struct FockEnergy {
  double static_part = 0.0;
  int doublons = 0;
};

FockEnergy fock_energy(const HamiltonianParts& parts, std::size_t flat);

/// integral_0^T [E_j(t) - E_i(t)] dt. The square wave integrates to u0 T.
double degeneracy_phase(const FockEnergy& i, const FockEnergy& j, const DriveProtocol& protocol);

/// Distance of a phase from the nearest multiple of 2 pi.
double phase_mismatch(double phase);

/// integral_0^T exp(i phi(t)) dt with phi(t) = integral_0^t [E_j - E_i], in
/// closed form over the three constant segments of the drive.
std::complex<double> phase_integral(const FockEnergy& i, const FockEnergy& j, const DriveProtocol& protocol);

struct DegeneracyTolerance {
  double exact = 1e-9;   ///< for parameters chosen on a resonance
  double scanned = 1e-3; ///< for parameters read off a grid
};

/// First-order admixture c_j(0) of |F_j> into the Floquet mode grown from
/// |F_i>. Throws ParameterError if the pair is degenerate within tol.
std::complex<double> nondegenerate_coefficient(const FockEnergy& i, const FockEnergy& j,
                                               const DriveProtocol& protocol, double v_elem,
                                               double tol = DegeneracyTolerance{}.exact);

enum class Membership { EnergyEqual, OneHopExtended };

struct DegenerateSet {
  std::size_t reference = 0;
  std::vector<std::size_t> members; ///< flat indices, members[0] == reference
  std::vector<FockEnergy> energies;
  std::vector<Membership> membership;

  std::size_t size() const { return members.size(); }
  /// Member count per doublon number, index = doublons.
  std::vector<std::size_t> doublon_histogram() const;
};

/// All doublon-free states with the reference's tilt energy, then repeatedly
/// every state reached by one doublon-number-changing hop that is degenerate
/// with the reference within tol.
DegenerateSet build_degenerate_set(std::size_t reference, const HamiltonianParts& parts,
                                   const DriveProtocol& protocol, double tol = DegeneracyTolerance{}.exact);

struct PerturbativeResult {
  Eigen::MatrixXcd floquet_hamiltonian; ///< (H_F)_{jj'} over the set
  Eigen::VectorXd eigenphases;          ///< varsigma = T * eig(H_F), ascending
  Eigen::MatrixXcd eigenvectors;        ///< unit columns
  Eigen::VectorXd quasienergies;        ///< folded into (-omega/2, omega/2]
  Eigen::VectorXd overlaps;             ///< |<F_reference|n>|^2
};

PerturbativeResult perturbative_floquet_block(const DegenerateSet& set, const HamiltonianParts& parts,
                                              const DriveProtocol& protocol);

struct EmergencePoint {
  double u0;
  int k; ///< U_tilde = delta - k omega
  int n; ///< u0 = U_tilde + n omega
};

/// U_tilde = delta - k omega in [0, omega), then every U_tilde + n omega in [lo, hi].
std::vector<EmergencePoint> emergence_conditions(double delta, double omega, double lo, double hi);

/// index, label, tiltsum, doublons.
void write_degenerate_set_csv(const std::filesystem::path& path, const DegenerateSet& set,
                              const HamiltonianParts& parts);

} // namespace floqscar
