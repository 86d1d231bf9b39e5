#pragma once

#include "floqscar/hamiltonian.hpp"
#include "floqscar/state.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <filesystem>
#include <vector>

namespace floqscar {

/// Folds into (-omega/2, omega/2].
double fold_quasienergy(double e, double omega);

/// One-period propagator exp(-i H+ T/4) exp(-i H- T/2) exp(-i H+ T/4) with
/// H+- = H(u0 +- um), kept in factorised form.
///
/// Both H+ and H- commute with the up <-> down exchange at n_up == n_down,
/// so every factor is stored per exchange-parity block, in the eigenbasis of
/// H+ restricted to that block.
class FloquetOperator {
public:
  FloquetOperator(const HamiltonianParts& parts, const DriveProtocol& protocol);

  const DriveProtocol& protocol() const { return protocol_; }
  Eigen::Index dim() const { return dim_; }

  /// Dense matrix in the Fock basis.
  Eigen::MatrixXcd matrix() const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
  StateMatrix apply(const StateMatrix& s) const;

  struct Block {
    Eigen::SparseMatrix<double> isometry; ///< Fock basis <- block coordinates
    Eigen::MatrixXd plus_vectors;         ///< eigenvectors of H+ in block coordinates
    Eigen::VectorXd plus_values;
    Eigen::MatrixXd overlap;              ///< V+^T V- in block coordinates
    Eigen::VectorXd minus_values;
  };
  const std::vector<Block>& blocks() const { return blocks_; }

  /// exp(-i H+ T/4) ... in the H+ eigenbasis of a block, as real and
  /// imaginary parts (a complex symmetric unitary).
  std::pair<Eigen::MatrixXd, Eigen::MatrixXd> reduced(std::size_t block) const;

private:
  DriveProtocol protocol_;
  Eigen::Index dim_ = 0;
  std::vector<Block> blocks_;
};

/// Direct route: dense exponentials of the full H+ and H-, no block structure.
Eigen::MatrixXcd floquet_operator_dense(const HamiltonianParts& parts, const DriveProtocol& protocol);

struct FloquetSpectrum {
  Eigen::VectorXd quasienergies;  ///< folded into (-omega/2, omega/2]
  Eigen::VectorXcd eigenvalues;   ///< e^{-i eps T}
  Eigen::MatrixXd eigenvectors;   ///< real orthogonal columns, Fock basis; empty if not kept
  Eigen::VectorXd overlaps;       ///< |<n|psi_ref>|^2
  double omega = 0.0;
  double period = 0.0;
};

/// Diagonalises a dense Floquet matrix (must be unitary and symmetric).
FloquetSpectrum quasienergy_spectrum(const Eigen::MatrixXcd& u, double omega, const StateMatrix& reference);

/// Block-structured diagonalisation of a factorised operator.
FloquetSpectrum quasienergy_spectrum(const FloquetOperator& op, const StateMatrix& reference,
                                     bool keep_vectors = true);

struct StaticSpectrum {
  Eigen::VectorXd energies;
  Eigen::VectorXd overlaps;
};

StaticSpectrum static_spectrum(const HamiltonianParts& parts, double U, const StateMatrix& reference);

struct TowerCenter {
  double energy;
  double overlap;
  Eigen::Index index;
};

struct ScarTowers {
  std::vector<TowerCenter> centers; ///< sorted by energy
  double spacing = 0.0;             ///< mean adjacent spacing, NaN with fewer than two

  /// A single isolated peak (a localised state) is not a tower structure.
  bool structured() const { return centers.size() >= 2; }
};

struct TowerOptions {
  int n_bins = 20;
  double floor_factor = 10.0;   ///< floor >= floor_factor * mean overlap
  double relative_floor = 0.1;  ///< floor >= relative_floor * max overlap
  double window_sigmas = 2.0;   ///< static axis: <H> +- window_sigmas * dH of the reference
};

/// Per-bin maxima of the overlap profile on [lo, hi). A bin marks a tower when
/// its maximum exceeds the floor and is a local maximum of the bin profile
/// (strictly above the left neighbour, not below the right one).
ScarTowers detect_towers(const Eigen::VectorXd& energies, const Eigen::VectorXd& overlaps, double lo,
                         double hi, const TowerOptions& opts = {});

/// Quasienergy axis (-omega/2, omega/2], bins wrap around.
ScarTowers detect_towers(const FloquetSpectrum& spec, const TowerOptions& opts = {});

/// Overlap-weighted mean and spread of the spectrum, i.e. <H> and dH in the
/// reference state; returns mean -+ width_sigmas * spread.
std::pair<double, double> overlap_window(const StaticSpectrum& spec, double width_sigmas);

ScarTowers detect_towers(const StaticSpectrum& spec, const TowerOptions& opts = {});

/// Spectrum CSV: energy column name, overlap_ref, tower_flag.
void write_spectrum_csv(const std::filesystem::path& path, const Eigen::VectorXd& energies,
                        const Eigen::VectorXd& overlaps, const ScarTowers& towers,
                        std::string_view energy_column);

} // namespace floqscar
