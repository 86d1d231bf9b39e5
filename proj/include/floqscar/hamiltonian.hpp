#pragma once

#include "floqscar/basis.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <iosfwd>
#include <string_view>
#include <vector>

namespace floqscar {

/// Square-wave modulated interaction U(t) = u0 + um * sgn(cos(omega t)),
/// right-continuous at the switching instants T/4 and 3T/4 (mod T).
class DriveProtocol {
public:
  DriveProtocol(double u0, double um, double omega);

  /// Undriven interaction U.
  static DriveProtocol constant(double u);

  double u0() const { return u0_; }
  double um() const { return um_; }
  double omega() const { return omega_; }
  double period() const;
  bool is_static() const { return um_ == 0.0; }

  double value(double t) const;

  /// Interaction on the first and middle segments of the period.
  double high() const { return u0_ + um_; }
  double low() const { return u0_ - um_; }

  /// Switching instants strictly inside (t0, t1), ascending. Empty when static.
  std::vector<double> switch_times(double t0, double t1) const;

private:
  double u0_;
  double um_;
  double omega_;
};

double drive_value(const DriveProtocol& p, double t);

/// Fermionic hopping matrix of one spin species on the periodic chain, -J
/// included. Bulk hops carry no sign; the wrap-around hop L <-> 1 carries
/// (-1)^(N-1).
Eigen::MatrixXd build_hop(const SpinSectorBasis& basis, double J);

struct DiagonalParts {
  Eigen::MatrixXd tilt;    ///< (sum i_k + sum j_k) * delta, d_up x d_down
  Eigen::MatrixXi ndouble; ///< |alpha ∩ beta|
};

DiagonalParts build_diag(const SpinSectorBasis& up, const SpinSectorBasis& down, double delta);

/// Interaction-independent pieces of H = H_up (x) 1 + 1 (x) H_down + diag(F).
struct HamiltonianParts {
  FockSpace space;
  double J = 1.0;
  double delta = 0.0;
  Eigen::MatrixXd hop_up;
  Eigen::MatrixXd hop_down;
  Eigen::MatrixXd tilt;
  Eigen::MatrixXi ndouble;

  /// F = tilt + U * ndouble.
  Eigen::MatrixXd diagonal(double U) const;
};

HamiltonianParts build_parts(const FockSpace& space, double J, double delta);

/// Dense d_up*d_down square matrix in the flat ordering a * d_down + b.
Eigen::MatrixXd assemble_full(const HamiltonianParts& parts, double U);
Eigen::SparseMatrix<double> assemble_sparse(const HamiltonianParts& parts, double U);

/// Hopping part V alone (no diagonal), sparse.
Eigen::SparseMatrix<double> assemble_hopping(const HamiltonianParts& parts);

enum class EffectiveBranch { Plus, Minus };

EffectiveBranch parse_branch(std::string_view text);

/// Effective Hamiltonians of the resonant regimes, on open bonds.
///   Plus  (delta ~ U >> J): doublon-number-changing hops
///         -J c+_{j,s} c_{j+1,s} n_{j,s'}(1 - n_{j+1,s'}) + h.c. and (U - delta) n_up n_dn.
///   Minus (delta >> |U|, J): J3 T3 + 2 J3 T_XY + 2 J3 sum n_{j,s} n_{j+1,s'}
///         + U (1 - 4 J^2 / delta^2) n_up n_dn,   J3 = U J^2 / delta^2.
Eigen::MatrixXd build_effective(const FockSpace& space, double J, double delta, double U,
                                EffectiveBranch branch);

/// Full-precision dense CSV, one matrix row per line.
void write_dense_csv(std::ostream& out, const Eigen::MatrixXd& m);
/// "row col value" lines for nonzero entries, row-major, 0-indexed.
void write_coordinate_list(std::ostream& out, const Eigen::SparseMatrix<double>& m);

} // namespace floqscar
