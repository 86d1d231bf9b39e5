#pragma once

// Reference constructions in the full 4^L Fock space, built from explicit
// Jordan-Wigner matrices. Test-only; shares nothing with the library's
// bit-pattern operator code.

#include "floqscar/basis.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <vector>

namespace oracle {

enum class ModeOrder {
  SpinMajor, ///< (1,up)..(L,up),(1,dn)..(L,dn)
  SideMajor, ///< left half spin-major, then right half spin-major
};

using SpMat = Eigen::SparseMatrix<double>;

class JordanWigner {
public:
  JordanWigner(int L, ModeOrder order);

  int sites() const { return L_; }
  Eigen::Index dim() const { return Eigen::Index{1} << (2 * L_); }
  /// Position of (site, spin) in the Jordan-Wigner string; spin 0 = up.
  int position(int site, int spin) const;

  const SpMat& annihilate(int site, int spin) const;
  SpMat create(int site, int spin) const;
  SpMat number(int site, int spin) const;

  /// c+_{a1 up}...c+_{aN up} c+_{b1 dn}...c+_{bM dn}|0> for every state of the
  /// sector, as columns in the sector's flat order.
  Eigen::MatrixXd sector_embedding(const floqscar::FockSpace& space) const;

private:
  int L_;
  ModeOrder order_;
  std::vector<SpMat> ops_;
};

/// Tilted Fermi-Hubbard ring in the full space.
SpMat hubbard_ring(const JordanWigner& jw, double J, double delta, double U);

/// Effective Hamiltonians from the printed operator strings, open bonds.
SpMat effective_plus(const JordanWigner& jw, double J, double delta, double U);
SpMat effective_minus(const JordanWigner& jw, double J, double delta, double U);

/// P^T H P for the sector embedding P.
Eigen::MatrixXd project(const SpMat& full, const Eigen::MatrixXd& embedding);

} // namespace oracle
