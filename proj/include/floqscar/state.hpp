#pragma once

#include "floqscar/basis.hpp"

#include <Eigen/Dense>

namespace floqscar {

/// Many-body state stored as the d_up x d_down amplitude matrix M(alpha, beta).
struct StateMatrix {
  Eigen::MatrixXcd amplitudes;
  double time = 0.0;

  double norm() const { return amplitudes.norm(); }
  Eigen::Index rows() const { return amplitudes.rows(); }
  Eigen::Index cols() const { return amplitudes.cols(); }
};

StateMatrix fock_state(const FockSpace& space, std::size_t flat_index, double time = 0.0);
StateMatrix fock_state(const FockSpace& space, const FockLabel& label, double time = 0.0);

/// Row-major flattening, index a * d_down + b.
Eigen::VectorXcd flatten(const StateMatrix& state);
StateMatrix unflatten(const Eigen::VectorXcd& v, Eigen::Index dim_up, Eigen::Index dim_down,
                      double time = 0.0);

} // namespace floqscar
