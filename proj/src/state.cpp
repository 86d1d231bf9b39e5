#include "floqscar/state.hpp"

#include "floqscar/errors.hpp"

namespace floqscar {

StateMatrix fock_state(const FockSpace& space, std::size_t flat_index, double time) {
  if (flat_index >= space.dim()) throw ParameterError("Fock index outside the basis");
  StateMatrix s{Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(space.dim_up()),
                                       static_cast<Eigen::Index>(space.dim_down())),
                time};
  s.amplitudes(static_cast<Eigen::Index>(space.up_index(flat_index)),
               static_cast<Eigen::Index>(space.down_index(flat_index))) = 1.0;
  return s;
}

StateMatrix fock_state(const FockSpace& space, const FockLabel& label, double time) {
  return fock_state(space, space.index_of_label(format_label(label, true)), time);
}

Eigen::VectorXcd flatten(const StateMatrix& state) {
  const Eigen::Index du = state.rows();
  const Eigen::Index dd = state.cols();
  Eigen::VectorXcd v(du * dd);
  for (Eigen::Index a = 0; a < du; ++a) v.segment(a * dd, dd) = state.amplitudes.row(a).transpose();
  return v;
}

StateMatrix unflatten(const Eigen::VectorXcd& v, Eigen::Index dim_up, Eigen::Index dim_down,
                      double time) {
  if (v.size() != dim_up * dim_down) throw DimensionError("vector length does not match d_up*d_down");
  StateMatrix s{Eigen::MatrixXcd(dim_up, dim_down), time};
  for (Eigen::Index a = 0; a < dim_up; ++a)
    s.amplitudes.row(a) = v.segment(a * dim_down, dim_down).transpose();
  return s;
}

} // namespace floqscar
