#include "floqscar/linalg.hpp"

#include "floqscar/errors.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace floqscar {

SymmetricEigen eigh(Eigen::MatrixXd a) {
  if (a.rows() != a.cols()) throw DimensionError("eigh needs a square matrix");
  const auto n = static_cast<lapack_int>(a.rows());
  SymmetricEigen out;
  out.values.resize(a.rows());
  if (n == 0) {
    out.vectors = std::move(a);
    return out;
  }
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, out.values.data());
  if (info != 0) throw NumericalError("dsyevd failed with info " + std::to_string(info));
  out.vectors = std::move(a);
  return out;
}

std::vector<Eigen::SparseMatrix<double>> spin_flip_blocks(const FockSpace& space) {
  const auto n = static_cast<Eigen::Index>(space.dim());
  std::vector<Eigen::SparseMatrix<double>> out;
  if (space.n_up() != space.n_down()) {
    Eigen::SparseMatrix<double> id(n, n);
    id.setIdentity();
    out.push_back(std::move(id));
    return out;
  }
  const auto d = space.dim_up();
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<Eigen::Triplet<double>> even;
  std::vector<Eigen::Triplet<double>> odd;
  Eigen::Index ce = 0;
  Eigen::Index co = 0;
  for (std::size_t a = 0; a < d; ++a) {
    even.emplace_back(static_cast<Eigen::Index>(space.flat(a, a)), ce++, 1.0);
    for (std::size_t b = a + 1; b < d; ++b) {
      const auto ab = static_cast<Eigen::Index>(space.flat(a, b));
      const auto ba = static_cast<Eigen::Index>(space.flat(b, a));
      even.emplace_back(ab, ce, r);
      even.emplace_back(ba, ce, r);
      ++ce;
      odd.emplace_back(ab, co, r);
      odd.emplace_back(ba, co, -r);
      ++co;
    }
  }
  Eigen::SparseMatrix<double> qe(n, ce);
  qe.setFromTriplets(even.begin(), even.end());
  out.push_back(std::move(qe));
  if (co > 0) {
    Eigen::SparseMatrix<double> qo(n, co);
    qo.setFromTriplets(odd.begin(), odd.end());
    out.push_back(std::move(qo));
  }
  return out;
}

SymmetricEigen eigh_blocked(const Eigen::MatrixXd& a,
                            const std::vector<Eigen::SparseMatrix<double>>& blocks) {
  const Eigen::Index n = a.rows();
  Eigen::VectorXd values(n);
  Eigen::MatrixXd vectors(n, n);
  Eigen::Index col = 0;
  for (const auto& q : blocks) {
    if (q.rows() != n) throw DimensionError("block isometry does not match matrix size");
    const Eigen::MatrixXd aq = a * q;
    const Eigen::MatrixXd ab = Eigen::MatrixXd(q.transpose() * aq);
    auto e = eigh(ab);
    values.segment(col, ab.rows()) = e.values;
    vectors.middleCols(col, ab.rows()) = q * e.vectors;
    col += ab.rows();
  }
  if (col != n) throw DimensionError("block isometries do not span the space");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return values(i) < values(j); });
  SymmetricEigen out{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = values(order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

UnitaryEigen diagonalize_symmetric_unitary(const Eigen::MatrixXcd& u) {
  return diagonalize_symmetric_unitary(Eigen::MatrixXd(u.real()), Eigen::MatrixXd(u.imag()));
}

UnitaryEigen diagonalize_symmetric_unitary(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (x.rows() != x.cols() || y.rows() != x.rows() || y.cols() != x.cols())
    throw DimensionError("unitary must be square");
  const Eigen::Index n = x.rows();
  constexpr double kMix = 0.5772156649015329;
  constexpr double kClusterTol = 1e-7;
  Eigen::MatrixXd mix = x + kMix * y;
  mix = 0.5 * (mix + mix.transpose()).eval();
  auto e = eigh(std::move(mix));
  Eigen::MatrixXd g = std::move(e.vectors);

  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index stop = start + 1;
    while (stop < n && e.values(stop) - e.values(stop - 1) < kClusterTol) ++stop;
    const Eigen::Index m = stop - start;
    if (m > 1) {
      const Eigen::MatrixXd gc = g.middleCols(start, m);
      Eigen::MatrixXd proj = gc.transpose() * y * gc;
      proj = 0.5 * (proj + proj.transpose()).eval();
      const auto sub = eigh(std::move(proj));
      g.middleCols(start, m) = gc * sub.vectors;
    }
    start = stop;
  }

  UnitaryEigen out;
  out.values.resize(n);
  const Eigen::MatrixXd xg = x * g;
  const Eigen::MatrixXd yg = y * g;
  for (Eigen::Index k = 0; k < n; ++k)
    out.values(k) = {g.col(k).dot(xg.col(k)), g.col(k).dot(yg.col(k))};
  out.vectors = std::move(g);
  return out;
}

double eigen_residual(const Eigen::MatrixXcd& u, const UnitaryEigen& e) {
  const Eigen::MatrixXcd g = e.vectors.cast<std::complex<double>>();
  const Eigen::MatrixXcd r = u * g - g * e.values.asDiagonal();
  return r.colwise().norm().maxCoeff();
}

} // namespace floqscar
