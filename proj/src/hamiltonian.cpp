#include "floqscar/hamiltonian.hpp"

#include "floqscar/errors.hpp"
#include "floqscar/fermion.hpp"
#include "floqscar/io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <ostream>

namespace floqscar {

DriveProtocol::DriveProtocol(double u0, double um, double omega) : u0_(u0), um_(um), omega_(omega) {
  if (!std::isfinite(u0) || !std::isfinite(um) || !std::isfinite(omega))
    throw ParameterError("drive parameters must be finite");
  if (!(omega > 0.0)) throw ParameterError("drive frequency must be positive");
  if (um < 0.0) throw ParameterError("modulation amplitude must be non-negative");
}

DriveProtocol DriveProtocol::constant(double u) { return DriveProtocol(u, 0.0, 1.0); }

double DriveProtocol::period() const { return 2.0 * std::numbers::pi / omega_; }

double DriveProtocol::value(double t) const {
  if (um_ == 0.0) return u0_;
  const double T = period();
  double phase = std::fmod(t, T) / T;
  if (phase < 0.0) phase += 1.0;
  return (phase < 0.25 || phase >= 0.75) ? u0_ + um_ : u0_ - um_;
}

std::vector<double> DriveProtocol::switch_times(double t0, double t1) const {
  std::vector<double> out;
  if (um_ == 0.0 || t1 <= t0) return out;
  const double T = period();
  const long long first = static_cast<long long>(std::floor(t0 / T)) - 1;
  const long long last = static_cast<long long>(std::ceil(t1 / T)) + 1;
  for (long long m = first; m <= last; ++m) {
    for (double frac : {0.25, 0.75}) {
      const double t = (static_cast<double>(m) + frac) * T;
      if (t > t0 && t < t1) out.push_back(t);
    }
  }
  return out;
}

double drive_value(const DriveProtocol& p, double t) { return p.value(t); }

Eigen::MatrixXd build_hop(const SpinSectorBasis& basis, double J) {
  const int L = basis.sites();
  if (L < 2) throw ParameterError("hopping needs at least two sites");
  const auto d = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const Mask m = basis.mask(static_cast<std::size_t>(i));
    for (int j = 1; j <= L; ++j) {
      const int a = j;
      const int b = j % L + 1;
      const Mask ba = Mask{1} << (a - 1);
      const Mask bb = Mask{1} << (b - 1);
      if (((m & ba) != 0) == ((m & bb) != 0)) continue;
      // c+_to c_from, sign = parity of fermions strictly between the two sites.
      const int lo = std::min(a, b);
      const int hi = std::max(a, b);
      const Mask between = ((Mask{1} << (hi - 1)) - 1) & ~((Mask{1} << lo) - 1);
      const int sign = (std::popcount(m & between) % 2 == 0) ? 1 : -1;
      const Mask moved = m ^ ba ^ bb;
      const auto f = basis.index_of(moved);
      H(static_cast<Eigen::Index>(*f), i) += -J * sign;
    }
  }
  return H;
}

DiagonalParts build_diag(const SpinSectorBasis& up, const SpinSectorBasis& down, double delta) {
  if (up.sites() != down.sites()) throw DimensionError("spin sectors have different L");
  const auto du = static_cast<Eigen::Index>(up.size());
  const auto dd = static_cast<Eigen::Index>(down.size());
  DiagonalParts out{Eigen::MatrixXd(du, dd), Eigen::MatrixXi(du, dd)};
  for (Eigen::Index a = 0; a < du; ++a) {
    for (Eigen::Index b = 0; b < dd; ++b) {
      const auto ia = static_cast<std::size_t>(a);
      const auto ib = static_cast<std::size_t>(b);
      out.tilt(a, b) = (up.site_sum(ia) + down.site_sum(ib)) * delta;
      out.ndouble(a, b) = std::popcount(up.mask(ia) & down.mask(ib));
    }
  }
  return out;
}

Eigen::MatrixXd HamiltonianParts::diagonal(double U) const {
  return tilt + U * ndouble.cast<double>();
}

HamiltonianParts build_parts(const FockSpace& space, double J, double delta) {
  auto diag = build_diag(space.up(), space.down(), delta);
  return HamiltonianParts{space,
                          J,
                          delta,
                          build_hop(space.up(), J),
                          build_hop(space.down(), J),
                          std::move(diag.tilt),
                          std::move(diag.ndouble)};
}

Eigen::MatrixXd assemble_full(const HamiltonianParts& parts, double U) {
  const Eigen::Index du = parts.hop_up.rows();
  const Eigen::Index dd = parts.hop_down.rows();
  if (parts.tilt.rows() != du || parts.tilt.cols() != dd || parts.ndouble.rows() != du ||
      parts.ndouble.cols() != dd || parts.hop_up.cols() != du || parts.hop_down.cols() != dd)
    throw DimensionError("hamiltonian parts have inconsistent dimensions");
  const Eigen::Index n = du * dd;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  const Eigen::MatrixXd F = parts.diagonal(U);
  for (Eigen::Index a = 0; a < du; ++a)
    for (Eigen::Index b = 0; b < dd; ++b) {
      const Eigen::Index row = a * dd + b;
      H(row, row) = F(a, b);
      for (Eigen::Index a2 = 0; a2 < du; ++a2)
        if (parts.hop_up(a, a2) != 0.0) H(row, a2 * dd + b) += parts.hop_up(a, a2);
      for (Eigen::Index b2 = 0; b2 < dd; ++b2)
        if (parts.hop_down(b, b2) != 0.0) H(row, a * dd + b2) += parts.hop_down(b, b2);
    }
  return H;
}

namespace {

std::vector<Eigen::Triplet<double>> hopping_triplets(const HamiltonianParts& parts) {
  const Eigen::Index du = parts.hop_up.rows();
  const Eigen::Index dd = parts.hop_down.rows();
  std::vector<Eigen::Triplet<double>> trip;
  for (Eigen::Index a = 0; a < du; ++a)
    for (Eigen::Index a2 = 0; a2 < du; ++a2) {
      const double h = parts.hop_up(a, a2);
      if (h == 0.0) continue;
      for (Eigen::Index b = 0; b < dd; ++b) trip.emplace_back(a * dd + b, a2 * dd + b, h);
    }
  for (Eigen::Index b = 0; b < dd; ++b)
    for (Eigen::Index b2 = 0; b2 < dd; ++b2) {
      const double h = parts.hop_down(b, b2);
      if (h == 0.0) continue;
      for (Eigen::Index a = 0; a < du; ++a) trip.emplace_back(a * dd + b, a * dd + b2, h);
    }
  return trip;
}

} // namespace

Eigen::SparseMatrix<double> assemble_hopping(const HamiltonianParts& parts) {
  const Eigen::Index n = parts.hop_up.rows() * parts.hop_down.rows();
  Eigen::SparseMatrix<double> V(n, n);
  const auto trip = hopping_triplets(parts);
  V.setFromTriplets(trip.begin(), trip.end());
  return V;
}

Eigen::SparseMatrix<double> assemble_sparse(const HamiltonianParts& parts, double U) {
  const Eigen::Index du = parts.hop_up.rows();
  const Eigen::Index dd = parts.hop_down.rows();
  const Eigen::Index n = du * dd;
  auto trip = hopping_triplets(parts);
  const Eigen::MatrixXd F = parts.diagonal(U);
  for (Eigen::Index a = 0; a < du; ++a)
    for (Eigen::Index b = 0; b < dd; ++b) trip.emplace_back(a * dd + b, a * dd + b, F(a, b));
  Eigen::SparseMatrix<double> H(n, n);
  H.setFromTriplets(trip.begin(), trip.end());
  return H;
}

EffectiveBranch parse_branch(std::string_view text) {
  if (text == "plus" || text == "+") return EffectiveBranch::Plus;
  if (text == "minus" || text == "-") return EffectiveBranch::Minus;
  throw ParameterError("unknown effective-Hamiltonian branch '" + std::string(text) +
                       "' (expected plus or minus)");
}

namespace {

// Accumulates amplitude * <f| ops |i> for every basis state i into H.
class OperatorAccumulator {
public:
  OperatorAccumulator(const FockSpace& space, Eigen::MatrixXd& H) : space_(space), H_(H) {}

  void add(std::span<const LadderOp> ops, double amplitude, bool with_adjoint) {
    const int L = space_.sites();
    for (std::size_t i = 0; i < space_.dim(); ++i) {
      const ModeMask in = mode_mask(space_.up().mask(space_.up_index(i)),
                                    space_.down().mask(space_.down_index(i)), L);
      const auto out = apply_string(ops, in);
      if (!out) continue;
      const auto a = space_.up().index_of(up_part(out->pattern, L));
      const auto b = space_.down().index_of(down_part(out->pattern, L));
      if (!a || !b) throw NumericalError("operator string left the particle-number sector");
      const auto f = static_cast<Eigen::Index>(space_.flat(*a, *b));
      const auto ii = static_cast<Eigen::Index>(i);
      H_(f, ii) += amplitude * out->sign;
      if (with_adjoint) H_(ii, f) += amplitude * out->sign;
    }
  }

private:
  const FockSpace& space_;
  Eigen::MatrixXd& H_;
};

} // namespace

Eigen::MatrixXd build_effective(const FockSpace& space, double J, double delta, double U,
                                EffectiveBranch branch) {
  const int L = space.sites();
  if (L < 2) throw ParameterError("effective Hamiltonian needs L >= 2");
  if (delta == 0.0) throw ParameterError("effective Hamiltonian needs a nonzero tilt");
  const auto n = static_cast<Eigen::Index>(space.dim());
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  OperatorAccumulator acc(space, H);
  constexpr std::array<Spin, 2> kSpins{Spin::Up, Spin::Down};

  auto add_doublon_diagonal = [&](double coefficient) {
    for (std::size_t i = 0; i < space.dim(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      H(ii, ii) += coefficient * space.doublons(i);
    }
  };

  if (branch == EffectiveBranch::Plus) {
    for (int j = 1; j + 1 <= L; ++j)
      for (Spin s : kSpins) {
        const Spin o = opposite(s);
        // n_{j,o} (1 - n_{j+1,o}) is diagonal; it is checked on the initial state.
        for (std::size_t i = 0; i < space.dim(); ++i) {
          const ModeMask in = mode_mask(space.up().mask(space.up_index(i)),
                                        space.down().mask(space.down_index(i)), L);
          if (!occupied(in, j, o, L) || occupied(in, j + 1, o, L)) continue;
          const std::array<LadderOp, 2> hop{cdag(j, s, L), c(j + 1, s, L)};
          const auto out = apply_string(hop, in);
          if (!out) continue;
          const auto a = space.up().index_of(up_part(out->pattern, L));
          const auto b = space.down().index_of(down_part(out->pattern, L));
          const auto f = static_cast<Eigen::Index>(space.flat(*a, *b));
          const auto ii = static_cast<Eigen::Index>(i);
          H(f, ii) += -J * out->sign;
          H(ii, f) += -J * out->sign;
        }
      }
    add_doublon_diagonal(U - delta);
    return H;
  }

  const double j3 = U * J * J / (delta * delta);
  for (int j = 1; j + 2 <= L; ++j)
    for (Spin s : kSpins) {
      const Spin o = opposite(s);
      const std::array<LadderOp, 4> t3{c(j, s, L), cdag(j + 1, s, L), cdag(j + 1, o, L),
                                       c(j + 2, o, L)};
      acc.add(t3, j3, true);
    }
  for (int j = 1; j + 1 <= L; ++j)
    for (Spin s : kSpins) {
      const Spin o = opposite(s);
      const std::array<LadderOp, 4> txy{cdag(j, o, L), c(j + 1, o, L), cdag(j + 1, s, L),
                                        c(j, s, L)};
      acc.add(txy, 2.0 * j3, false);
    }
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const ModeMask st = mode_mask(space.up().mask(space.up_index(i)),
                                  space.down().mask(space.down_index(i)), L);
    int pairs = 0;
    for (int j = 1; j + 1 <= L; ++j)
      for (Spin s : kSpins)
        if (occupied(st, j, s, L) && occupied(st, j + 1, opposite(s), L)) ++pairs;
    const auto ii = static_cast<Eigen::Index>(i);
    H(ii, ii) += 2.0 * j3 * pairs;
  }
  add_doublon_diagonal(U * (1.0 - 4.0 * J * J / (delta * delta)));
  return H;
}

void write_dense_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

void write_coordinate_list(std::ostream& out, const Eigen::SparseMatrix<double>& m) {
  const Eigen::SparseMatrix<double, Eigen::RowMajor> rm = m;
  for (Eigen::Index r = 0; r < rm.outerSize(); ++r)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(rm, r); it; ++it)
      if (it.value() != 0.0) out << it.row() << ' ' << it.col() << ' ' << format_double(it.value()) << '\n';
}

} // namespace floqscar
