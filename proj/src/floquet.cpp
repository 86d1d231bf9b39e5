#include "floqscar/floquet.hpp"

#include "floqscar/errors.hpp"
#include "floqscar/io.hpp"
#include "floqscar/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>

namespace floqscar {

namespace {

using Complex = std::complex<double>;

Eigen::VectorXcd phases(const Eigen::VectorXd& e, double t) {
  return e.unaryExpr([t](double x) { return std::polar(1.0, -x * t); });
}

Eigen::MatrixXcd exp_dense(const SymmetricEigen& e, double t) {
  const Eigen::MatrixXcd v = e.vectors.cast<Complex>();
  return v * phases(e.values, t).asDiagonal() * v.transpose();
}

Eigen::VectorXd overlaps_of(const Eigen::MatrixXd& vectors, const Eigen::VectorXcd& ref) {
  const Eigen::VectorXcd c = vectors.transpose().cast<Complex>() * ref;
  return c.cwiseAbs2();
}

void check_reference(const StateMatrix& ref, Eigen::Index dim) {
  if (ref.amplitudes.size() != dim) throw DimensionError("reference state does not match the operator");
}

double quasienergy_of(Complex lambda, double period, double omega) {
  return fold_quasienergy(-std::arg(lambda) / period, omega);
}

} // namespace

double fold_quasienergy(double e, double omega) {
  if (!(omega > 0.0)) throw ParameterError("omega must be positive");
  double r = std::fmod(e + 0.5 * omega, omega);
  if (r <= 0.0) r += omega;
  return r - 0.5 * omega;
}

FloquetOperator::FloquetOperator(const HamiltonianParts& parts, const DriveProtocol& protocol)
    : protocol_(protocol), dim_(static_cast<Eigen::Index>(parts.space.dim())) {
  const auto isometries = spin_flip_blocks(parts.space);
  const Eigen::MatrixXd h_plus = assemble_full(parts, protocol.high());
  const Eigen::MatrixXd h_minus = assemble_full(parts, protocol.low());
  blocks_.reserve(isometries.size());
  for (const auto& q : isometries) {
    const Eigen::MatrixXd hq = h_plus * q;
    const Eigen::MatrixXd hp = q.transpose() * hq;
    auto ep = eigh(hp);
    Block b;
    b.isometry = q;
    b.plus_values = std::move(ep.values);
    b.plus_vectors = std::move(ep.vectors);
    if (protocol.is_static()) {
      b.minus_values = b.plus_values;
      b.overlap = Eigen::MatrixXd::Identity(b.plus_vectors.rows(), b.plus_vectors.cols());
    } else {
      const Eigen::MatrixXd mq = h_minus * q;
      const Eigen::MatrixXd hm = q.transpose() * mq;
      auto em = eigh(hm);
      b.minus_values = std::move(em.values);
      b.overlap.noalias() = b.plus_vectors.transpose() * em.vectors;
    }
    blocks_.push_back(std::move(b));
  }
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> FloquetOperator::reduced(std::size_t block) const {
  const Block& b = blocks_.at(block);
  const double t = protocol_.period();
  const Eigen::ArrayXd cm = (b.minus_values * (0.5 * t)).array().cos();
  const Eigen::ArrayXd sm = (b.minus_values * (0.5 * t)).array().sin();
  // K = W diag(e^{-i d- T/2}) W^T = C + i S
  const Eigen::MatrixXd wc = b.overlap * cm.matrix().asDiagonal();
  const Eigen::MatrixXd ws = b.overlap * (-sm).matrix().asDiagonal();
  Eigen::MatrixXd c(b.overlap.rows(), b.overlap.rows());
  Eigen::MatrixXd s(b.overlap.rows(), b.overlap.rows());
  c.noalias() = wc * b.overlap.transpose();
  s.noalias() = ws * b.overlap.transpose();
  const Eigen::VectorXcd ep = phases(b.plus_values, 0.25 * t);
  const Eigen::Index n = c.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Complex p = ep(j) * ep(k);
      const double cr = c(j, k);
      const double si = s(j, k);
      c(j, k) = p.real() * cr - p.imag() * si;
      s(j, k) = p.real() * si + p.imag() * cr;
    }
  }
  return {std::move(c), std::move(s)};
}

Eigen::MatrixXcd FloquetOperator::matrix() const {
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim_, dim_);
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const auto [re, im] = reduced(k);
    const Eigen::MatrixXd qv = blocks_[k].isometry * blocks_[k].plus_vectors;
    const Eigen::MatrixXd a = qv * re * qv.transpose();
    const Eigen::MatrixXd b = qv * im * qv.transpose();
    u.real() += a;
    u.imag() += b;
  }
  return u;
}

Eigen::VectorXcd FloquetOperator::apply(const Eigen::VectorXcd& v) const {
  if (v.size() != dim_) throw DimensionError("vector does not match the Floquet operator");
  const double t = protocol_.period();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim_);
  for (const Block& b : blocks_) {
    const Eigen::VectorXcd ep = phases(b.plus_values, 0.25 * t);
    const Eigen::VectorXcd em = phases(b.minus_values, 0.5 * t);
    Eigen::VectorXcd x = b.plus_vectors.transpose().cast<Complex>() * (b.isometry.transpose().cast<Complex>() * v);
    x = x.cwiseProduct(ep);
    Eigen::VectorXcd y = b.overlap.transpose().cast<Complex>() * x;
    y = y.cwiseProduct(em);
    x = b.overlap.cast<Complex>() * y;
    x = x.cwiseProduct(ep);
    out += b.isometry.cast<Complex>() * (b.plus_vectors.cast<Complex>() * x);
  }
  return out;
}

StateMatrix FloquetOperator::apply(const StateMatrix& s) const {
  return unflatten(apply(flatten(s)), s.rows(), s.cols(), s.time + protocol_.period());
}

Eigen::MatrixXcd floquet_operator_dense(const HamiltonianParts& parts, const DriveProtocol& protocol) {
  const double t = protocol.period();
  const auto ep = eigh(assemble_full(parts, protocol.high()));
  const auto em = eigh(assemble_full(parts, protocol.low()));
  const Eigen::MatrixXcd quarter = exp_dense(ep, 0.25 * t);
  const Eigen::MatrixXcd half = exp_dense(em, 0.5 * t);
  return quarter * half * quarter;
}

FloquetSpectrum quasienergy_spectrum(const Eigen::MatrixXcd& u, double omega, const StateMatrix& reference) {
  if (u.rows() != u.cols()) throw DimensionError("Floquet matrix must be square");
  check_reference(reference, u.rows());
  const double defect = (u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
  if (defect > 1e-8) throw NumericalError("Floquet matrix is not unitary (defect " + format_double(defect) + ")");
  if ((u - u.transpose()).cwiseAbs().maxCoeff() > 1e-8) throw NumericalError("Floquet matrix is not symmetric");
  const auto e = diagonalize_symmetric_unitary(u);
  FloquetSpectrum out;
  out.omega = omega;
  out.period = 2.0 * std::numbers::pi / omega;
  out.eigenvalues = e.values;
  out.quasienergies = e.values.unaryExpr([&](Complex l) { return quasienergy_of(l, out.period, omega); });
  out.overlaps = overlaps_of(e.vectors, flatten(reference));
  out.eigenvectors = e.vectors;
  return out;
}

FloquetSpectrum quasienergy_spectrum(const FloquetOperator& op, const StateMatrix& reference,
                                     bool keep_vectors) {
  check_reference(reference, op.dim());
  const Eigen::VectorXcd ref = flatten(reference);
  FloquetSpectrum out;
  out.omega = op.protocol().omega();
  out.period = op.protocol().period();
  out.eigenvalues.resize(op.dim());
  out.overlaps.resize(op.dim());
  if (keep_vectors) out.eigenvectors.resize(op.dim(), op.dim());
  Eigen::Index col = 0;
  for (std::size_t k = 0; k < op.blocks().size(); ++k) {
    const auto& b = op.blocks()[k];
    auto [re, im] = op.reduced(k);
    const auto e = diagonalize_symmetric_unitary(re, im);
    const Eigen::Index m = e.values.size();
    out.eigenvalues.segment(col, m) = e.values;
    const Eigen::MatrixXd local = b.plus_vectors * e.vectors;
    const Eigen::VectorXcd r = b.isometry.transpose().cast<Complex>() * ref;
    out.overlaps.segment(col, m) = (local.transpose().cast<Complex>() * r).cwiseAbs2();
    if (keep_vectors) out.eigenvectors.middleCols(col, m) = b.isometry * local;
    col += m;
  }
  out.quasienergies =
      out.eigenvalues.unaryExpr([&](Complex l) { return quasienergy_of(l, out.period, out.omega); });
  return out;
}

StaticSpectrum static_spectrum(const HamiltonianParts& parts, double U, const StateMatrix& reference) {
  check_reference(reference, static_cast<Eigen::Index>(parts.space.dim()));
  const auto e = eigh_blocked(assemble_full(parts, U), spin_flip_blocks(parts.space));
  return {e.values, overlaps_of(e.vectors, flatten(reference))};
}

namespace {

ScarTowers towers_on_axis(const Eigen::VectorXd& energies, const Eigen::VectorXd& overlaps, double lo,
                          double hi, const TowerOptions& opts, bool periodic) {
  if (energies.size() != overlaps.size()) throw DimensionError("energies and overlaps differ in length");
  if (opts.n_bins < 1) throw ParameterError("n_bins must be >= 1");
  if (!(hi > lo)) throw ParameterError("tower axis must have positive width");
  if (!(opts.floor_factor >= 0.0) || !(opts.relative_floor >= 0.0))
    throw ParameterError("overlap floors must be non-negative");
  ScarTowers out;
  out.spacing = std::numeric_limits<double>::quiet_NaN();
  if (energies.size() == 0) return out;
  const double floor = std::max(opts.floor_factor * overlaps.mean(), opts.relative_floor * overlaps.maxCoeff());
  const double width = (hi - lo) / opts.n_bins;
  const auto nb = static_cast<std::ptrdiff_t>(opts.n_bins);

  std::vector<Eigen::Index> best(static_cast<std::size_t>(nb), -1);
  for (Eigen::Index k = 0; k < energies.size(); ++k) {
    if (energies(k) < lo || energies(k) >= hi) continue;
    const auto bin = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>((energies(k) - lo) / width), nb - 1);
    auto& slot = best[static_cast<std::size_t>(bin)];
    if (slot < 0 || overlaps(k) > overlaps(slot)) slot = k;
  }
  auto height = [&](std::ptrdiff_t b) {
    if (periodic) b = (b + nb) % nb;
    if (b < 0 || b >= nb || best[static_cast<std::size_t>(b)] < 0) return -1.0;
    return overlaps(best[static_cast<std::size_t>(b)]);
  };
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const double h = height(b);
    if (!(h > floor)) continue;
    if (nb > 1 && !(h > height(b - 1) && h >= height(b + 1))) continue;
    const Eigen::Index k = best[static_cast<std::size_t>(b)];
    out.centers.push_back({energies(k), overlaps(k), k});
  }
  std::sort(out.centers.begin(), out.centers.end(),
            [](const TowerCenter& x, const TowerCenter& y) { return x.energy < y.energy; });
  if (out.centers.size() >= 2)
    out.spacing = (out.centers.back().energy - out.centers.front().energy) /
                  static_cast<double>(out.centers.size() - 1);
  return out;
}

} // namespace

ScarTowers detect_towers(const Eigen::VectorXd& energies, const Eigen::VectorXd& overlaps, double lo,
                         double hi, const TowerOptions& opts) {
  return towers_on_axis(energies, overlaps, lo, hi, opts, false);
}

ScarTowers detect_towers(const FloquetSpectrum& spec, const TowerOptions& opts) {
  // Bins are half-open [lo, hi); mirroring maps (-omega/2, omega/2] onto them.
  const Eigen::VectorXd mirrored = -spec.quasienergies;
  auto towers = towers_on_axis(mirrored, spec.overlaps, -0.5 * spec.omega, 0.5 * spec.omega, opts, true);
  for (auto& c : towers.centers) c.energy = -c.energy;
  std::reverse(towers.centers.begin(), towers.centers.end());
  return towers;
}

std::pair<double, double> overlap_window(const StaticSpectrum& spec, double width_sigmas) {
  const double total = spec.overlaps.sum();
  if (!(total > 0.0)) throw NumericalError("reference state has no weight on the spectrum");
  const double mean = spec.overlaps.dot(spec.energies) / total;
  const double second = spec.overlaps.dot(spec.energies.cwiseAbs2()) / total;
  const double sigma = std::sqrt(std::max(0.0, second - mean * mean));
  if (!(sigma > 0.0)) throw NumericalError("reference state is an eigenstate; no tower window");
  return {mean - width_sigmas * sigma, mean + width_sigmas * sigma};
}

ScarTowers detect_towers(const StaticSpectrum& spec, const TowerOptions& opts) {
  const auto [lo, hi] = overlap_window(spec, opts.window_sigmas);
  return towers_on_axis(spec.energies, spec.overlaps, lo, hi, opts, false);
}

void write_spectrum_csv(const std::filesystem::path& path, const Eigen::VectorXd& energies,
                        const Eigen::VectorXd& overlaps, const ScarTowers& towers,
                        std::string_view energy_column) {
  if (energies.size() != overlaps.size()) throw DimensionError("energies and overlaps differ in length");
  std::vector<bool> flag(static_cast<std::size_t>(energies.size()), false);
  for (const auto& c : towers.centers) flag.at(static_cast<std::size_t>(c.index)) = true;
  CsvWriter csv(path, {energy_column, "overlap_ref", "tower_flag"});
  for (Eigen::Index k = 0; k < energies.size(); ++k)
    csv.cell(energies(k)).cell(overlaps(k)).cell(static_cast<bool>(flag[static_cast<std::size_t>(k)])).end_row();
}

} // namespace floqscar
