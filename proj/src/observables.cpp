#include "floqscar/observables.hpp"

#include "floqscar/errors.hpp"
#include "floqscar/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace floqscar {

double fidelity(const StateMatrix& state, const StateMatrix& reference) {
  if (state.rows() != reference.rows() || state.cols() != reference.cols())
    throw DimensionError("fidelity: state dimensions differ");
  const std::complex<double> overlap = (reference.amplitudes.conjugate().cwiseProduct(state.amplitudes)).sum();
  return std::norm(overlap);
}

BipartitionMap::BipartitionMap(const FockSpace& space)
    : sites_(space.sites()), dim_down_(space.dim_down()) {
  const int L = space.sites();
  if (L % 2 != 0) throw ParameterError("bipartition needs an even number of sites");
  const int half = L / 2;
  const Mask left_mask = (Mask{1} << half) - 1;
  entries_.resize(space.dim());
  std::map<std::pair<int, int>, std::size_t> block_of;
  std::vector<std::map<std::uint32_t, Eigen::Index>> row_of;
  std::vector<std::map<std::uint32_t, Eigen::Index>> col_of;
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const Mask up = space.up().mask(space.up_index(i));
    const Mask dn = space.down().mask(space.down_index(i));
    const Mask up_l = up & left_mask;
    const Mask dn_l = dn & left_mask;
    const Mask up_r = up >> half;
    const Mask dn_r = dn >> half;
    const std::uint32_t l = up_l | (dn_l << half);
    const std::uint32_t r = up_r | (dn_r << half);
    const int sign = (std::popcount(dn_l) * std::popcount(up_r)) % 2 == 0 ? 1 : -1;
    entries_[i] = Entry{l, r, sign};

    const auto key = std::make_pair(std::popcount(up_l), std::popcount(dn_l));
    auto [it, inserted] = block_of.try_emplace(key, blocks_.size());
    if (inserted) {
      blocks_.emplace_back();
      row_of.emplace_back();
      col_of.emplace_back();
    }
    const std::size_t bi = it->second;
    Block& blk = blocks_[bi];
    auto [rit, rnew] = row_of[bi].try_emplace(l, blk.rows);
    if (rnew) ++blk.rows;
    auto [cit, cnew] = col_of[bi].try_emplace(r, blk.cols);
    if (cnew) ++blk.cols;
    blk.flat.push_back(i);
    blk.row.push_back(rit->second);
    blk.col.push_back(cit->second);
    blk.sign.push_back(sign);
  }
}

Eigen::MatrixXcd BipartitionMap::dense_matrix(const StateMatrix& state) const {
  const auto dl = static_cast<Eigen::Index>(left_dim());
  Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(dl, dl);
  for (Eigen::Index a = 0; a < state.rows(); ++a)
    for (Eigen::Index b = 0; b < state.cols(); ++b) {
      const Entry& e = entry(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
      psi(e.left, e.right) = static_cast<double>(e.sign) * state.amplitudes(a, b);
    }
  return psi;
}

std::vector<double> BipartitionMap::schmidt_weights(const StateMatrix& state) const {
  if (static_cast<std::size_t>(state.rows() * state.cols()) != entries_.size())
    throw DimensionError("state does not match the bipartition basis");
  std::vector<double> out;
  const auto dd = static_cast<Eigen::Index>(dim_down_);
  for (const Block& blk : blocks_) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(blk.rows, blk.cols);
    for (std::size_t k = 0; k < blk.flat.size(); ++k) {
      const auto f = static_cast<Eigen::Index>(blk.flat[k]);
      m(blk.row[k], blk.col[k]) = static_cast<double>(blk.sign[k]) * state.amplitudes(f / dd, f % dd);
    }
    if (m.rows() == 1 || m.cols() == 1) {
      out.push_back(m.squaredNorm());
      continue;
    }
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
      const double s = svd.singularValues()(k);
      out.push_back(s * s);
    }
  }
  return out;
}

double entropy_from_weights(std::span<const double> weights) {
  double s = 0.0;
  for (double w : weights)
    if (w > 1e-300) s -= w * std::log(w);
  return std::max(0.0, s);
}

double entanglement_entropy_half(const StateMatrix& state, const BipartitionMap& map) {
  const auto w = map.schmidt_weights(state);
  return entropy_from_weights(w);
}

double imbalance(const StateMatrix& state, const FockSpace& space) {
  if (static_cast<std::size_t>(state.rows()) != space.dim_up() ||
      static_cast<std::size_t>(state.cols()) != space.dim_down())
    throw DimensionError("imbalance: state does not match the space");
  Mask odd = 0;
  for (int j = 1; j <= space.sites(); j += 2) odd |= Mask{1} << (j - 1);
  const Eigen::VectorXd p_up = state.amplitudes.cwiseAbs2().rowwise().sum();
  const Eigen::VectorXd p_dn = state.amplitudes.cwiseAbs2().colwise().sum().transpose();
  double n_odd = 0.0;
  double n_all = 0.0;
  for (Eigen::Index a = 0; a < p_up.size(); ++a) {
    const Mask m = space.up().mask(static_cast<std::size_t>(a));
    n_odd += p_up(a) * std::popcount(m & odd);
    n_all += p_up(a) * std::popcount(m);
  }
  for (Eigen::Index b = 0; b < p_dn.size(); ++b) {
    const Mask m = space.down().mask(static_cast<std::size_t>(b));
    n_odd += p_dn(b) * std::popcount(m & odd);
    n_all += p_dn(b) * std::popcount(m);
  }
  if (n_all <= 0.0) throw ParameterError("imbalance undefined for the vacuum");
  return (2.0 * n_odd - n_all) / n_all;
}

double average_fidelity(const Trajectory& traj, double tau) {
  if (!(tau > 0.0)) throw ParameterError("averaging horizon must be positive");
  if (traj.size() < 2 || traj.times.front() > 1e-12 ||
      traj.times.back() < tau * (1.0 - 1e-12))
    throw ParameterError("trajectory does not cover [0, tau]");
  return trapezoid(traj.times, traj.fidelity, 0.0, tau) / tau;
}

double relative_discrepancy(double avg_s, double avg_th) {
  if (!(avg_th > 0.0)) throw NumericalError("relative discrepancy with non-positive thermal average");
  return (avg_s - avg_th) / avg_th;
}

std::complex<double> fourier_integral(std::span<const double> t, std::span<const double> y,
                                      double tau, double omega) {
  if (t.size() != y.size() || t.size() < 2) throw DimensionError("fourier: bad sample arrays");
  if (t.front() > 1e-12 || t.back() < tau * (1.0 - 1e-12))
    throw ParameterError("trajectory does not cover [0, tau]");
  std::complex<double> sum = 0.0;
  auto g = [&](double time, double value) { return value * std::polar(1.0, -omega * time); };
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    if (t[k] >= tau) break;
    double hi = t[k + 1];
    double yhi = y[k + 1];
    if (hi > tau) {
      yhi = y[k] + (tau - t[k]) / (t[k + 1] - t[k]) * (y[k + 1] - y[k]);
      hi = tau;
    }
    sum += 0.5 * (hi - t[k]) * (g(t[k], y[k]) + g(hi, yhi));
  }
  return sum;
}

std::vector<double> fourier_grid(const FourierOptions& opts) {
  if (!(opts.tau > 0.0) || !(opts.omega_max > opts.omega_min))
    throw ParameterError("invalid Fourier window");
  const double max_step = 2.0 * std::numbers::pi / (10.0 * opts.tau);
  const auto intervals =
      static_cast<std::size_t>(std::ceil((opts.omega_max - opts.omega_min) / max_step));
  const double h = (opts.omega_max - opts.omega_min) / static_cast<double>(intervals);
  std::vector<double> grid(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k) grid[k] = opts.omega_min + static_cast<double>(k) * h;
  return grid;
}

FourierPeak fourier_revival(const Trajectory& traj, const FourierOptions& opts) {
  const auto grid = fourier_grid(opts);
  auto magnitude = [&](double w) { return std::abs(fourier_integral(traj.times, traj.fidelity, opts.tau, w)); };
  std::size_t best = 0;
  double best_mag = -1.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double m = magnitude(grid[k]);
    if (m > best_mag) {
      best_mag = m;
      best = k;
    }
  }
  // Golden-section refinement inside the neighbouring grid cells.
  double lo = grid[best > 0 ? best - 1 : 0];
  double hi = grid[std::min(best + 1, grid.size() - 1)];
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = magnitude(x1);
  double f2 = magnitude(x2);
  for (int it = 0; it < 60 && hi - lo > 1e-10; ++it) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = magnitude(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = magnitude(x2);
    }
  }
  double w = 0.5 * (lo + hi);
  if (magnitude(w) < best_mag) w = grid[best];
  const auto f = fourier_integral(traj.times, traj.fidelity, opts.tau, w);
  return FourierPeak{w, std::abs(f), f.real()};
}

void write_fourier_csv(const std::filesystem::path& path, const Trajectory& traj, const FourierOptions& opts) {
  CsvWriter csv(path, {"omega", "f_magnitude", "f_real"});
  for (double w : fourier_grid(opts)) {
    const auto f = fourier_integral(traj.times, traj.fidelity, opts.tau, w);
    csv.cell(w).cell(std::abs(f)).cell(f.real()).end_row();
  }
}

WannierStark wannier_stark_analytics(double delta, double J) {
  if (!(delta > 0.0)) throw ParameterError("Wannier-Stark analytics need a positive tilt");
  if (!(J > 0.0)) throw ParameterError("Wannier-Stark analytics need a positive hopping");
  return WannierStark{2.0 * std::numbers::pi / delta, 2.0 * std::asinh(delta / (2.0 * J))};
}

namespace {

double refine_peak(std::span<const double> t, std::span<const double> y, std::size_t k) {
  if (k == 0 || k + 1 >= t.size()) return t[k];
  const double h1 = t[k] - t[k - 1];
  const double h2 = t[k + 1] - t[k];
  if (std::abs(h1 - h2) > 1e-9 * std::max(h1, h2)) return t[k];
  const double denom = y[k - 1] - 2.0 * y[k] + y[k + 1];
  if (denom >= 0.0) return t[k];
  return t[k] + 0.5 * h1 * (y[k - 1] - y[k + 1]) / denom;
}

} // namespace

std::vector<double> peak_times(std::span<const double> t, std::span<const double> y,
                               double min_height) {
  if (t.size() != y.size()) throw DimensionError("peak_times: length mismatch");
  std::vector<double> out;
  for (std::size_t k = 1; k + 1 < t.size(); ++k)
    if (y[k] >= min_height && y[k] > y[k - 1] && y[k] >= y[k + 1]) out.push_back(refine_peak(t, y, k));
  return out;
}

double first_revival_time(const Trajectory& traj, double dip) {
  const auto& f = traj.fidelity;
  std::size_t k = 0;
  while (k < f.size() && f[k] >= dip) ++k;
  while (k < f.size() && f[k] < dip) ++k;
  if (k >= f.size()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t best = k;
  while (k < f.size() && f[k] >= dip) {
    if (f[k] > f[best]) best = k;
    ++k;
  }
  return refine_peak(traj.times, f, best);
}

double mean_peak_spacing(const Trajectory& traj, double min_height) {
  const auto peaks = peak_times(traj.times, traj.fidelity, min_height);
  if (peaks.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  return (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
}

} // namespace floqscar
