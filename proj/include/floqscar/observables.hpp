#pragma once

#include "floqscar/basis.hpp"
#include "floqscar/state.hpp"
#include "floqscar/trajectory.hpp"

#include <Eigen/Dense>

#include <complex>
#include <filesystem>
#include <span>
#include <vector>

namespace floqscar {

/// |<reference|state>|^2.
double fidelity(const StateMatrix& state, const StateMatrix& reference);

/// Splits the chain into sites 1..L/2 (left) and L/2+1..L (right).
///
/// Each half is labelled by its own occupation patterns
/// l = up_left + 2^(L/2) * down_left (similarly r), so d_l = d_r = 2^L in the
/// unrestricted half-chain space. Reordering the spin-major creation string
/// into left-then-right order gives the sign (-1)^(N_down_left * N_up_right).
class BipartitionMap {
public:
  struct Entry {
    std::uint32_t left;
    std::uint32_t right;
    int sign;
  };

  explicit BipartitionMap(const FockSpace& space);

  int sites() const { return sites_; }
  std::size_t left_dim() const { return std::size_t{1} << sites_; }
  std::size_t right_dim() const { return std::size_t{1} << sites_; }
  const Entry& entry(std::size_t a, std::size_t b) const { return entries_[a * dim_down_ + b]; }

  /// Signed psi_{lr} in the full 2^L x 2^L grid.
  Eigen::MatrixXcd dense_matrix(const StateMatrix& state) const;

  /// Squared Schmidt coefficients, computed block by block in the
  /// (N_up_left, N_down_left) quantum numbers.
  std::vector<double> schmidt_weights(const StateMatrix& state) const;

private:
  struct Block {
    std::vector<std::size_t> flat; ///< sector flat indices in the block
    std::vector<Eigen::Index> row;
    std::vector<Eigen::Index> col;
    std::vector<int> sign;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
  };

  int sites_;
  std::size_t dim_down_;
  std::vector<Entry> entries_;
  std::vector<Block> blocks_;
};

/// -sum w ln w over Schmidt weights.
double entropy_from_weights(std::span<const double> weights);

double entanglement_entropy_half(const StateMatrix& state, const BipartitionMap& map);

/// <N_odd - N_even> / <N_odd + N_even>, sites 1-indexed.
double imbalance(const StateMatrix& state, const FockSpace& space);

/// (1/tau) integral_0^tau F dt.
double average_fidelity(const Trajectory& traj, double tau);

/// (avg_s - avg_th) / avg_th.
double relative_discrepancy(double avg_s, double avg_th);

/// integral_0^tau y(t) e^{-i omega t} dt by the trapezoidal rule.
std::complex<double> fourier_integral(std::span<const double> t, std::span<const double> y,
                                      double tau, double omega);

struct FourierPeak {
  double omega = 0.0;
  double magnitude = 0.0;
  double real_part = 0.0;
};

struct FourierOptions {
  double tau = 100.0;
  double omega_min = 0.2;
  double omega_max = 8.0;
};

/// Angular-frequency grid with spacing at most 2 pi / (10 tau).
std::vector<double> fourier_grid(const FourierOptions& opts);

/// argmax |f(omega)| over [omega_min, omega_max]: grid search, then local
/// refinement around the best grid point.
FourierPeak fourier_revival(const Trajectory& traj, const FourierOptions& opts = {});

/// Columns omega, f_magnitude, f_real over fourier_grid(opts).
void write_fourier_csv(const std::filesystem::path& path, const Trajectory& traj, const FourierOptions& opts = {});

struct WannierStark {
  double bloch_period;
  double inverse_localization_length;
};

WannierStark wannier_stark_analytics(double delta, double J);

/// Times of local maxima of y whose height is at least min_height, refined by
/// a parabola through the three neighbouring samples.
std::vector<double> peak_times(std::span<const double> t, std::span<const double> y,
                               double min_height);

/// Time of the first fidelity maximum after F has fallen below dip.
/// Returns NaN if no revival is found.
double first_revival_time(const Trajectory& traj, double dip = 0.2);

/// Mean spacing between consecutive fidelity maxima above min_height.
/// Returns NaN with fewer than two maxima.
double mean_peak_spacing(const Trajectory& traj, double min_height);

} // namespace floqscar
