#pragma once

#include "floqscar/state.hpp"

#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace floqscar {

enum class Quantity { Fidelity, Entropy, Imbalance };

Quantity parse_quantity(std::string_view text);

/// Observable record at increasing sample times. Columns that were not
/// requested hold NaN.
struct Trajectory {
  std::vector<double> times;
  std::vector<double> fidelity;
  std::vector<double> entropy;
  std::vector<double> imbalance;
  std::vector<StateMatrix> snapshots; ///< empty unless requested

  std::size_t size() const { return times.size(); }
  const std::vector<double>& series(Quantity q) const;
};

/// Sample grid t0, t0 + spacing, ..., t_end (last point snapped to t_end).
std::vector<double> uniform_samples(double t0, double t_end, double spacing);

/// Trapezoidal integral of the piecewise-linear interpolant over [a, b].
double trapezoid(std::span<const double> t, std::span<const double> y, double a, double b);

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

enum class Norm { L1, L2, LInf };

Norm parse_norm(std::string_view text);

/// (integral |a - b|^p dt)^(1/p) over the common grid; max |a - b| for LInf.
double lp_error(const Trajectory& a, const Trajectory& b, Norm p, Quantity quantity);

} // namespace floqscar
