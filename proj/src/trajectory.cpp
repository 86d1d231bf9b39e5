#include "floqscar/trajectory.hpp"

#include "floqscar/errors.hpp"
#include "floqscar/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace floqscar {

Quantity parse_quantity(std::string_view text) {
  if (text == "fidelity") return Quantity::Fidelity;
  if (text == "entropy") return Quantity::Entropy;
  if (text == "imbalance") return Quantity::Imbalance;
  throw ParameterError("unknown quantity '" + std::string(text) + "'");
}

const std::vector<double>& Trajectory::series(Quantity q) const {
  switch (q) {
  case Quantity::Fidelity: return fidelity;
  case Quantity::Entropy: return entropy;
  case Quantity::Imbalance: return imbalance;
  }
  return fidelity;
}

std::vector<double> uniform_samples(double t0, double t_end, double spacing) {
  if (!(spacing > 0.0)) throw ParameterError("sample spacing must be positive");
  if (t_end < t0) throw ParameterError("t_end before start time");
  const auto count = static_cast<long long>(std::llround((t_end - t0) / spacing));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count) + 2);
  for (long long k = 0; k <= count; ++k) out.push_back(t0 + static_cast<double>(k) * spacing);
  if (std::abs(out.back() - t_end) <= 1e-9 * std::max(1.0, std::abs(t_end)))
    out.back() = t_end;
  else if (out.back() < t_end)
    out.push_back(t_end);
  else
    out.back() = t_end;
  return out;
}

double trapezoid(std::span<const double> t, std::span<const double> y, double a, double b) {
  if (t.size() != y.size()) throw DimensionError("trapezoid: time and value lengths differ");
  if (t.size() < 2) throw ParameterError("trapezoid needs at least two samples");
  const double slack = 1e-9 * std::max(1.0, std::abs(b));
  if (a < t.front() - slack || b > t.back() + slack)
    throw ParameterError("samples do not cover the integration window");
  if (b <= a) return 0.0;
  auto interp = [&](std::size_t k, double x) {
    const double w = (x - t[k]) / (t[k + 1] - t[k]);
    return y[k] + w * (y[k + 1] - y[k]);
  };
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double lo = std::max(a, t[k]);
    const double hi = std::min(b, t[k + 1]);
    if (hi <= lo) continue;
    sum += 0.5 * (hi - lo) * (interp(k, lo) + interp(k, hi));
  }
  return sum;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  CsvWriter csv(path, {"time", "fidelity", "entropy", "imbalance"});
  for (std::size_t k = 0; k < traj.size(); ++k) {
    csv.cell(traj.times[k]).cell(traj.fidelity[k]).cell(traj.entropy[k]).cell(traj.imbalance[k]);
    csv.end_row();
  }
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const std::size_t ct = table.column("time");
  const std::size_t cf = table.column("fidelity");
  const std::size_t ce = table.column("entropy");
  const std::size_t ci = table.column("imbalance");
  Trajectory traj;
  for (const auto& row : table.rows) {
    traj.times.push_back(std::stod(row[ct]));
    traj.fidelity.push_back(std::stod(row[cf]));
    traj.entropy.push_back(std::stod(row[ce]));
    traj.imbalance.push_back(std::stod(row[ci]));
  }
  return traj;
}

Norm parse_norm(std::string_view text) {
  if (text == "1" || text == "L1") return Norm::L1;
  if (text == "2" || text == "L2") return Norm::L2;
  if (text == "inf" || text == "Linf") return Norm::LInf;
  throw ParameterError("unknown norm '" + std::string(text) + "' (expected 1, 2 or inf)");
}

double lp_error(const Trajectory& a, const Trajectory& b, Norm p, Quantity quantity) {
  if (a.size() != b.size()) throw DimensionError("lp_error: sample grids differ in length");
  for (std::size_t k = 0; k < a.size(); ++k)
    if (std::abs(a.times[k] - b.times[k]) > 1e-9 * std::max(1.0, std::abs(a.times[k])))
      throw DimensionError("lp_error: sample grids differ");
  const auto& ya = a.series(quantity);
  const auto& yb = b.series(quantity);
  if (ya.size() != a.size() || yb.size() != b.size())
    throw DimensionError("lp_error: series length does not match the grid");
  std::vector<double> diff(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) diff[k] = std::abs(ya[k] - yb[k]);
  if (p == Norm::LInf) return diff.empty() ? 0.0 : *std::max_element(diff.begin(), diff.end());
  if (a.size() < 2) return 0.0;
  const double power = p == Norm::L1 ? 1.0 : 2.0;
  for (double& d : diff) d = std::pow(d, power);
  return std::pow(trapezoid(a.times, diff, a.times.front(), a.times.back()), 1.0 / power);
}

} // namespace floqscar
