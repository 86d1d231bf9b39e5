#include "floqscar/evolve.hpp"

#include "floqscar/errors.hpp"
#include "floqscar/linalg.hpp"
#include "floqscar/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>

namespace floqscar {

Stepper parse_stepper(std::string_view text) {
  if (text == "trotter") return Stepper::Trotter;
  if (text == "rk4") return Stepper::RungeKutta4;
  if (text == "exact") return Stepper::ExactPiecewise;
  throw ParameterError("unknown stepper '" + std::string(text) + "' (expected trotter, rk4 or exact)");
}

namespace {

using Complex = std::complex<double>;
constexpr Complex kI{0.0, 1.0};

Eigen::MatrixXcd exp_symmetric(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& eig, double dt) {
  const Eigen::VectorXcd phase =
      eig.eigenvalues().unaryExpr([dt](double e) { return std::polar(1.0, -e * dt); });
  const Eigen::MatrixXcd v = eig.eigenvectors().cast<Complex>();
  return v * phase.asDiagonal() * v.transpose();
}

Eigen::MatrixXcd phase_matrix(const HamiltonianParts& parts, double U, double dt) {
  return parts.diagonal(U).unaryExpr([dt](double f) { return std::polar(1.0, -f * dt); });
}

// Advances a state across a gap over which U is constant.
class Propagator {
public:
  virtual ~Propagator() = default;
  virtual void advance(Eigen::MatrixXcd& m, double U, double gap) = 0;
};

class TrotterPropagator final : public Propagator {
public:
  TrotterPropagator(const HamiltonianParts& parts, double n)
      : parts_(parts), n_(n), eig_up_(parts.hop_up), eig_dn_(parts.hop_down) {}

  void advance(Eigen::MatrixXcd& m, double U, double gap) override {
    const auto steps = std::max<long long>(1, static_cast<long long>(std::ceil(gap * n_ - 1e-9)));
    const double dt = gap / static_cast<double>(steps);
    if (dt != dt_) {
      a_ = exp_symmetric(eig_up_, dt);
      b_ = exp_symmetric(eig_dn_, dt);
      dt_ = dt;
      u_.reset();
    }
    if (!u_ || *u_ != U) {
      p_ = phase_matrix(parts_, U, dt);
      u_ = U;
    }
    Eigen::MatrixXcd tmp(m.rows(), m.cols());
    for (long long s = 0; s < steps; ++s) {
      tmp.noalias() = a_ * m;
      m.noalias() = tmp * b_;
      m.array() *= p_.array();
    }
  }

private:
  const HamiltonianParts& parts_;
  double n_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_up_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_dn_;
  double dt_ = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> u_;
  Eigen::MatrixXcd a_, b_, p_;
};

class RungeKuttaPropagator final : public Propagator {
public:
  RungeKuttaPropagator(const HamiltonianParts& parts, double dt_max)
      : parts_(parts), dt_max_(dt_max), hu_(parts.hop_up.sparseView().cast<Complex>()),
        hd_(parts.hop_down.sparseView().cast<Complex>()) {}

  void advance(Eigen::MatrixXcd& m, double U, double gap) override {
    const auto steps = std::max<long long>(1, static_cast<long long>(std::ceil(gap / dt_max_ - 1e-9)));
    const double dt = gap / static_cast<double>(steps);
    // The constant shift c only contributes the global phase e^{-i c gap},
    // restored exactly at the end; it keeps |H - c| small for RK4.
    const Eigen::MatrixXd diag = parts_.diagonal(U);
    const double shift = 0.5 * (diag.maxCoeff() + diag.minCoeff());
    const Eigen::ArrayXXcd f = (diag.array() - shift).cast<Complex>();
    Eigen::MatrixXcd y(m.rows(), m.cols());
    auto rhs = [&](const Eigen::MatrixXcd& x, Eigen::MatrixXcd& out) {
      y.noalias() = hu_ * x;
      y.noalias() += x * hd_;
      y.array() += f * x.array();
      out = -kI * y;
    };
    Eigen::MatrixXcd k1, k2, k3, k4, tmp;
    for (long long s = 0; s < steps; ++s) {
      rhs(m, k1);
      tmp = m + (0.5 * dt) * k1;
      rhs(tmp, k2);
      tmp = m + (0.5 * dt) * k2;
      rhs(tmp, k3);
      tmp = m + dt * k3;
      rhs(tmp, k4);
      m += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    m *= std::polar(1.0, -shift * gap);
  }

private:
  const HamiltonianParts& parts_;
  double dt_max_;
  Eigen::SparseMatrix<Complex> hu_, hd_;
};

class ExactPropagator final : public Propagator {
public:
  explicit ExactPropagator(const HamiltonianParts& parts)
      : parts_(parts), blocks_(spin_flip_blocks(parts.space)) {}

  void advance(Eigen::MatrixXcd& m, double U, double gap) override {
    auto it = cache_.find(U);
    if (it == cache_.end()) it = cache_.emplace(U, eigh_blocked(assemble_full(parts_, U), blocks_)).first;
    const SymmetricEigen& e = it->second;
    StateMatrix s{m, 0.0};
    const Eigen::VectorXcd v = flatten(s);
    const Eigen::VectorXcd coeff = e.vectors.transpose().cast<Complex>() * v;
    const Eigen::VectorXcd phased =
        coeff.cwiseProduct(e.values.unaryExpr([gap](double x) { return std::polar(1.0, -x * gap); }));
    const Eigen::VectorXcd out = e.vectors.cast<Complex>() * phased;
    m = unflatten(out, m.rows(), m.cols()).amplitudes;
  }

private:
  const HamiltonianParts& parts_;
  std::vector<Eigen::SparseMatrix<double>> blocks_;
  std::map<double, SymmetricEigen> cache_;
};

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-11 * std::max(1.0, std::abs(b)); }

std::vector<double> checked_samples(std::span<const double> samples, double t0, double t_end) {
  std::vector<double> out(samples.begin(), samples.end());
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (!std::isfinite(out[k])) throw ParameterError("sample times must be finite");
    if (out[k] < t0 && !same_time(out[k], t0)) throw ParameterError("sample time before the initial time");
    if (out[k] > t_end && !same_time(out[k], t_end))
      throw ParameterError("sample time " + std::to_string(out[k]) + " beyond t_end");
    if (k > 0 && !(out[k] > out[k - 1])) throw ParameterError("sample times must be strictly increasing");
  }
  return out;
}

Trajectory run(const StateMatrix& psi0, const HamiltonianParts& parts, const DriveProtocol& protocol,
               double t_end, std::span<const double> samples, Propagator& prop, const EvolveOptions& opts) {
  const auto du = static_cast<Eigen::Index>(parts.space.dim_up());
  const auto dd = static_cast<Eigen::Index>(parts.space.dim_down());
  if (psi0.rows() != du || psi0.cols() != dd) throw DimensionError("initial state does not match the basis");
  const double t0 = psi0.time;
  if (!(t_end >= t0)) throw ParameterError("t_end before the initial time");
  const auto sample_times = checked_samples(samples, t0, t_end);

  std::vector<double> events(sample_times);
  const auto switches = protocol.switch_times(t0, t_end);
  events.insert(events.end(), switches.begin(), switches.end());
  events.push_back(t_end);
  std::sort(events.begin(), events.end());
  std::vector<double> unique;
  for (double e : events)
    if (unique.empty() || !same_time(e, unique.back())) unique.push_back(e);

  std::optional<BipartitionMap> bip;
  if (opts.record_entropy) bip.emplace(parts.space);
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  Trajectory traj;
  traj.times.reserve(sample_times.size());
  Eigen::MatrixXcd m = psi0.amplitudes;
  std::size_t next_sample = 0;
  auto record = [&](double t) {
    const StateMatrix s{m, t};
    traj.times.push_back(sample_times[next_sample]);
    traj.fidelity.push_back(fidelity(s, psi0));
    traj.entropy.push_back(bip ? entanglement_entropy_half(s, *bip) : kNaN);
    traj.imbalance.push_back(opts.record_imbalance ? imbalance(s, parts.space) : kNaN);
    if (opts.keep_snapshots) traj.snapshots.push_back(s);
    ++next_sample;
  };

  double t = t0;
  if (next_sample < sample_times.size() && same_time(sample_times[next_sample], t0)) record(t);
  for (double e : unique) {
    if (same_time(e, t) || e < t) continue;
    const double gap = e - t;
    prop.advance(m, protocol.value(t + 0.5 * gap), gap);
    t = e;
    while (next_sample < sample_times.size() && same_time(sample_times[next_sample], t)) record(t);
  }
  if (next_sample != sample_times.size()) throw NumericalError("not all sample times were reached");
  return traj;
}

} // namespace

StateMatrix trotter_step(const StateMatrix& state, const HamiltonianParts& parts, double U, double dt) {
  if (!(dt > 0.0)) throw ParameterError("time step must be positive");
  TrotterPropagator prop(parts, 1.0 / dt);
  StateMatrix out = state;
  prop.advance(out.amplitudes, U, dt);
  out.time += dt;
  return out;
}

Trajectory evolve(const StateMatrix& psi0, const HamiltonianParts& parts, const DriveProtocol& protocol,
                  double t_end, std::span<const double> samples, const EvolveOptions& opts) {
  if (!(opts.steps_per_unit >= 1.0)) throw ParameterError("steps per unit time must be >= 1");
  std::unique_ptr<Propagator> prop;
  switch (opts.stepper) {
  case Stepper::Trotter: prop = std::make_unique<TrotterPropagator>(parts, opts.steps_per_unit); break;
  case Stepper::RungeKutta4:
    prop = std::make_unique<RungeKuttaPropagator>(parts, 1.0 / opts.steps_per_unit);
    break;
  case Stepper::ExactPiecewise: prop = std::make_unique<ExactPropagator>(parts); break;
  }
  return run(psi0, parts, protocol, t_end, samples, *prop, opts);
}

Trajectory rk4_oracle(const StateMatrix& psi0, const HamiltonianParts& parts,
                      const DriveProtocol& protocol, double t_end, double dt,
                      std::span<const double> samples) {
  if (!(dt > 0.0)) throw ParameterError("time step must be positive");
  EvolveOptions opts;
  opts.steps_per_unit = 1.0 / dt;
  opts.stepper = Stepper::RungeKutta4;
  RungeKuttaPropagator prop(parts, dt);
  return run(psi0, parts, protocol, t_end, samples, prop, opts);
}

} // namespace floqscar
