#include "floqscar/validation.hpp"

#include "floqscar/evolve.hpp"
#include "floqscar/floquet.hpp"
#include "floqscar/io.hpp"
#include "floqscar/observables.hpp"
#include "floqscar/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

namespace floqscar {

namespace {

const double kOmega = 2.0 * std::numbers::sqrt2;

CheckResult below(std::string name, double measured, double threshold, std::string detail = {}) {
  return {std::move(name), measured < threshold, measured, threshold, std::move(detail)};
}

CheckResult floquet_unitarity() {
  const auto parts = build_parts(half_filled_space(6), 1.0, 10.0);
  double worst = 0.0;
  for (const DriveProtocol& d : {DriveProtocol(4.4, 5.6, kOmega), DriveProtocol(2.5, 6.2, kOmega),
                                 DriveProtocol(8.26, 2.66, std::numbers::sqrt2)}) {
    const Eigen::MatrixXcd u = FloquetOperator(parts, d).matrix();
    const auto n = u.rows();
    worst = std::max(worst, (u.adjoint() * u - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff());
  }
  return below("floquet-unitarity", worst, 1e-10, "max |U^+U - 1|, L=6, three drives");
}

CheckResult stroboscopic() {
  const auto parts = build_parts(half_filled_space(6), 1.0, 10.0);
  const DriveProtocol d(4.4, 5.6, kOmega);
  const FloquetOperator op(parts, d);
  const int periods = 6;
  StateMatrix psi = fock_state(parts.space, resolve_state("s", 6));
  std::vector<double> samples;
  for (int m = 0; m <= periods; ++m) samples.push_back(m * d.period());
  EvolveOptions opts;
  opts.stepper = Stepper::ExactPiecewise;
  opts.record_entropy = false;
  opts.record_imbalance = false;
  opts.keep_snapshots = true;
  const auto traj = evolve(psi, parts, d, samples.back(), samples, opts);
  double worst = 0.0;
  for (int m = 1; m <= periods; ++m) {
    psi = op.apply(psi);
    worst = std::max(worst, (psi.amplitudes - traj.snapshots[static_cast<std::size_t>(m)].amplitudes)
                                .cwiseAbs()
                                .maxCoeff());
  }
  return below("stroboscopic-equivalence", worst, 1e-6, "max |U^m psi - psi(mT)|, m <= 6, L=6");
}

CheckResult fock_entropy() {
  double worst = 0.0;
  for (int L : {4, 6}) {
    const auto space = half_filled_space(L);
    const BipartitionMap map(space);
    for (std::size_t i = 0; i < space.dim(); ++i)
      worst = std::max(worst, std::abs(entanglement_entropy_half(fock_state(space, i), map)));
  }
  return below("fock-entropy-zero", worst, 1e-12, "all Fock states, L=4 and L=6");
}

CheckResult phase_antisymmetry() {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> energy(-40.0, 40.0);
  std::uniform_int_distribution<int> doublons(0, 4);
  std::uniform_real_distribution<double> drive(0.0, 10.0);
  double worst = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    const FockEnergy a{energy(rng), doublons(rng)};
    const FockEnergy b{energy(rng), doublons(rng)};
    const DriveProtocol d(drive(rng), drive(rng), 0.5 + drive(rng));
    worst = std::max(worst, std::abs(degeneracy_phase(a, b, d) + degeneracy_phase(b, a, d)));
  }
  return below("degeneracy-phase-antisymmetry", worst, 1e-12, "2000 random pairs");
}

CheckResult phase_um_independence() {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> energy(-40.0, 40.0);
  std::uniform_int_distribution<int> doublons(0, 4);
  std::uniform_real_distribution<double> drive(0.0, 10.0);
  double worst = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    const FockEnergy a{energy(rng), doublons(rng)};
    const FockEnergy b{energy(rng), doublons(rng)};
    const double u0 = drive(rng);
    const double omega = 0.5 + drive(rng);
    const double ref = degeneracy_phase(a, b, DriveProtocol(u0, 0.0, omega));
    worst = std::max(worst, std::abs(degeneracy_phase(a, b, DriveProtocol(u0, drive(rng), omega)) - ref));
  }
  return below("degeneracy-phase-um-independence", worst, 1e-12, "2000 random pairs");
}

CheckResult norm_conservation() {
  const auto parts = build_parts(half_filled_space(6), 1.0, 10.0);
  const DriveProtocol d(4.4, 5.6, kOmega);
  const auto samples = uniform_samples(0.0, 20.0, 1.0);
  EvolveOptions opts;
  opts.record_entropy = false;
  opts.record_imbalance = false;
  opts.keep_snapshots = true;
  const auto traj = evolve(fock_state(parts.space, resolve_state("s", 6)), parts, d, 20.0, samples, opts);
  double worst = 0.0;
  for (const auto& s : traj.snapshots) worst = std::max(worst, std::abs(s.norm() - 1.0));
  return below("trotter-norm-conservation", worst, 1e-10, "L=6, t <= 20");
}

} // namespace

CheckResult run_check(const std::string& name, const std::function<CheckResult()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {name, false, std::nan(""), std::nan(""), std::string("exception: ") + e.what()};
  }
}

std::vector<CheckResult> run_property_suite() {
  return {
      run_check("floquet-unitarity", floquet_unitarity),
      run_check("stroboscopic-equivalence", stroboscopic),
      run_check("fock-entropy-zero", fock_entropy),
      run_check("degeneracy-phase-antisymmetry", phase_antisymmetry),
      run_check("degeneracy-phase-um-independence", phase_um_independence),
      run_check("trotter-norm-conservation", norm_conservation),
  };
}

std::vector<CheckResult> run_validation_suite() {
  auto checks = run_property_suite();
  checks.push_back(run_check("dimension-L8", [] {
    const double dim = static_cast<double>(half_filled_space(8).dim());
    return CheckResult{"dimension-L8", dim == 4900.0, dim, 4900.0, "half filling, equal spins"};
  }));
  checks.push_back(run_check("degenerate-set-L6", [] {
    const auto parts = build_parts(half_filled_space(6), 1.0, 10.0);
    const DriveProtocol d(10.0 - 2.0 * kOmega, 5.6, kOmega);
    const auto set = build_degenerate_set(parts.space.index_of_label(format_label(resolve_state("s", 6))), parts, d);
    const bool split = set.doublon_histogram() == std::vector<std::size_t>{20, 30, 12, 1};
    return CheckResult{"degenerate-set-L6", set.size() == 63 && split, static_cast<double>(set.size()), 63.0,
                       split ? "doublons 20/30/12/1" : "wrong doublon split"};
  }));
  return checks;
}

void print_checks(std::ostream& out, const std::vector<CheckResult>& checks) {
  for (const auto& c : checks)
    out << (c.passed ? "PASS " : "FAIL ") << c.name << "  measured=" << format_double(c.measured)
        << " threshold=" << format_double(c.threshold) << (c.detail.empty() ? "" : "  " + c.detail) << '\n';
}

bool all_passed(const std::vector<CheckResult>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

} // namespace floqscar
