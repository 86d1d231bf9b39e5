#include "floqscar/perturbation.hpp"

#include "floqscar/errors.hpp"
#include "floqscar/floquet.hpp"
#include "floqscar/io.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <unordered_map>

namespace floqscar {

namespace {

using Complex = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// integral_0^len exp(i r s) ds
Complex segment_integral(double r, double len) {
  const double x = 0.5 * r * len;
  const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
  return len * sinc * std::polar(1.0, x);
}

} // namespace

FockEnergy fock_energy(const HamiltonianParts& parts, std::size_t flat) {
  if (flat >= parts.space.dim()) throw ParameterError("state index outside the basis");
  const auto a = static_cast<Eigen::Index>(parts.space.up_index(flat));
  const auto b = static_cast<Eigen::Index>(parts.space.down_index(flat));
  return {parts.tilt(a, b), parts.ndouble(a, b)};
}

double degeneracy_phase(const FockEnergy& i, const FockEnergy& j, const DriveProtocol& protocol) {
  const double t = protocol.period();
  return t * ((j.static_part - i.static_part) + (j.doublons - i.doublons) * protocol.u0());
}

double phase_mismatch(double phase) { return std::abs(std::remainder(phase, kTwoPi)); }

Complex phase_integral(const FockEnergy& i, const FockEnergy& j, const DriveProtocol& protocol) {
  const double t = protocol.period();
  const double a = j.static_part - i.static_part;
  const int b = j.doublons - i.doublons;
  const double high = a + b * protocol.high();
  const double low = a + b * protocol.low();
  // segments [0, T/4), [T/4, 3T/4), [3T/4, T)
  Complex sum = segment_integral(high, 0.25 * t);
  double phi = high * 0.25 * t;
  sum += std::polar(1.0, phi) * segment_integral(low, 0.5 * t);
  phi += low * 0.5 * t;
  sum += std::polar(1.0, phi) * segment_integral(high, 0.25 * t);
  return sum;
}

Complex nondegenerate_coefficient(const FockEnergy& i, const FockEnergy& j, const DriveProtocol& protocol,
                                  double v_elem, double tol) {
  const double phase = degeneracy_phase(i, j, protocol);
  if (phase_mismatch(phase) < tol)
    throw ParameterError("pair is degenerate; use the degenerate-set Floquet block instead");
  if (v_elem == 0.0) return 0.0;
  const Complex denom = std::polar(1.0, phase) - 1.0;
  return Complex(0.0, -v_elem) * phase_integral(i, j, protocol) / denom;
}

std::vector<std::size_t> DegenerateSet::doublon_histogram() const {
  std::vector<std::size_t> out;
  for (const auto& e : energies) {
    const auto d = static_cast<std::size_t>(e.doublons);
    if (out.size() <= d) out.resize(d + 1, 0);
    ++out[d];
  }
  return out;
}

DegenerateSet build_degenerate_set(std::size_t reference, const HamiltonianParts& parts,
                                   const DriveProtocol& protocol, double tol) {
  const FockSpace& space = parts.space;
  const FockEnergy ref = fock_energy(parts, reference);
  if (ref.doublons != 0) throw ParameterError("reference state must be doublon-free");

  const double scale = std::max(1.0, std::abs(ref.static_part));
  std::unordered_map<std::size_t, Membership> in_set;
  in_set.emplace(reference, Membership::EnergyEqual);
  std::deque<std::size_t> frontier{reference};
  for (std::size_t f = 0; f < space.dim(); ++f) {
    const FockEnergy e = fock_energy(parts, f);
    if (f == reference || e.doublons != 0) continue;
    if (std::abs(e.static_part - ref.static_part) <= 1e-12 * scale) {
      in_set.emplace(f, Membership::EnergyEqual);
      frontier.push_back(f);
    }
  }

  const Eigen::SparseMatrix<double> hop = assemble_hopping(parts);
  while (!frontier.empty()) {
    const std::size_t from = frontier.front();
    frontier.pop_front();
    const int from_doublons = fock_energy(parts, from).doublons;
    for (Eigen::SparseMatrix<double>::InnerIterator it(hop, static_cast<Eigen::Index>(from)); it; ++it) {
      const auto to = static_cast<std::size_t>(it.row());
      if (it.value() == 0.0 || in_set.contains(to)) continue;
      const FockEnergy e = fock_energy(parts, to);
      if (std::abs(e.doublons - from_doublons) != 1) continue;
      if (phase_mismatch(degeneracy_phase(ref, e, protocol)) >= tol) continue;
      in_set.emplace(to, Membership::OneHopExtended);
      frontier.push_back(to);
    }
  }

  std::vector<std::size_t> others;
  for (const auto& [f, m] : in_set)
    if (f != reference) others.push_back(f);
  std::sort(others.begin(), others.end(), [&](std::size_t x, std::size_t y) {
    const auto kx = std::tuple(in_set.at(x), fock_energy(parts, x).doublons, x);
    const auto ky = std::tuple(in_set.at(y), fock_energy(parts, y).doublons, y);
    return kx < ky;
  });

  DegenerateSet out;
  out.reference = reference;
  out.members.push_back(reference);
  out.members.insert(out.members.end(), others.begin(), others.end());
  for (std::size_t f : out.members) {
    out.energies.push_back(fock_energy(parts, f));
    out.membership.push_back(in_set.at(f));
  }
  return out;
}

PerturbativeResult perturbative_floquet_block(const DegenerateSet& set, const HamiltonianParts& parts,
                                              const DriveProtocol& protocol) {
  const auto n = static_cast<Eigen::Index>(set.size());
  if (n == 0) throw ParameterError("empty degenerate set");
  const double t = protocol.period();
  std::unordered_map<std::size_t, Eigen::Index> position;
  for (Eigen::Index k = 0; k < n; ++k) position.emplace(set.members[static_cast<std::size_t>(k)], k);

  const Eigen::SparseMatrix<double> hop = assemble_hopping(parts);
  PerturbativeResult out;
  out.floquet_hamiltonian = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    const auto& ej = set.energies[static_cast<std::size_t>(col)];
    for (Eigen::SparseMatrix<double>::InnerIterator it(hop, static_cast<Eigen::Index>(set.members[static_cast<std::size_t>(col)])); it; ++it) {
      const auto found = position.find(static_cast<std::size_t>(it.row()));
      if (found == position.end()) continue;
      const auto& ei = set.energies[static_cast<std::size_t>(found->second)];
      // (H_F)_{ij} = V_ij / T * int_0^T exp(i int_0^t (E_i - E_j))
      out.floquet_hamiltonian(found->second, col) = it.value() / t * phase_integral(ej, ei, protocol);
    }
  }
  const double asym = (out.floquet_hamiltonian - out.floquet_hamiltonian.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) throw NumericalError("perturbative Floquet block is not Hermitian (" + format_double(asym) + ")");

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(out.floquet_hamiltonian);
  out.eigenphases = t * eig.eigenvalues();
  out.eigenvectors = eig.eigenvectors();
  const FockEnergy& ref = set.energies.front();
  const double mean_energy = ref.static_part + ref.doublons * protocol.u0();
  out.quasienergies = out.eigenphases.unaryExpr(
      [&](double s) { return fold_quasienergy(s / t + mean_energy, protocol.omega()); });
  out.overlaps = out.eigenvectors.row(0).cwiseAbs2().transpose();
  return out;
}

std::vector<EmergencePoint> emergence_conditions(double delta, double omega, double lo, double hi) {
  if (!(omega > 0.0)) throw ParameterError("omega must be positive");
  if (!std::isfinite(delta) || !std::isfinite(lo) || !std::isfinite(hi)) throw ParameterError("non-finite range");
  const double slack = 1e-9 * std::max({1.0, std::abs(lo), std::abs(hi)});
  auto k = static_cast<int>(std::floor(delta / omega));
  double tilde = delta - k * omega;
  if (tilde >= omega - 1e-12 * omega) {
    ++k;
    tilde = delta - k * omega;
  }
  std::vector<EmergencePoint> out;
  const auto n0 = static_cast<int>(std::ceil((lo - slack - tilde) / omega));
  for (int n = n0;; ++n) {
    const double u0 = tilde + n * omega;
    if (u0 > hi + slack) break;
    if (u0 >= lo - slack) out.push_back({u0, k, n});
  }
  return out;
}

void write_degenerate_set_csv(const std::filesystem::path& path, const DegenerateSet& set,
                              const HamiltonianParts& parts) {
  CsvWriter csv(path, {"index", "label", "tiltsum", "doublons"});
  for (std::size_t k = 0; k < set.size(); ++k) {
    const std::size_t f = set.members[k];
    csv.cell(f).cell(parts.space.label(f)).cell(parts.space.site_sum(f)).cell(set.energies[k].doublons).end_row();
  }
}

} // namespace floqscar
