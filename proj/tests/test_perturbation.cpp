#include <doctest.h>

#include "floqscar/errors.hpp"
#include "floqscar/floquet.hpp"
#include "floqscar/io.hpp"
#include "floqscar/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <random>

using namespace floqscar;

namespace {

using Complex = std::complex<double>;
const double kOmega = 2.0 * std::numbers::sqrt2;

// Composite Simpson on each constant piece of the drive, with phi(t) built by
// accumulating the energy difference sampled from DriveProtocol::value.
Complex quadrature_phase_integral(const FockEnergy& i, const FockEnergy& j, const DriveProtocol& d) {
  const double t_end = d.period();
  std::vector<double> edges{0.0};
  for (double s : d.switch_times(0.0, t_end)) edges.push_back(s);
  edges.push_back(t_end);
  auto rate = [&](double t) { return (j.static_part - i.static_part) + (j.doublons - i.doublons) * d.value(t); };
  Complex total = 0.0;
  double phi = 0.0;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const double a = edges[s];
    const double b = edges[s + 1];
    const int n = 20000;
    const double h = (b - a) / n;
    const double r = rate(0.5 * (a + b));
    Complex acc = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      acc += w * std::polar(1.0, phi + r * (k * h));
    }
    total += acc * (h / 3.0);
    phi += r * (b - a);
  }
  return total;
}

} // namespace

TEST_CASE("degeneracy phase closed form") {
  const DriveProtocol d(3.0, 1.7, 1.9);
  const FockEnergy a{10.0, 0};
  const FockEnergy b{12.5, 1};
  CHECK(degeneracy_phase(a, a, d) == 0.0);
  CHECK(degeneracy_phase(a, b, d) == doctest::Approx(d.period() * (2.5 + 3.0)));
  // doublon-free reference vs one doublon, tilt lowered by delta, at u0 = delta - k omega
  const double delta = 10.0;
  for (int k = 1; k <= 4; ++k) {
    const DriveProtocol res(delta - k * kOmega, 5.6, kOmega);
    const FockEnergy ref{210.0, 0};
    const FockEnergy dbl{210.0 - delta, 1};
    const double phase = degeneracy_phase(dbl, ref, res);
    CHECK(phase == doctest::Approx(2.0 * std::numbers::pi * k));
    CHECK(phase_mismatch(phase) < 1e-9);
  }
}

TEST_CASE("property: degeneracy phase is antisymmetric and independent of Um") {
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  std::uniform_int_distribution<int> nd(0, 4);
  for (int k = 0; k < 500; ++k) {
    const FockEnergy a{u(gen), nd(gen)};
    const FockEnergy b{u(gen), nd(gen)};
    const double u0 = u(gen);
    const double w = 0.5 + std::abs(u(gen));
    const DriveProtocol d1(u0, 0.0, w);
    const DriveProtocol d2(u0, std::abs(u(gen)), w);
    CHECK(degeneracy_phase(a, b, d1) == doctest::Approx(-degeneracy_phase(b, a, d1)));
    CHECK(degeneracy_phase(a, b, d1) == doctest::Approx(degeneracy_phase(a, b, d2)));
  }
}

TEST_CASE("phase integral: closed form matches quadrature to 1e-10") {
  std::mt19937 gen(8);
  std::uniform_real_distribution<double> u(-12.0, 12.0);
  std::uniform_int_distribution<int> nd(0, 3);
  for (int k = 0; k < 40; ++k) {
    const FockEnergy a{u(gen), nd(gen)};
    const FockEnergy b{u(gen), nd(gen)};
    const DriveProtocol d(u(gen), std::abs(u(gen)), 1.0 + std::abs(u(gen)) / 4.0);
    const Complex closed = phase_integral(a, b, d);
    const Complex quad = quadrature_phase_integral(a, b, d);
    CHECK(std::abs(closed - quad) < 1e-10);
  }
  // zero difference integrates to T
  const DriveProtocol d(1.0, 2.0, 3.0);
  CHECK(std::abs(phase_integral({1.0, 1}, {1.0, 1}, d) - Complex(d.period(), 0.0)) < 1e-14);
}

TEST_CASE("nondegenerate coefficient") {
  const DriveProtocol d(4.4, 5.6, kOmega);
  const FockEnergy ref{210.0, 0};
  const FockEnergy up{220.0, 1}; // doublon made by a hop raising the tilt
  CHECK(nondegenerate_coefficient(ref, up, d, 0.0) == Complex(0.0, 0.0));
  const Complex c = nondegenerate_coefficient(ref, up, d, -1.0);
  CAPTURE(std::abs(c));
  CHECK(std::abs(c) < 0.5);
  CHECK(std::abs(c) > 0.01);

  const FockEnergy down{200.0, 1};
  const DriveProtocol res(10.0 - 2.0 * kOmega, 5.6, kOmega);
  CHECK_THROWS_AS(nondegenerate_coefficient(ref, down, res, -1.0), ParameterError);
}

TEST_CASE("property: coefficient grows without bound approaching a resonance") {
  const FockEnergy ref{210.0, 0};
  const FockEnergy down{200.0, 1};
  const double resonance = 10.0 - 2.0 * kOmega;
  double previous = 0.0;
  for (double gap : {0.5, 0.2, 0.1, 0.05, 0.01, 1e-3, 1e-4}) {
    const DriveProtocol d(resonance + gap, 5.6, kOmega);
    const double mag = std::abs(nondegenerate_coefficient(ref, down, d, -1.0));
    CHECK(mag > previous);
    previous = mag;
  }
  CHECK(previous > 100.0);
}

TEST_CASE("degenerate set at L = 6 on resonance: 63 = 20 + 30 + 12 + 1") {
  const auto parts = build_parts(half_filled_space(6), 1.0, 10.0);
  const DriveProtocol d(10.0 - 2.0 * kOmega, 5.6, kOmega);
  const std::size_t ref = parts.space.index_of_label(format_label(resolve_state("s", 6)));
  const auto set = build_degenerate_set(ref, parts, d);
  CHECK(set.size() == 63);
  CHECK(set.doublon_histogram() == std::vector<std::size_t>{20, 30, 12, 1});
  CHECK(set.members.front() == ref);

  const auto hop = assemble_hopping(parts);
  const Eigen::MatrixXd dense(hop);
  for (std::size_t k = 0; k < set.size(); ++k) {
    CHECK(phase_mismatch(degeneracy_phase(set.energies.front(), set.energies[k], d)) < 1e-9);
    if (set.membership[k] != Membership::OneHopExtended) continue;
    bool linked = false;
    for (std::size_t m = 0; m < set.size(); ++m)
      linked = linked || dense(static_cast<Eigen::Index>(set.members[k]), static_cast<Eigen::Index>(set.members[m])) != 0.0;
    CHECK(linked);
  }
  // the fully doubled state |d0d0d0>
  const std::size_t full = parts.space.index_of_label("↕0↕0↕0");
  CHECK(std::find(set.members.begin(), set.members.end(), full) != set.members.end());
}

TEST_CASE("degenerate set off resonance and at L = 2") {
  const auto parts = build_parts(half_filled_space(6), 1.0, 10.0);
  const std::size_t ref = parts.space.index_of_label(format_label(resolve_state("s", 6)));
  const auto generic = build_degenerate_set(ref, parts, DriveProtocol(4.4, 5.6, kOmega));
  CHECK(generic.size() == 20);

  const auto two = build_parts(half_filled_space(2), 1.0, 10.0);
  const auto small = build_degenerate_set(two.space.index_of_label("↑↓"), two, DriveProtocol(3.0, 1.0, 2.0));
  REQUIRE(small.size() == 2);
  CHECK(two.space.label(small.members[1]) == "↓↑");

  const std::size_t with_doublon = parts.space.index_of_label("↕0↑↓↑↓");
  CHECK_THROWS_AS(build_degenerate_set(with_doublon, parts, DriveProtocol(4.4, 5.6, kOmega)), ParameterError);
}

TEST_CASE("perturbative block: zero off resonance, Hermitian and normalised on resonance") {
  const auto parts = build_parts(half_filled_space(6), 1.0, 10.0);
  const std::size_t ref = parts.space.index_of_label(format_label(resolve_state("s", 6)));

  const DriveProtocol generic(4.4, 5.6, kOmega);
  const auto flat = perturbative_floquet_block(build_degenerate_set(ref, parts, generic), parts, generic);
  CHECK(flat.floquet_hamiltonian.cwiseAbs().maxCoeff() == 0.0);
  CHECK(flat.eigenphases.cwiseAbs().maxCoeff() == 0.0);

  const DriveProtocol res(10.0 - 2.0 * kOmega, 5.6, kOmega);
  const auto set = build_degenerate_set(ref, parts, res);
  const auto r = perturbative_floquet_block(set, parts, res);
  CHECK((r.floquet_hamiltonian - r.floquet_hamiltonian.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(r.floquet_hamiltonian.cwiseAbs().maxCoeff() > 0.0);
  CHECK(r.overlaps.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.quasienergies.maxCoeff() <= 0.5 * kOmega);
  CHECK(r.quasienergies.minCoeff() > -0.5 * kOmega);
  for (Eigen::Index k = 1; k < r.eigenphases.size(); ++k) CHECK(r.eigenphases(k) >= r.eigenphases(k - 1));
}

TEST_CASE("perturbative towers track the exact Floquet towers at L = 6") {
  const auto parts = build_parts(half_filled_space(6), 1.0, 10.0);
  const auto psi = fock_state(parts.space, resolve_state("s", 6));
  const std::size_t ref = parts.space.index_of_label(format_label(resolve_state("s", 6)));
  const DriveProtocol res(10.0 - 2.0 * kOmega, 5.6, kOmega);
  const auto r = perturbative_floquet_block(build_degenerate_set(ref, parts, res), parts, res);
  const auto exact = quasienergy_spectrum(FloquetOperator(parts, res), psi, false);
  const auto towers = detect_towers(exact);
  REQUIRE(towers.centers.size() == 4);
  // Each exact tower top has a high-overlap prediction within 15% of the spacing.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(r.overlaps.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return r.overlaps(x) > r.overlaps(y); });
  order.resize(2 * towers.centers.size());
  for (const auto& c : towers.centers) {
    double nearest = 1e9;
    for (Eigen::Index k : order) {
      const double d = std::abs(fold_quasienergy(r.quasienergies(k) - c.energy, kOmega));
      nearest = std::min(nearest, d);
    }
    CAPTURE(c.energy);
    CHECK(nearest < 0.15 * towers.spacing);
  }
}

TEST_CASE("emergence conditions") {
  const auto lines = emergence_conditions(10.0, kOmega, 0.0, 10.0);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0].u0 == doctest::Approx(10.0 - 3.0 * kOmega));
  CHECK(lines[0].u0 == doctest::Approx(1.515).epsilon(1e-3));
  CHECK(lines[1].u0 == doctest::Approx(4.343).epsilon(1e-3));
  CHECK(lines[2].u0 == doctest::Approx(7.172).epsilon(1e-3));
  CHECK(lines[3].u0 == doctest::Approx(10.0));
  for (const auto& l : lines) CHECK(l.k == 3);
  CHECK(lines[3].n == 3);

  const auto four = emergence_conditions(10.0, 4.0, 0.0, 10.0);
  REQUIRE(four.size() == 3);
  CHECK(four.back().u0 == doctest::Approx(10.0));
  CHECK(four.back().u0 == 10.0 - four.back().k * 4.0 + four.back().n * 4.0);
  for (int k = 1; k <= 6; ++k) {
    const double w = 10.0 / (k + 0.5);
    const auto l = emergence_conditions(10.0, w, 0.0, 10.0);
    REQUIRE_FALSE(l.empty());
    CHECK(l.front().k == k);
    CHECK(l.front().u0 == doctest::Approx(10.0 - k * w));
  }
  CHECK_THROWS_AS(emergence_conditions(10.0, 0.0, 0.0, 1.0), ParameterError);
}

TEST_CASE("degenerate-set CSV") {
  const auto parts = build_parts(half_filled_space(4), 1.0, 10.0);
  const std::size_t ref = parts.space.index_of_label("↑↓↑↓");
  const auto set = build_degenerate_set(ref, parts, DriveProtocol(1.0, 1.0, 3.0));
  const auto path = std::filesystem::temp_directory_path() / "floqscar_set.csv";
  write_degenerate_set_csv(path, set, parts);
  const auto table = read_csv(path);
  CHECK(table.header == std::vector<std::string>{"index", "label", "tiltsum", "doublons"});
  REQUIRE(table.rows.size() == set.size());
  CHECK(table.rows[0][1] == "↑↓↑↓");
  CHECK(table.rows[0][2] == "10");
}
