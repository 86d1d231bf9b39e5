#include <doctest.h>

#include "floqscar/errors.hpp"
#include "floqscar/evolve.hpp"
#include "floqscar/floquet.hpp"
#include "floqscar/io.hpp"
#include "floqscar/linalg.hpp"
#include "floqscar/observables.hpp"
#include "oracle/jordan_wigner.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace floqscar;

namespace {

using Complex = std::complex<double>;
const double kOmega = 2.0 * std::numbers::sqrt2;

Eigen::MatrixXcd expm(const Eigen::MatrixXd& h, double t) {
  const Eigen::MatrixXcd gen = Complex(0.0, -t) * h.cast<Complex>();
  return gen.exp();
}

// One period built from the Jordan-Wigner Hamiltonian and generic matrix
// exponentials.
Eigen::MatrixXcd oracle_period(const FockSpace& space, double J, double delta, const DriveProtocol& d) {
  const oracle::JordanWigner jw(space.sites(), oracle::ModeOrder::SpinMajor);
  const Eigen::MatrixXd emb = jw.sector_embedding(space);
  const Eigen::MatrixXd hp = oracle::project(oracle::hubbard_ring(jw, J, delta, d.high()), emb);
  const Eigen::MatrixXd hm = oracle::project(oracle::hubbard_ring(jw, J, delta, d.low()), emb);
  const double t = d.period();
  return expm(hp, 0.25 * t) * expm(hm, 0.5 * t) * expm(hp, 0.25 * t);
}

StateMatrix random_state(const FockSpace& space, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> n;
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(space.dim_up()), static_cast<Eigen::Index>(space.dim_down()));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = {n(gen), n(gen)};
  m /= m.norm();
  return {m, 0.0};
}

// <psi|U^m|psi> from a spectrum; insensitive to the basis chosen inside
// degenerate eigenspaces.
Complex return_amplitude(const FloquetSpectrum& s, int m) {
  Complex sum = 0.0;
  for (Eigen::Index k = 0; k < s.overlaps.size(); ++k) sum += s.overlaps(k) * std::pow(s.eigenvalues(k), m);
  return sum;
}

} // namespace

TEST_CASE("quasienergy folding") {
  const double w = 2.0;
  CHECK(fold_quasienergy(0.3, w) == doctest::Approx(0.3));
  CHECK(fold_quasienergy(1.0, w) == doctest::Approx(1.0));
  CHECK(fold_quasienergy(-1.0, w) == doctest::Approx(1.0));
  CHECK(fold_quasienergy(2.5, w) == doctest::Approx(0.5));
  CHECK(fold_quasienergy(-2.5, w) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(fold_quasienergy(1.0, 0.0), ParameterError);
}

TEST_CASE("property: folding lands in (-w/2, w/2], is idempotent and preserves e mod w") {
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> e(-500.0, 500.0);
  std::uniform_real_distribution<double> w(0.1, 10.0);
  for (int k = 0; k < 2000; ++k) {
    const double x = e(gen);
    const double om = w(gen);
    const double f = fold_quasienergy(x, om);
    CHECK(f > -0.5 * om);
    CHECK(f <= 0.5 * om);
    CHECK(fold_quasienergy(f, om) == f);
    const double turns = (x - f) / om;
    CHECK(std::abs(turns - std::round(turns)) < 1e-9);
  }
}

TEST_CASE("factorised operator matches the Jordan-Wigner oracle") {
  const DriveProtocol d(4.4, 5.6, kOmega);
  for (const FockSpace& space : {FockSpace(2, 1, 1), FockSpace(4, 2, 2), FockSpace(4, 1, 2), FockSpace(4, 3, 1)}) {
    const auto parts = build_parts(space, 1.0, 10.0);
    const FloquetOperator op(parts, d);
    const Eigen::MatrixXcd u = op.matrix();
    CHECK((u - oracle_period(space, 1.0, 10.0, d)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((u - floquet_operator_dense(parts, d)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("property: U is unitary and symmetric") {
  const auto parts = build_parts(half_filled_space(6), 1.0, 10.0);
  for (const DriveProtocol& d : {DriveProtocol(4.4, 5.6, kOmega), DriveProtocol(2.5, 6.2, kOmega),
                                 DriveProtocol(7.0, 3.0, 1.3)}) {
    const Eigen::MatrixXcd u = FloquetOperator(parts, d).matrix();
    const Eigen::MatrixXcd defect = u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
    CHECK(defect.cwiseAbs().maxCoeff() < 1e-10);
    CHECK((u - u.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("apply agrees with the dense matrix") {
  const auto parts = build_parts(half_filled_space(4), 1.0, 10.0);
  const FloquetOperator op(parts, DriveProtocol(4.4, 5.6, kOmega));
  const auto psi = random_state(parts.space, 5);
  const Eigen::VectorXcd v = flatten(psi);
  CHECK((op.apply(v) - op.matrix() * v).norm() < 1e-12);
  const auto next = op.apply(psi);
  CHECK(next.time == doctest::Approx(op.protocol().period()));
  CHECK_THROWS_AS(op.apply(Eigen::VectorXcd::Zero(3)), DimensionError);
}

TEST_CASE("eigenpairs: residual below 1e-8 on both routes") {
  const auto parts = build_parts(half_filled_space(6), 1.0, 10.0);
  const DriveProtocol d(4.4, 5.6, kOmega);
  const auto ref = fock_state(parts.space, resolve_state("s", 6));
  const FloquetOperator op(parts, d);
  const Eigen::MatrixXcd u = op.matrix();

  const auto dense = quasienergy_spectrum(u, kOmega, ref);
  const auto blocked = quasienergy_spectrum(op, ref);
  for (const auto* s : {&dense, &blocked}) {
    const Eigen::MatrixXcd g = s->eigenvectors.cast<Complex>();
    const Eigen::MatrixXcd r = u * g - g * s->eigenvalues.asDiagonal();
    CHECK(r.colwise().norm().maxCoeff() < 1e-8);
    const Eigen::MatrixXd gram = s->eigenvectors.transpose() * s->eigenvectors;
    CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(s->overlaps.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s->quasienergies.maxCoeff() <= 0.5 * kOmega);
    CHECK(s->quasienergies.minCoeff() > -0.5 * kOmega);
    for (Eigen::Index k = 0; k < s->quasienergies.size(); ++k) {
      const Complex back = std::polar(1.0, -s->quasienergies(k) * s->period);
      CHECK(std::abs(back - s->eigenvalues(k)) < 1e-9);
    }
  }
  for (int m : {1, 2, 5, 17}) CHECK(std::abs(return_amplitude(dense, m) - return_amplitude(blocked, m)) < 1e-9);
}

TEST_CASE("Um = 0: U = exp(-i H T) and quasienergies are folded static energies") {
  const auto parts = build_parts(half_filled_space(4), 1.0, 10.0);
  const DriveProtocol d(7.0, 0.0, 1.7);
  const auto ref = fock_state(parts.space, resolve_state("s", 4));
  const FloquetOperator op(parts, d);
  const Eigen::MatrixXd h = assemble_full(parts, 7.0);
  CHECK((op.matrix() - expm(h, d.period())).cwiseAbs().maxCoeff() < 1e-10);

  const auto spec = quasienergy_spectrum(op, ref);
  const auto stat = static_spectrum(parts, 7.0, ref);
  std::vector<double> a(spec.quasienergies.begin(), spec.quasienergies.end());
  std::vector<double> b;
  for (double e : stat.energies) b.push_back(fold_quasienergy(e, 1.7));
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-9));
}

TEST_CASE("stroboscopic: U^m psi equals exact piecewise evolution at t = mT") {
  const auto parts = build_parts(half_filled_space(6), 1.0, 10.0);
  const DriveProtocol d(4.4, 5.6, kOmega);
  const auto psi = fock_state(parts.space, resolve_state("s", 6));
  const FloquetOperator op(parts, d);
  const auto spec = quasienergy_spectrum(op, psi, false);
  std::vector<double> samples;
  for (int m = 0; m <= 6; ++m) samples.push_back(m * d.period());
  EvolveOptions opts;
  opts.stepper = Stepper::ExactPiecewise;
  opts.keep_snapshots = true;
  opts.record_entropy = false;
  const auto tr = evolve(psi, parts, d, samples.back(), samples, opts);
  StateMatrix s = psi;
  for (int m = 0; m <= 6; ++m) {
    CHECK((s.amplitudes - tr.snapshots[static_cast<std::size_t>(m)].amplitudes).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(std::norm(return_amplitude(spec, m)) == doctest::Approx(tr.fidelity[static_cast<std::size_t>(m)]).epsilon(1e-8));
    s = op.apply(s);
  }
}

TEST_CASE("reference and matrix checks") {
  const auto parts = build_parts(half_filled_space(4), 1.0, 10.0);
  const auto ref = fock_state(parts.space, 0);
  Eigen::MatrixXcd notu = Eigen::MatrixXcd::Identity(36, 36);
  notu(0, 0) = 2.0;
  CHECK_THROWS_AS(quasienergy_spectrum(notu, 1.0, ref), NumericalError);
  const auto small = fock_state(half_filled_space(2), 0);
  const FloquetOperator op(parts, DriveProtocol(1.0, 1.0, 1.0));
  CHECK_THROWS_AS(quasienergy_spectrum(op, small), DimensionError);
}

TEST_CASE("tower detection on a synthetic overlap profile") {
  // Peaks at -0.75, 0.0, 0.75 on a flat background; axis (-1.5, 1.5] in 20 bins.
  std::vector<double> e, o;
  for (int k = 0; k < 300; ++k) {
    e.push_back(-1.5 + 0.01 * (k + 0.5));
    o.push_back(1e-4);
  }
  auto put = [&](double at, double h) {
    const auto it = std::min_element(e.begin(), e.end(), [&](double a, double b) { return std::abs(a - at) < std::abs(b - at); });
    o[static_cast<std::size_t>(it - e.begin())] = h;
  };
  put(-0.75, 0.2);
  put(-0.745, 0.15); // same tower, neighbouring state
  put(0.0, 0.3);
  put(0.75, 0.1);
  const Eigen::VectorXd ev = Eigen::Map<Eigen::VectorXd>(e.data(), static_cast<Eigen::Index>(e.size()));
  const Eigen::VectorXd ov = Eigen::Map<Eigen::VectorXd>(o.data(), static_cast<Eigen::Index>(o.size()));
  const auto t = detect_towers(ev, ov, -1.5, 1.5);
  REQUIRE(t.centers.size() == 3);
  CHECK(t.structured());
  CHECK(t.centers[0].overlap == doctest::Approx(0.2));
  CHECK(std::abs(t.centers[1].energy) < 0.01);
  CHECK(t.spacing == doctest::Approx(0.75).epsilon(0.02));
  for (std::size_t k = 1; k < t.centers.size(); ++k) CHECK(t.centers[k].energy > t.centers[k - 1].energy);

  TowerOptions strict;
  strict.relative_floor = 0.7;
  const auto one = detect_towers(ev, ov, -1.5, 1.5, strict);
  CHECK(one.centers.size() == 1);
  CHECK_FALSE(one.structured());
  CHECK(std::isnan(one.spacing));

  TowerOptions bad;
  bad.n_bins = 0;
  CHECK_THROWS_AS(detect_towers(ev, ov, -1.5, 1.5, bad), ParameterError);
}

TEST_CASE("Floquet tower bins wrap around the zone edge") {
  FloquetSpectrum s;
  s.omega = 2.0;
  s.period = std::numbers::pi;
  s.quasienergies = Eigen::VectorXd::LinSpaced(200, -0.995, 1.0);
  s.overlaps = Eigen::VectorXd::Constant(200, 1e-4);
  s.overlaps(199) = 0.2; // at +1, top edge of the zone
  s.overlaps(0) = 0.1;   // at -0.995, first bin after wrapping
  s.overlaps(100) = 0.3;
  const auto t = detect_towers(s);
  REQUIRE(t.centers.size() == 2);
  CHECK(t.centers[1].energy == doctest::Approx(1.0));
}

TEST_CASE("spectrum CSV columns") {
  const auto dir = std::filesystem::temp_directory_path() / "floqscar_spectrum_test";
  std::filesystem::create_directories(dir);
  const Eigen::VectorXd e = Eigen::VectorXd::LinSpaced(5, -1.0, 1.0);
  const Eigen::VectorXd o = Eigen::VectorXd::Constant(5, 0.2);
  ScarTowers t;
  t.centers.push_back({0.0, 0.2, 2});
  write_spectrum_csv(dir / "s.csv", e, o, t, "quasienergy");
  const auto table = read_csv(dir / "s.csv");
  REQUIRE(table.header == std::vector<std::string>{"quasienergy", "overlap_ref", "tower_flag"});
  REQUIRE(table.rows.size() == 5);
  CHECK(table.rows[2][2] == "1");
  CHECK(table.rows[1][2] == "0");
  CHECK(std::stod(table.rows[4][0]) == 1.0);
}

TEST_CASE("static towers of the scar state at L = 6 are spaced near sqrt 2") {
  const auto parts = build_parts(half_filled_space(6), 1.0, 10.0);
  const auto psi = fock_state(parts.space, resolve_state("s", 6));
  const auto spec = static_spectrum(parts, 10.0, psi);
  CHECK(spec.overlaps.sum() == doctest::Approx(1.0));
  const auto [lo, hi] = overlap_window(spec, 1.0);
  // <H> of the product state is its diagonal energy; dH^2 counts its allowed hops.
  const double energy = (psi.amplitudes.cwiseAbs2().array() * parts.diagonal(10.0).array()).sum();
  CHECK(0.5 * (lo + hi) == doctest::Approx(energy));
  const auto towers = detect_towers(spec);
  CHECK(towers.centers.size() >= 4);
  CHECK(towers.spacing == doctest::Approx(std::numbers::sqrt2).epsilon(0.1));
}
