#include <doctest.h>

#include "floqscar/errors.hpp"
#include "floqscar/scan.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

using namespace floqscar;

namespace {

ScanSettings small_settings(unsigned threads) {
  ScanSettings s;
  s.sites = 4;
  s.tau = 10.0;
  s.sample_dt = 0.02;
  s.steps_per_unit = 400.0;
  s.fourier.tau = 20.0;
  s.threads = threads;
  return s;
}

// time average of |<psi|e^{-iHt}|psi>|^2 over [0, tau] from the spectrum
double spectral_average(const Eigen::MatrixXd& h, const Eigen::VectorXcd& psi, double tau) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
  const Eigen::VectorXd p = (eig.eigenvectors().transpose() * psi).cwiseAbs2();
  const Eigen::VectorXd& e = eig.eigenvalues();
  double sum = 0.0;
  for (Eigen::Index a = 0; a < p.size(); ++a)
    for (Eigen::Index b = 0; b < p.size(); ++b) {
      const double x = (e(a) - e(b)) * tau;
      sum += p(a) * p(b) * (std::abs(x) < 1e-12 ? 1.0 : std::sin(x) / x);
    }
  return sum;
}

Trajectory synthetic(double (*f)(double)) {
  Trajectory t;
  for (double x : uniform_samples(0.0, 50.0, 0.01)) {
    t.times.push_back(x);
    t.fidelity.push_back(f(x));
  }
  return t;
}

} // namespace

TEST_CASE("axis spacing and endpoints") {
  const Axis a{"um", 0.0, 10.0, 101};
  CHECK(a.at(0) == 0.0);
  CHECK(a.at(100) == 10.0);
  CHECK(a.step() == doctest::Approx(0.1));
  CHECK(a.values().size() == 101);
  const Axis single{"u0", 3.0, 3.0, 1};
  CHECK(single.at(0) == 3.0);
  CHECK(single.step() == 0.0);
  CHECK_THROWS_AS((void)a.at(101), ParameterError);
}

TEST_CASE("response classification") {
  const double w = 2.0 * std::numbers::sqrt2;
  CHECK(classify_response(w, w).kind == ResponseKind::Harmonic);
  const auto half = classify_response(w, 0.5 * w * 1.03);
  CHECK(half.kind == ResponseKind::Subharmonic);
  CHECK(half.k == 2);
  CHECK(to_string(half) == "subharmonic(2)");
  CHECK(classify_response(w, 0.7 * w).kind == ResponseKind::Incommensurate);
  CHECK_THROWS_AS((void)classify_response(w, 0.0), ParameterError);
}

TEST_CASE("optimal u0 tie-break") {
  ScanGrid grid{{"u0", 0.0, 2.0, 3}, {"um", 0.0, 1.0, 2}, {}};
  for (double u0 : grid.first.values())
    for (double um : grid.second.values()) {
      CellResult c;
      c.u0 = u0;
      c.um = um;
      c.rho = (u0 >= 1.0) ? 2.0 : 1.0;
      grid.cells.push_back(c);
    }
  grid.cells[5].rho = 9.0;
  grid.cells[5].failed = true;
  const auto& best = find_optimal_u0(grid);
  CHECK(best.u0 == 1.0);
  CHECK(best.um == 0.0);

  for (auto& c : grid.cells) c.failed = true;
  CHECK_THROWS_AS((void)find_optimal_u0(grid), ParameterError);
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  std::vector<int> hits(257, 0);
  parallel_for(hits.size(), 4, [&](std::size_t k) { hits[k] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t k) {
                    if (k == 7) throw NumericalError("boom");
                  }),
                  NumericalError);
}

TEST_CASE("u0-um scan is independent of the thread count") {
  const Axis u0{"u0", 0.0, 4.0, 3};
  const Axis um{"um", 0.0, 2.0, 2};
  const double omega = 2.0 * std::numbers::sqrt2;
  const auto one = scan_u0_um(ScanContext(small_settings(1)), omega, u0, um);
  const auto three = scan_u0_um(ScanContext(small_settings(3)), omega, u0, um);
  REQUIRE(one.complete());
  REQUIRE(three.complete());
  for (std::size_t k = 0; k < one.cells.size(); ++k) {
    CHECK_FALSE(one.cells[k].failed);
    CHECK(one.cells[k].rho == three.cells[k].rho);
    CHECK(one.cells[k].average_scar == three.cells[k].average_scar);
  }
  CHECK(one.at(2, 1).u0 == 4.0);
  CHECK(one.at(2, 1).um == 2.0);
}

TEST_CASE("undriven column matches the spectral time average") {
  const ScanContext ctx(small_settings(1));
  const Axis u0{"u0", 1.0, 5.0, 3};
  const Axis um{"um", 0.0, 0.0, 1};
  const auto grid = scan_u0_um(ctx, 3.0, u0, um);
  for (int i = 0; i < u0.points; ++i) {
    const Eigen::MatrixXd h = assemble_full(ctx.parts(), u0.at(i));
    const double s = spectral_average(h, flatten(ctx.scar_state()), ctx.settings().tau);
    const double th = spectral_average(h, flatten(ctx.thermal_state()), ctx.settings().tau);
    const auto& c = grid.at(i, 0);
    CHECK(c.average_scar == doctest::Approx(s).epsilon(1e-4));
    CHECK(c.average_thermal == doctest::Approx(th).epsilon(1e-4));
    CHECK(c.rho == doctest::Approx((s - th) / th).epsilon(1e-3));
    CHECK(c.below_threshold == (c.rho < 1.0));
  }
}

TEST_CASE("omega-um scan uses the supplied u0 and records the revival") {
  const ScanContext ctx(small_settings(1));
  const Axis omega{"omega", 2.0, 4.0, 2};
  const Axis um{"um", 0.5, 0.5, 1};
  const auto grid = scan_omega_um(ctx, omega, um, [](double w) { return w; });
  REQUIRE(grid.complete());
  for (int i = 0; i < omega.points; ++i) {
    const auto& c = grid.at(i, 0);
    CHECK(c.u0 == omega.at(i));
    CHECK(c.has_peak);
    CHECK(c.peak.omega >= ctx.settings().fourier.omega_min);
    CHECK(c.peak.omega <= ctx.settings().fourier.omega_max);
  }
}

TEST_CASE("scan csv") {
  ScanGrid grid{{"u0", 0.0, 1.0, 2}, {"um", 0.0, 0.0, 1}, {}};
  CellResult ok;
  ok.rho = 2.5;
  ok.average_scar = 0.7;
  ok.average_thermal = 0.2;
  CellResult bad;
  bad.u0 = 1.0;
  bad.failed = true;
  grid.cells = {ok, bad};
  const auto path = std::filesystem::temp_directory_path() / "floqscar_scan_test.csv";
  write_scan_csv(path, grid);
  std::ifstream in(path);
  std::string header, first, second;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  CHECK(header == "u0,um,omega,avg_scar,avg_thermal,rho,omega_r,f_magnitude,f_real,response,status");
  CHECK(first.ends_with(",ok"));
  CHECK(first.find("nan") != std::string::npos);
  CHECK(second.ends_with(",failed"));
  std::filesystem::remove(path);
}

TEST_CASE("transition flag") {
  const ScarTowers flat{};
  ScarTowers towers;
  towers.centers = {{-1.0, 0.2, 0}, {1.0, 0.2, 1}};
  const auto wobble = synthetic([](double t) { return 0.6 + 0.3 * std::cos(t); });
  const auto decayed = synthetic([](double t) { return 0.02 + 0.5 * std::cos(t) * std::cos(t) * std::exp(-t); });
  const auto frozen = synthetic([](double) { return 0.9; });
  CHECK(flag_transition_state(wobble, wobble, flat));
  CHECK_FALSE(flag_transition_state(wobble, wobble, towers));
  CHECK_FALSE(flag_transition_state(wobble, decayed, flat));
  CHECK_FALSE(flag_transition_state(decayed, wobble, flat));
  CHECK_FALSE(flag_transition_state(frozen, frozen, flat));
}

TEST_CASE("bad settings") {
  auto s = small_settings(1);
  s.tau = 0.0;
  CHECK_THROWS_AS(ScanContext{s}, ParameterError);
  s = small_settings(1);
  s.sites = 5;
  CHECK_THROWS(ScanContext{s});
  const ScanContext ctx(small_settings(1));
  CHECK_THROWS_AS(scan_u0_um(ctx, 1.0, {"u0", 1.0, 0.0, 3}, {"um", 0.0, 0.0, 1}), ParameterError);
}

TEST_CASE("line search picks the best grid or emergence point below the target") {
  const ScanContext ctx(small_settings(2));
  const double omega = 2.0 * std::numbers::sqrt2;
  const auto grid = optimal_u0_on_line(ctx, omega, 4.0, {LineCandidates::Grid, 1.0});
  double best = -1e300;
  double best_u0 = -1.0;
  for (double u0 : {0.0, 1.0, 2.0, 3.0}) {
    const auto c = ctx.evaluate(DriveProtocol(u0, 4.0 - u0, omega), false);
    if (c.rho > best) {
      best = c.rho;
      best_u0 = u0;
    }
  }
  CHECK(grid.u0 == best_u0);
  CHECK(grid.um == 4.0 - best_u0);
  CHECK(grid.rho == best);

  const auto emergence = optimal_u0_on_line(ctx, omega, 4.0, {LineCandidates::Emergence, 1.0});
  const double k = (ctx.settings().delta - emergence.u0) / omega;
  CHECK(std::abs(k - std::round(k)) < 1e-9);
  CHECK(emergence.u0 < 4.0);

  CHECK_THROWS_AS((void)optimal_u0_on_line(ctx, omega, 4.0, {LineCandidates::Grid, 0.0}), ParameterError);
}
