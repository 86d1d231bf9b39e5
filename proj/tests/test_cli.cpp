#include <doctest.h>

#include "floqscar/cli.hpp"
#include "floqscar/errors.hpp"
#include "floqscar/graph.hpp"
#include "floqscar/io.hpp"
#include "floqscar/validation.hpp"

#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace floqscar;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "floqscar");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("floqscar_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

nlohmann::json manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  return nlohmann::json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

} // namespace

TEST_CASE("perturb lists the 63-member set and writes a manifest") {
  const auto dir = fresh_dir("perturb");
  const auto r = cli({"perturb", "--L", "6", "--delta", "10", "--omega", "2.8284271247", "--k", "3", "--output-dir",
                      dir.string()});
  REQUIRE(r.status == 0);
  const auto m = manifest(dir);
  CHECK(m["subcommand"] == "perturb");
  CHECK(m["results"]["members"] == 63);
  CHECK(m["config"]["k"] == 3);
  REQUIRE(m["outputs"].size() == 2);
  const auto table = read_csv(dir / m["outputs"][0].get<std::string>());
  CHECK(table.header == std::vector<std::string>{"index", "label", "tiltsum", "doublons"});
  CHECK(table.rows.size() == 63);
  const auto predicted = read_csv(dir / m["outputs"][1].get<std::string>());
  CHECK(predicted.header == std::vector<std::string>{"quasienergy", "overlap_ref", "tower_flag"});
}

TEST_CASE("config file values are overridden by flags") {
  const auto dir = fresh_dir("config");
  fs::create_directories(dir);
  {
    std::ofstream ini(dir / "job.ini");
    ini << "L=4\nu0=2\num=1\nt-end=1\ntau=1\n";
  }
  const auto r = cli({"evolve", "--config", (dir / "job.ini").string(), "--u0", "3", "--output-dir", dir.string()});
  REQUIRE(r.status == 0);
  const auto m = manifest(dir);
  CHECK(m["config"]["L"] == 4);
  CHECK(m["config"]["u0"] == 3.0);
  CHECK(m["config"]["um"] == 1.0);
  CHECK(m["results"].contains("average_fidelity"));
  const auto traj = read_csv(dir / m["outputs"][0].get<std::string>());
  CHECK(traj.header == std::vector<std::string>{"time", "fidelity", "entropy", "imbalance"});
  CHECK(traj.rows.size() == 51);
}

TEST_CASE("rerunning from the manifest config reproduces the CSV byte for byte") {
  const auto first = fresh_dir("rerun_a");
  const auto second = fresh_dir("rerun_b");
  REQUIRE(cli({"floquet", "--L", "4", "--u0", "1.5", "--um", "2", "--omega-sqrt2-mult", "2", "--output-dir",
               first.string()})
              .status == 0);
  const auto m = manifest(first);
  CHECK(m["rerun"] == "floqscar floquet --config run.ini");
  REQUIRE(cli({"floquet", "--config", (first / "run.ini").string(), "--output-dir", second.string()}).status == 0);
  const auto name = m["outputs"][0].get<std::string>();
  CHECK(name.find("omega2.8284271247461903") != std::string::npos);
  CHECK(slurp(first / name) == slurp(second / name));
  CHECK(manifest(second)["outputs"] == m["outputs"]);
}

TEST_CASE("output directory defaults to the environment variable") {
  const auto dir = fresh_dir("env");
  ::setenv("FLOQSCAR_OUTPUT_DIR", dir.string().c_str(), 1);
  CHECK(default_output_dir() == dir);
  REQUIRE(cli({"spectrum", "--L", "4", "--u", "10"}).status == 0);
  ::unsetenv("FLOQSCAR_OUTPUT_DIR");
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(manifest(dir)["results"].contains("towers"));
  CHECK(default_output_dir() == fs::path("floqscar-out"));
}

TEST_CASE("graph writes DOT and JSON that round-trips") {
  const auto dir = fresh_dir("graph");
  REQUIRE(cli({"graph", "--L", "6", "--output-dir", dir.string()}).status == 0);
  const auto m = manifest(dir);
  REQUIRE(m["outputs"].size() == 2);
  CHECK(m["results"]["vertices"] == 20);
  CHECK(m["results"]["U"] == doctest::Approx(4.4 - 5.6));
  const auto dot = slurp(dir / m["outputs"][0].get<std::string>());
  CHECK(dot.starts_with("graph adjacency {"));
  const auto g = graph_from_json(slurp(dir / m["outputs"][1].get<std::string>()));
  CHECK(g.vertices.size() == 20);
  CHECK(g.edges.size() == m["results"]["edges"].get<std::size_t>());
}

TEST_CASE("small u0-um scan through the CLI") {
  const auto dir = fresh_dir("scan");
  const auto r = cli({"scan-u0um", "--L", "4", "--tau", "5", "--u0-axis", "0:4:3", "--um-axis", "0:1:2",
                      "--threads", "2", "--output-dir", dir.string()});
  REQUIRE(r.status == 0);
  const auto m = manifest(dir);
  CHECK(m["results"]["cells"] == 6);
  CHECK(m["results"]["failed"] == 0);
  CHECK(m["results"].contains("optimum"));
  CHECK(read_csv(dir / m["outputs"][0].get<std::string>()).rows.size() == 6);
}

TEST_CASE("invalid configurations exit non-zero with a message") {
  const auto dir = fresh_dir("bad");
  auto r = cli({"evolve", "--L", "5", "--output-dir", dir.string()});
  CHECK(r.status == 2);
  CHECK(r.err.find("even") != std::string::npos);
  r = cli({"evolve", "--steps-per-unit", "0.5", "--output-dir", dir.string()});
  CHECK(r.status == 2);
  r = cli({"evolve", "--delta", "nan", "--output-dir", dir.string()});
  CHECK(r.status != 0);
  r = cli({"evolve", "--no-such-flag", "1"});
  CHECK(r.status != 0);
  r = cli({"--L", "4"});
  CHECK(r.status != 0);
  r = cli({"perturb", "--L", "6", "--reference", "↕0↕0↕0", "--output-dir", dir.string()});
  CHECK(r.status == 2);
  CHECK_FALSE(fs::exists(dir / "manifest.json"));
}

TEST_CASE("axis strings") {
  const auto a = parse_axis("u0", "0:10:101");
  CHECK(a.points == 101);
  CHECK(a.step() == doctest::Approx(0.1));
  CHECK(parse_axis("um", "2.5:2.5:1").at(0) == 2.5);
  CHECK_THROWS_AS(parse_axis("u0", "0:10"), ParseError);
  CHECK_THROWS_AS(parse_axis("u0", "0:10:x"), ParseError);
  CHECK_THROWS_AS(parse_axis("u0", "0:10:0"), ParseError);
  CHECK_THROWS_AS(parse_axis("u0", "3:1:4"), ParameterError);
}

TEST_CASE("run config protocol and frequency") {
  RunConfig cfg;
  cfg.omega_sqrt2_mult = 1.5;
  CHECK(cfg.drive_omega() == 1.5 * std::numbers::sqrt2);
  CHECK_FALSE(cfg.protocol().is_static());
  cfg.u = 10.0;
  CHECK(cfg.protocol().is_static());
  CHECK(cfg.protocol().u0() == 10.0);
  CHECK_NOTHROW(cfg.validate());
  cfg.L = 0;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
}

TEST_CASE("validate passes and records every check") {
  const auto dir = fresh_dir("validate");
  const auto r = cli({"validate", "--output-dir", dir.string()});
  CHECK(r.status == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(read_csv(dir / "validation.csv").rows.size() == 8);
}

TEST_CASE("a throwing check is reported as a failure") {
  const auto c = run_check("boom", []() -> CheckResult { throw NumericalError("bad"); });
  CHECK_FALSE(c.passed);
  CHECK(c.detail.find("bad") != std::string::npos);
  CHECK_FALSE(all_passed({c}));
  std::ostringstream out;
  print_checks(out, {c});
  CHECK(out.str().starts_with("FAIL boom"));
}
