#pragma once

#include "floqscar/scan.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace floqscar {

/// Everything a subcommand needs; flag names mirror the field names with
/// '-' for '_'.
struct RunConfig {
  std::string subcommand;

  int L = 8;
  double delta = 10.0;
  double J = 1.0;
  std::string psi = "s";
  std::string thermal = "th";

  std::optional<double> u; ///< static interaction; overrides the drive when set
  double u0 = 4.4;
  double um = 5.6;
  double omega = 2.8284271247461903;
  std::optional<double> omega_sqrt2_mult;

  double t_end = 50.0;
  double sample_dt = 0.02;
  double steps_per_unit = 200.0;
  std::string stepper = "trotter";
  bool skip_entropy = false;
  bool skip_imbalance = false;

  double tau = 50.0;
  double tau_f = 100.0;
  double omega_min = 0.2;
  double omega_max = 8.0;

  int bins = 20;
  double floor_factor = 10.0;
  double relative_floor = 0.1;
  double window_sigmas = 2.0;

  std::optional<int> k;
  int n = 0;
  double tol = 1e-9;
  std::string reference = "s";

  std::string branch = "minus";
  std::string format = "both";
  double weight_floor = 1e-12;

  std::string u0_axis = "0:10:101";
  std::string um_axis = "0:10:101";
  std::string omega_axis = "1:4:31";
  std::string omega_axis_unit = "sqrt2";
  std::string optimal = "line";
  double line_step = 0.1;
  double u_target = 10.0;

  unsigned threads = 0;
  std::string output_dir;

  /// Drive frequency after applying omega_sqrt2_mult.
  double drive_omega() const;
  /// Static protocol when u is set or um == 0, otherwise the square wave.
  DriveProtocol protocol() const;
  /// Throws ParameterError on the first invalid field.
  void validate() const;
};

/// "min:max:points".
Axis parse_axis(std::string_view name, std::string_view text);

/// $FLOQSCAR_OUTPUT_DIR if set, else ./floqscar-out.
std::filesystem::path default_output_dir();

/// Parses the command line, runs one subcommand and writes its artifacts and
/// manifest.json. Returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace floqscar
