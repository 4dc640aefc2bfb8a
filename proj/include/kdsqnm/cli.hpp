#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kdsqnm/inversion.hpp"
#include "kdsqnm/table.hpp"
#include "kdsqnm/verify.hpp"

namespace kdsqnm {

/// Every setting of one CLI run. The config file is flat `key = value` text
/// using the same names as the long flags; `#` starts a comment.
struct RunConfig {
  std::string command;

  double M = 1.0;
  double a = 0.0;
  double Lambda = 0.0;
  int n = 0;
  int ell = 100;
  Branch branch = Branch::co;

  // observables for invert / invert3
  std::optional<double> U;
  std::optional<double> V;
  std::optional<double> W;
  bool unlabeled = false;

  // tolerances
  double tolerance = 1e-12;
  double tolerance3 = 1e-11;
  double collision_tolerance = 1e-9;
  JacobianMethod jacobian = JacobianMethod::finite_difference;

  // scan-pmatrix
  RectangleSpec rect{};
  bool nodes = false;  ///< per-node rows instead of the summary row

  // verify-series: a series quantity, or det_limit / wminusu_limit
  std::string quantity = "Omega_plus";
  std::optional<ParityConstraint> parity;  ///< unset: the quantity's default
  int degree = 4;
  FitGrid fit{};
  std::vector<double> limit_a{0.04, 0.02, 0.01};

  // noise-study
  std::vector<int> ells{100, 200};
  std::vector<double> eps{1e-4, 1e-3, 1e-2};
  int trials = 32;
  std::uint64_t seed = 20240601;

  OutputFormat format = OutputFormat::csv;
  std::string out;  ///< empty: stdout

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

const std::vector<std::string>& subcommands();

/// Lossless text form: every key, doubles at 17 significant digits.
std::string to_config_text(const RunConfig& cfg);

/// Applies the keys in `text` on top of `base`. Unknown keys and malformed
/// values raise InvalidArgument.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});

/// Runs cfg.command and returns its result table.
Table execute(const RunConfig& cfg);

/// Full command line without the program name. Returns 0 on success, 1 on
/// usage errors and 2 on domain errors.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kdsqnm
