#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kdsqnm/inversion.hpp"

namespace kdsqnm {

enum class SeriesQuantity { Omega_plus, lambda_plus, r_plus, U_geo, V_geo };
enum class ParityConstraint { none, even, odd };

std::string_view to_string(SeriesQuantity q);
SeriesQuantity parse_series_quantity(std::string_view text);
std::string_view to_string(ParityConstraint p);
ParityConstraint parse_parity(std::string_view text);

/// Symmetric a-grid without the origin: +-a_max k / (points/2), k = 1..points/2.
struct FitGrid {
  double a_max = 0.02;
  int points = 8;

  std::vector<double> nodes() const;

  friend bool operator==(const FitGrid&, const FitGrid&) = default;
};

struct SeriesFitReport {
  std::string target;
  ParityConstraint parity = ParityConstraint::none;
  std::vector<int> powers;  ///< monomials a^k present in the fit
  std::vector<double> coefficients;
  std::vector<double> uncertainties;  ///< standard errors from the residual variance

  // Linear and quadratic coefficients against their closed forms. A power
  // excluded by the parity constraint is reported as exactly zero.
  double c1 = 0.0, c1_err = 0.0, c1_ref = 0.0;
  double c2 = 0.0, c2_err = 0.0, c2_ref = 0.0;
  double c1_abs_disc = 0.0, c1_rel_disc = 0.0;
  double c2_abs_disc = 0.0, c2_rel_disc = 0.0;

  double fit_residual = 0.0;  ///< max |model - data| on the grid
  double condition_number = 0.0;
  std::string grid_description;
};

/// Least-squares polynomial fit in a of an orbit quantity at fixed (M, Lambda).
/// By default U_geo is fitted with even powers and V_geo with odd powers.
SeriesFitReport fit_series_coefficients(SeriesQuantity quantity, double M, double Lambda,
                                        const FitGrid& grid = {}, int degree = 4,
                                        std::optional<ParityConstraint> parity = std::nullopt,
                                        Execution exec = Execution::parallel);

/// Value of the fitted quantity at a single a (the raw data behind the fit).
double series_quantity_value(SeriesQuantity quantity, double M, double a, double Lambda);

struct LimitCheckReport {
  std::string target;
  std::vector<double> a_values;
  std::vector<double> ratios;        ///< quantity(a) / a^2
  std::vector<double> extrapolated;  ///< Richardson value from each consecutive pair
  double estimate = 0.0;             ///< from the two smallest a
  double reference = 0.0;
  double rel_error = 0.0;
  bool refinement_improves = false;  ///< |extrapolated - reference| decreasing along the grid
};

/// det D H_geo (M, a, Lambda) / a^2 -> 5 (9 Lambda M^2 - 4) / (1458 M^5).
LimitCheckReport jacobian_det_limit_check(double M, double Lambda, const std::vector<double>& a_values,
                                          JacobianMethod method = JacobianMethod::finite_difference);

/// (lambda_+ - U_geo) / a^2 -> -(5 sqrt(3) / 162) sqrt(1 - 9 Lambda M^2) / M^3.
LimitCheckReport wminusu_limit_check(double M, double Lambda, const std::vector<double>& a_values);

double geometric_three_det(double M, double a, double Lambda,
                           JacobianMethod method = JacobianMethod::finite_difference);

struct NoiseStudyRow {
  int ell = 0;
  double eps = 0.0;
  double max_error = 0.0;     ///< max over trials of |(M, a) - truth|_2
  double scaled_error = 0.0;  ///< max_error * ell / eps (0 when eps = 0)
  double stability_constant = 0.0;
  int trials = 0;
};

struct NoiseStudyResult {
  std::uint64_t seed = 0;
  std::vector<NoiseStudyRow> rows;  ///< ell-major, then eps, in input order
};

/// Deterministic unit-modulus noise directions: trial t uses phases
/// (theta_plus, theta_minus) drawn from a mt19937_64 stream seeded with `seed`.
std::vector<std::pair<double, double>> noise_phases(std::uint64_t seed, int trials);

NoiseStudyResult noise_propagation_study(const SpacetimeParams& truth, int n, const std::vector<int>& ells,
                                         const std::vector<double>& eps_list, int trials,
                                         std::uint64_t seed = 20240601,
                                         Execution exec = Execution::parallel);

}  // namespace kdsqnm
