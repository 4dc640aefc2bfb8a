#pragma once

#include <string>
#include <vector>

#include "kdsqnm/error.hpp"

namespace kdsqnm {

// Kerr-de Sitter parameters (M, a, Lambda) in geometric units G = c = 1.
// M > 0 and Lambda >= 0 are checked on construction; a may take either sign.
class SpacetimeParams {
 public:
  SpacetimeParams(double mass, double spin, double cosmological_constant);

  double M() const noexcept { return M_; }
  double a() const noexcept { return a_; }
  double Lambda() const noexcept { return Lambda_; }

  /// Xi = 1 + Lambda a^2 / 3.
  double Xi() const noexcept { return 1.0 + Lambda_ * a_ * a_ / 3.0; }

  SpacetimeParams with_spin(double spin) const { return {M_, spin, Lambda_}; }

  friend bool operator==(const SpacetimeParams&, const SpacetimeParams&) = default;

 private:
  double M_;
  double a_;
  double Lambda_;
};

// The four real roots of Delta_r, r0 < 0 <= r_minus < r_e < r_c.
//
// With Lambda = 0 there is no cosmological horizon: r0 = -inf, r_c = +inf,
// kappa_c = 0 and L_sep = +inf, and `cosmological_horizon` is false.
struct HorizonData {
  double r0 = 0.0;
  double r_minus = 0.0;
  double r_e = 0.0;
  double r_c = 0.0;
  double kappa_e = 0.0;
  double kappa_c = 0.0;
  double L_sep = 0.0;
  double residual = 0.0;  ///< max |Delta_r(r_h)| over the finite reported roots
  bool cosmological_horizon = true;
  std::vector<std::string> notes;
};

struct EquatorialMetric {
  double g_tt = 0.0;
  double g_tphi = 0.0;
  double g_phiphi = 0.0;
};

struct AdmissibilityReport {
  bool admissible = false;
  std::string diagnostic;  ///< first failed condition, empty when admissible
  std::vector<std::string> notes;
  double orbit_guard = 0.0;  ///< min |det D F| / (4 Omega_ph) over both branches
};

/// Delta_r(r) = (r^2 + a^2)(1 - Lambda r^2 / 3) - 2 M r or its first or second
/// r-derivative (order 0, 1, 2), evaluated in Horner form.
double evaluate_delta_r(const SpacetimeParams& params, double r, int order = 0);

/// Coefficients c0..c4 of Delta_r as a polynomial in r.
std::vector<double> delta_r_coefficients(const SpacetimeParams& params);

HorizonData horizon_roots(const SpacetimeParams& params);

/// Horizon structure plus the photon-orbit nondegeneracy guard for both
/// equatorial branches. Never throws for domain failures.
AdmissibilityReport is_subextremal(const SpacetimeParams& params);

/// Equatorial (theta = pi/2) Boyer-Lindquist metric coefficients. Requires r > 0.
EquatorialMetric equatorial_metric(const SpacetimeParams& params, double r);

}  // namespace kdsqnm
