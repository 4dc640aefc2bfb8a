#pragma once

#include <array>
#include <string_view>

#include "kdsqnm/kds_core.hpp"

namespace kdsqnm {

enum class Branch { co, counter };

inline double branch_sign(Branch b) { return b == Branch::co ? 1.0 : -1.0; }
std::string_view to_string(Branch b);
Branch parse_branch(std::string_view text);

/// One equatorial circular photon orbit. `Omega` is the signed dphi/dt and
/// b = 1 / Omega; `lyapunov` is the coordinate-time instability rate.
struct CircularOrbit {
  Branch branch = Branch::co;
  double r_orbit = 0.0;
  double Omega = 0.0;
  double b = 0.0;
  double lyapunov = 0.0;
  double residual = 0.0;
  double jacobian_det = 0.0;  ///< det D_(r,Omega)(Phi, dPhi/dr) at the solution
  int iterations = 0;
  bool continued = false;  ///< true when continuation in a was needed
};

/// Small-a expansion coefficients of the equatorial photon orbit, all
/// functions of (M, Lambda).
struct SeriesCoefficients {
  double Omega_ph = 0.0;
  double Omega_ph_prime = 0.0;  ///< d Omega_ph / dM
  double c_Z = 0.0;
  double c_Omega2 = 0.0;
  double c_lambda2 = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double b0 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double beta2 = 0.0;
};

struct NullQuadratic {
  double Phi = 0.0;
  double dPhi_dr = 0.0;
  double dPhi_dOmega = 0.0;
};

/// Phi, dPhi/dr, d^2Phi/dr^2, dPhi/dOmega, d^2Phi/dr dOmega.
struct NullQuadraticJet {
  double Phi = 0.0;
  double dPhi_dr = 0.0;
  double d2Phi_dr2 = 0.0;
  double dPhi_dOmega = 0.0;
  double d2Phi_dr_dOmega = 0.0;
};

struct RadialPotential {
  double R = 0.0;
  double R_prime = 0.0;
  double R_second = 0.0;
  double t_dot = 0.0;
};

struct OrbitSolverOptions {
  double tolerance = 1e-12;
  int max_iterations = 50;
  double continuation_step = 0.02;  ///< in units of M
  double guard_fraction = 1e-3;     ///< |det| floor as a fraction of 4 Omega_ph
};

NullQuadratic null_quadratic(const SpacetimeParams& params, double r, double Omega);
NullQuadraticJet null_quadratic_jet(const SpacetimeParams& params, double r, double Omega);

/// 2D Newton on (Phi, dPhi/dr) = 0 from the Schwarzschild-de Sitter seed
/// (3M, +-Omega_ph). Falls back to continuation in a when the direct seed
/// does not converge. Fills the Lyapunov field.
CircularOrbit solve_circular_orbit(const SpacetimeParams& params, Branch branch,
                                   const OrbitSolverOptions& opts = {});

/// Independent formulation: Newton on the double-root system R = R' = 0 in
/// (r, b). Used to cross-check solve_circular_orbit. The Lyapunov field is
/// left at zero.
CircularOrbit solve_circular_orbit_rb(const SpacetimeParams& params, Branch branch,
                                      const OrbitSolverOptions& opts = {});

/// R, R', R'' at fixed b and dt/dtau. Requires r_e < r < r_c.
RadialPotential radial_potential_suite(const SpacetimeParams& params, double r, double b);

/// lambda = sqrt(R'' / (2 r^4 tdot^2)) evaluated on the orbit.
double lyapunov_exponent(const SpacetimeParams& params, const CircularOrbit& orbit);

SeriesCoefficients closed_form_coefficients(double M, double Lambda);

/// Omega#_+- = +-Omega_geo,+-; positive on both branches near a = 0.
double omega_sharp(const SpacetimeParams& params, Branch branch);

/// Gradients of the orbit with respect to (M, a, Lambda), by the implicit
/// function theorem applied to the analytic orbit system.
struct OrbitSensitivity {
  CircularOrbit orbit;
  std::array<double, 3> d_r{};
  std::array<double, 3> d_Omega{};
  std::array<double, 3> d_lyapunov{};
};

OrbitSensitivity orbit_sensitivity(const SpacetimeParams& params, Branch branch);

}  // namespace kdsqnm
