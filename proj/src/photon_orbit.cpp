#include "kdsqnm/photon_orbit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "dual.hpp"
#include "equatorial_formulas.hpp"

namespace kdsqnm {

std::string_view to_string(Branch b) { return b == Branch::co ? "co" : "counter"; }

Branch parse_branch(std::string_view text) {
  if (text == "co" || text == "+") return Branch::co;
  if (text == "counter" || text == "-") return Branch::counter;
  throw Error(ErrorCode::InvalidArgument, "branch must be 'co' or 'counter'");
}

namespace {

constexpr double kSqrt3 = 1.7320508075688772935;

double photon_sphere_frequency(const SpacetimeParams& params) {
  const double M = params.M();
  const double x = 9.0 * params.Lambda() * M * M;
  if (!(x < 1.0)) {
    throw Error(ErrorCode::NotSubextremal, "9ΛM² ≥ 1: no photon sphere to seed the orbit solver");
  }
  return std::sqrt(1.0 - x) / (3.0 * kSqrt3 * M);
}

bool inside_exterior(const HorizonData& h, double r) { return r > h.r_e && r < h.r_c; }

double lyapunov_squared_at(const SpacetimeParams& p, double r, double b) {
  return detail::lyapunov_squared(p.M(), p.a(), p.Lambda(), r, b);
}

// Newton on (Phi, dPhi/dr) in (r, Omega) from the given seed. Throws on
// failure.
CircularOrbit newton_orbit(const SpacetimeParams& params, Branch branch, double r, double w,
                           double guard, const OrbitSolverOptions& opts) {
  const double M = params.M();
  const double a = params.a();
  const double L = params.Lambda();

  double last_step = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();
  double det = 0.0;
  int k = 0;
  for (;; ++k) {
    const auto jet = detail::null_quadratic_jet(M, a, L, r, w);
    residual = std::max(std::abs(jet.phi), std::abs(jet.phi_r));
    det = jet.phi_r * jet.phi_rw - jet.phi_w * jet.phi_rr;
    if (residual <= opts.tolerance && last_step <= 1e-13) break;
    if (k >= opts.max_iterations) break;
    if (!(std::abs(det) >= guard)) {
      throw Error(ErrorCode::DegenerateJacobian,
                  "orbit-system Jacobian determinant below 1e-3 * 4 Omega_ph");
    }
    const double dr = (jet.phi_rw * jet.phi - jet.phi_w * jet.phi_r) / det;
    const double dw = (jet.phi_r * jet.phi_r - jet.phi_rr * jet.phi) / det;
    r -= dr;
    w -= dw;
    if (!std::isfinite(r) || !std::isfinite(w) || r <= 0.0) {
      throw Error(ErrorCode::NoConvergence, "orbit Newton iterate left the domain");
    }
    last_step = std::max(std::abs(dr) / r, std::abs(dw) / std::max(std::abs(w), 1e-300));
  }
  if (!(residual <= opts.tolerance)) {
    throw Error(ErrorCode::NoConvergence, "orbit Newton did not reach the residual tolerance");
  }
  if (!(std::abs(det) >= guard)) {
    throw Error(ErrorCode::DegenerateJacobian,
                "orbit-system Jacobian determinant below 1e-3 * 4 Omega_ph at the solution");
  }
  CircularOrbit orbit;
  orbit.branch = branch;
  orbit.r_orbit = r;
  orbit.Omega = w;
  orbit.b = 1.0 / w;
  orbit.residual = residual;
  orbit.jacobian_det = det;
  orbit.iterations = k;
  return orbit;
}

void fill_lyapunov(const SpacetimeParams& params, CircularOrbit& orbit) {
  const double lam2 = lyapunov_squared_at(params, orbit.r_orbit, orbit.b);
  if (!(lam2 > 0.0)) {
    throw Error(ErrorCode::NegativeCurvature, "R'' <= 0 at the orbit (stable or non-admissible orbit)");
  }
  orbit.lyapunov = std::sqrt(lam2);
}

}  // namespace

NullQuadratic null_quadratic(const SpacetimeParams& params, double r, double Omega) {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "null_quadratic requires r > 0");
  const auto jet = detail::null_quadratic_jet(params.M(), params.a(), params.Lambda(), r, Omega);
  return {jet.phi, jet.phi_r, jet.phi_w};
}

NullQuadraticJet null_quadratic_jet(const SpacetimeParams& params, double r, double Omega) {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "null_quadratic requires r > 0");
  const auto jet = detail::null_quadratic_jet(params.M(), params.a(), params.Lambda(), r, Omega);
  return {jet.phi, jet.phi_r, jet.phi_rr, jet.phi_w, jet.phi_rw};
}

CircularOrbit solve_circular_orbit(const SpacetimeParams& params, Branch branch,
                                   const OrbitSolverOptions& opts) {
  const HorizonData horizons = horizon_roots(params);
  const double omega_ph = photon_sphere_frequency(params);
  const double guard = opts.guard_fraction * 4.0 * omega_ph;
  const double sign = branch_sign(branch);
  const double M = params.M();

  CircularOrbit orbit;
  std::optional<Error> direct_failure;
  try {
    orbit = newton_orbit(params, branch, 3.0 * M, sign * omega_ph, guard, opts);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoConvergence && e.code() != ErrorCode::DegenerateJacobian) throw;
    direct_failure = e;
  }

  if (direct_failure) {
    const double step = opts.continuation_step * M;
    const double target = std::abs(params.a());
    if (!(target > step)) throw *direct_failure;
    double r = 3.0 * M;
    double w = sign * omega_ph;
    int total = 0;
    for (int k = 1;; ++k) {
      const double mag = std::min(k * step, target);
      const double a_k = mag < target ? std::copysign(mag, params.a()) : params.a();
      const SpacetimeParams p_k = params.with_spin(a_k);
      orbit = newton_orbit(p_k, branch, r, w, guard, opts);
      r = orbit.r_orbit;
      w = orbit.Omega;
      total += orbit.iterations;
      if (a_k == params.a()) break;
    }
    orbit.iterations = total;
    orbit.continued = true;
  }

  if (!inside_exterior(horizons, orbit.r_orbit)) {
    throw Error(ErrorCode::NoConvergence, "converged orbit radius is outside (r_e, r_c)");
  }
  fill_lyapunov(params, orbit);
  return orbit;
}

CircularOrbit solve_circular_orbit_rb(const SpacetimeParams& params, Branch branch,
                                      const OrbitSolverOptions& opts) {
  using D1 = detail::Dual<1>;
  const HorizonData horizons = horizon_roots(params);
  const double omega_ph = photon_sphere_frequency(params);
  const double M = params.M();
  const double a = params.a();
  const double L = params.Lambda();

  double r = 3.0 * M;
  double b = branch_sign(branch) / omega_ph;
  double last_step = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();
  int k = 0;
  for (;; ++k) {
    const auto jet = detail::radial_potential_jet<D1>(M, a, L, r, D1::variable(b, 0));
    const double r4 = r * r * r * r;
    residual = std::max(std::abs(jet.R.val), std::abs(jet.R1.val) * r) / r4;
    if (residual <= opts.tolerance && last_step <= 1e-13) break;
    if (k >= opts.max_iterations) break;
    const double j00 = jet.R1.val;
    const double j01 = jet.R.grad[0];
    const double j10 = jet.R2.val;
    const double j11 = jet.R1.grad[0];
    const double det = j00 * j11 - j01 * j10;
    if (det == 0.0 || !std::isfinite(det)) {
      throw Error(ErrorCode::DegenerateJacobian, "singular (r, b) double-root Jacobian");
    }
    const double dr = (j11 * jet.R.val - j01 * jet.R1.val) / det;
    const double db = (j00 * jet.R1.val - j10 * jet.R.val) / det;
    r -= dr;
    b -= db;
    if (!std::isfinite(r) || !std::isfinite(b) || r <= 0.0) {
      throw Error(ErrorCode::NoConvergence, "(r, b) Newton iterate left the domain");
    }
    last_step = std::max(std::abs(dr) / r, std::abs(db) / std::abs(b));
  }
  if (!(residual <= opts.tolerance) || !inside_exterior(horizons, r)) {
    throw Error(ErrorCode::NoConvergence, "(r, b) double-root solver did not converge");
  }
  CircularOrbit orbit;
  orbit.branch = branch;
  orbit.r_orbit = r;
  orbit.b = b;
  orbit.Omega = 1.0 / b;
  orbit.residual = residual;
  orbit.iterations = k;
  return orbit;
}

RadialPotential radial_potential_suite(const SpacetimeParams& params, double r, double b) {
  const HorizonData horizons = horizon_roots(params);
  if (!inside_exterior(horizons, r)) {
    throw Error(ErrorCode::HorizonEvaluation, "radius must lie strictly between r_e and r_c");
  }
  const auto jet = detail::radial_potential_jet(params.M(), params.a(), params.Lambda(), r, b);
  return {jet.R, jet.R1, jet.R2, jet.t_dot};
}

double lyapunov_exponent(const SpacetimeParams& params, const CircularOrbit& orbit) {
  const auto jet =
      detail::null_quadratic_jet(params.M(), params.a(), params.Lambda(), orbit.r_orbit, orbit.Omega);
  if (!(std::max(std::abs(jet.phi), std::abs(jet.phi_r)) <= 1e-10)) {
    throw Error(ErrorCode::InvalidArgument, "orbit does not satisfy the double-root conditions to 1e-10");
  }
  const RadialPotential rad = radial_potential_suite(params, orbit.r_orbit, orbit.b);
  if (!(rad.R_second > 0.0)) {
    throw Error(ErrorCode::NegativeCurvature, "R'' <= 0 at the orbit (stable or non-admissible orbit)");
  }
  return std::sqrt(lyapunov_squared_at(params, orbit.r_orbit, orbit.b));
}

SeriesCoefficients closed_form_coefficients(double M, double Lambda) {
  if (!(M > 0.0) || !(Lambda >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "closed_form_coefficients needs M > 0, Lambda >= 0");
  }
  const double x = 9.0 * Lambda * M * M;  // 9 Lambda M^2
  if (!(x < 1.0)) throw Error(ErrorCode::OutsideAdmissible, "9ΛM² ≥ 1");
  const double lm2 = Lambda * M * M;
  const double S = std::sqrt(1.0 - x);
  const double S2 = S * S;
  const double S3 = S2 * S;
  const double M2 = M * M;
  const double M3 = M2 * M;

  SeriesCoefficients c;
  c.Omega_ph = S / (3.0 * kSqrt3 * M);
  c.Omega_ph_prime = -(S / M2 + 9.0 * Lambda / S) / (3.0 * kSqrt3);
  c.c_Z = (2.0 + x) / (27.0 * M2);
  c.c_Omega2 = kSqrt3 * (11.0 - 45.0 * lm2) / (486.0 * M3 * S);
  c.c_lambda2 = kSqrt3 * (45.0 * lm2 - 2.0) / (243.0 * M3 * S);
  c.r1 = -2.0 / kSqrt3 * S;
  c.r2 = -(3.0 * Lambda * M + 2.0 / (9.0 * M));
  c.b0 = 3.0 * kSqrt3 * M / S;
  c.b1 = -(2.0 + x) / S2;
  c.b2 = kSqrt3 * (54.0 * lm2 * lm2 + 39.0 * lm2 - 1.0) / (6.0 * M * S3);
  c.beta2 = kSqrt3 * (45.0 * lm2 - 1.0) / (6.0 * M * S3);
  return c;
}

double omega_sharp(const SpacetimeParams& params, Branch branch) {
  return branch_sign(branch) * solve_circular_orbit(params, branch).Omega;
}

OrbitSensitivity orbit_sensitivity(const SpacetimeParams& params, Branch branch) {
  using D5 = detail::Dual<5>;
  OrbitSensitivity out;
  out.orbit = solve_circular_orbit(params, branch);

  const D5 r = D5::variable(out.orbit.r_orbit, 0);
  const D5 w = D5::variable(out.orbit.Omega, 1);
  const D5 M = D5::variable(params.M(), 2);
  const D5 a = D5::variable(params.a(), 3);
  const D5 L = D5::variable(params.Lambda(), 4);

  const auto jet = detail::null_quadratic_jet(M, a, L, r, w);
  const double f00 = jet.phi.grad[0], f01 = jet.phi.grad[1];
  const double f10 = jet.phi_r.grad[0], f11 = jet.phi_r.grad[1];
  const double det = f00 * f11 - f01 * f10;

  const D5 b = D5(1.0) / w;
  const D5 lam = detail::sqrt(detail::lyapunov_squared(M, a, L, r, b));

  for (int j = 0; j < 3; ++j) {
    const double g0 = jet.phi.grad[2 + j];
    const double g1 = jet.phi_r.grad[2 + j];
    // dz/dp = -Fz^{-1} Fp
    const double dr = -(f11 * g0 - f01 * g1) / det;
    const double dw = -(f00 * g1 - f10 * g0) / det;
    out.d_r[j] = dr;
    out.d_Omega[j] = dw;
    out.d_lyapunov[j] = lam.grad[2 + j] + lam.grad[0] * dr + lam.grad[1] * dw;
  }
  return out;
}

}  // namespace kdsqnm
