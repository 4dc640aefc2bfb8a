#include "kdsqnm/spectrum_model.hpp"

#include <cmath>

namespace kdsqnm {

void validate(const ModeIndex& mode) {
  if (mode.ell < 1) throw Error(ErrorCode::InvalidArgument, "ell must be >= 1");
  if (mode.n < 0) throw Error(ErrorCode::InvalidArgument, "n must be >= 0");
}

namespace {

Pseudopole pseudopole_from_orbit(const CircularOrbit& orbit, int n, int ell) {
  const double omega_sharp = branch_sign(orbit.branch) * orbit.Omega;
  return {{omega_sharp * (ell + 0.5), -(n + 0.5) * orbit.lyapunov}};
}

}  // namespace

Pseudopole synthesize_pseudopole(const SpacetimeParams& params, const ModeIndex& mode) {
  validate(mode);
  return pseudopole_from_orbit(solve_circular_orbit(params, mode.branch), mode.n, mode.ell);
}

PseudopolePair synthesize_pair(const SpacetimeParams& params, int n, int ell) {
  validate({n, ell, Branch::co});
  return {
      pseudopole_from_orbit(solve_circular_orbit(params, Branch::co), n, ell),
      pseudopole_from_orbit(solve_circular_orbit(params, Branch::counter), n, ell),
      n,
      ell,
  };
}

PseudopolePair apply_noise(const PseudopolePair& pair, const NoiseSpec& noise) {
  PseudopolePair out = pair;
  out.plus.omega += noise.eta_plus;
  out.minus.omega += noise.eta_minus;
  return out;
}

TwoModeObservables two_mode_observables(const PseudopolePair& pair) {
  const double two_ell = 2.0 * pair.ell;
  const double re_plus = pair.plus.omega.real();
  const double re_minus = pair.minus.omega.real();
  return {(re_plus + re_minus) / two_ell, (re_plus - re_minus) / two_ell};
}

SingleModeObservables single_mode_observables(const PseudopolePair& pair) {
  return {-pair.plus.omega.imag() / (pair.n + 0.5), pair.plus.omega.real() / pair.ell};
}

ThreeObservables three_observables(const PseudopolePair& pair) {
  const TwoModeObservables uv = two_mode_observables(pair);
  return {uv.U, uv.V, single_mode_observables(pair).W_tilde};
}

UnlabeledObservables unlabeled_observables(const PseudopolePair& pair) {
  const TwoModeObservables uv = two_mode_observables(pair);
  return {uv.U, std::abs(uv.V)};
}

TwoModeObservables two_mode_map(const SpacetimeParams& params, int n, int ell) {
  return two_mode_observables(synthesize_pair(params, n, ell));
}

SingleModeObservables single_mode_map(const SpacetimeParams& params, int n, int ell) {
  validate({n, ell, Branch::co});
  const PseudopolePair pair{
      pseudopole_from_orbit(solve_circular_orbit(params, Branch::co), n, ell), {}, n, ell};
  return single_mode_observables(pair);
}

ThreeObservables three_map(const SpacetimeParams& params, int n, int ell) {
  return three_observables(synthesize_pair(params, n, ell));
}

UnlabeledObservables unlabeled_observables(const SpacetimeParams& params, int n, int ell) {
  return unlabeled_observables(synthesize_pair(params, n, ell));
}

TwoModeObservables geometric_two_map(const SpacetimeParams& params) {
  const double plus = solve_circular_orbit(params, Branch::co).Omega;
  const double minus = -solve_circular_orbit(params, Branch::counter).Omega;
  return {(plus + minus) / 2.0, (plus - minus) / 2.0};
}

ThreeObservables geometric_three_map(const SpacetimeParams& params) {
  const CircularOrbit co = solve_circular_orbit(params, Branch::co);
  const double minus = -solve_circular_orbit(params, Branch::counter).Omega;
  return {(co.Omega + minus) / 2.0, (co.Omega - minus) / 2.0, co.lyapunov};
}

}  // namespace kdsqnm
