#include <algorithm>
#include <cmath>

#include "kdsqnm/inversion.hpp"

namespace kdsqnm {

Resolution Resolution::mode(int n, int ell) {
  validate(ModeIndex{n, ell, Branch::co});
  return {n, ell};
}

ObservableMap<2> two_parameter_map(double Lambda, Resolution res) {
  return [Lambda, res](const Vec<2>& x) -> Vec<2> {
    const SpacetimeParams p(x[0], x[1], Lambda);
    const TwoModeObservables o =
        res.is_geometric() ? geometric_two_map(p) : two_mode_map(p, res.n, res.ell);
    return {o.U, o.V};
  };
}

ObservableMap<3> three_parameter_map(Resolution res) {
  return [res](const Vec<3>& x) -> Vec<3> {
    const SpacetimeParams p(x[0], x[1], x[2]);
    const ThreeObservables o =
        res.is_geometric() ? geometric_three_map(p) : three_map(p, res.n, res.ell);
    return {o.U, o.V, o.W_tilde};
  };
}

namespace {

template <int N>
Mat<N> central_differences(const ObservableMap<N>& map, const Vec<N>& x, double relative) {
  Mat<N> J;
  for (int j = 0; j < N; ++j) {
    const double h = relative * std::max(1.0, std::abs(x[j]));
    Vec<N> xp = x;
    Vec<N> xm = x;
    xp[j] += h;
    xm[j] -= h;
    // Use the representable step actually taken.
    J.col(j) = (map(xp) - map(xm)) / (xp[j] - xm[j]);
  }
  return J;
}

}  // namespace

template <int N>
Mat<N> numeric_jacobian(const ObservableMap<N>& map, const Vec<N>& x, const StepSpec& step) {
  if (!(step.relative > 0.0)) throw Error(ErrorCode::InvalidArgument, "step must be positive");
  const Mat<N> coarse = central_differences<N>(map, x, step.relative);
  if (!step.richardson) return coarse;
  const Mat<N> fine = central_differences<N>(map, x, 0.5 * step.relative);
  return (4.0 * fine - coarse) / 3.0;
}

template Mat<2> numeric_jacobian<2>(const ObservableMap<2>&, const Vec<2>&, const StepSpec&);
template Mat<3> numeric_jacobian<3>(const ObservableMap<3>&, const Vec<3>&, const StepSpec&);

namespace {

// Rows d(U, V, W) / d(M, a, Lambda) assembled from the two orbit sensitivities.
Mat<3> chain_rows(const SpacetimeParams& params, Resolution res) {
  const OrbitSensitivity co = orbit_sensitivity(params, Branch::co);
  const OrbitSensitivity counter = orbit_sensitivity(params, Branch::counter);
  const double k = res.real_scale();
  Mat<3> J;
  for (int j = 0; j < 3; ++j) {
    // Omega#_+ = Omega_co, Omega#_- = -Omega_counter
    J(0, j) = k * (co.d_Omega[j] - counter.d_Omega[j]) / 2.0;
    J(1, j) = k * (co.d_Omega[j] + counter.d_Omega[j]) / 2.0;
    J(2, j) = co.d_lyapunov[j];
  }
  return J;
}

}  // namespace

Mat<2> analytic_jacobian_two(const SpacetimeParams& params, Resolution res) {
  return chain_rows(params, res).topLeftCorner<2, 2>();
}

Mat<3> analytic_jacobian_three(const SpacetimeParams& params, Resolution res) {
  return chain_rows(params, res);
}

}  // namespace kdsqnm
