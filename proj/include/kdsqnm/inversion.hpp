#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "kdsqnm/parallel.hpp"
#include "kdsqnm/spectrum_model.hpp"

namespace kdsqnm {

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;
template <int N>
using Mat = Eigen::Matrix<double, N, N>;

/// Parameter vector -> observable vector. Two-parameter maps act on (M, a)
/// at fixed Lambda, three-parameter maps on (M, a, Lambda).
template <int N>
using ObservableMap = std::function<Vec<N>(const Vec<N>&)>;

/// Observable level: the ell -> infinity geometric map, or the pseudopole map
/// at a given (n, ell).
struct Resolution {
  int n = 0;
  int ell = 0;  ///< 0 selects the geometric limit

  static Resolution geometric() { return {}; }
  static Resolution mode(int n, int ell);
  bool is_geometric() const { return ell == 0; }
  /// Factor multiplying the geometric real parts: (ell + 1/2) / ell, or 1.
  double real_scale() const { return is_geometric() ? 1.0 : (ell + 0.5) / ell; }
};

ObservableMap<2> two_parameter_map(double Lambda, Resolution res);
ObservableMap<3> three_parameter_map(Resolution res);

struct StepSpec {
  double relative = 1e-6;   ///< h_i = relative * max(1, |x_i|)
  bool richardson = false;  ///< combine h and h/2 to cancel the h^2 error
};

/// Central-difference Jacobian of `map` at x.
template <int N>
Mat<N> numeric_jacobian(const ObservableMap<N>& map, const Vec<N>& x, const StepSpec& step = {});

/// Jacobians through the implicit-function derivative of the orbit system.
Mat<2> analytic_jacobian_two(const SpacetimeParams& params, Resolution res);
Mat<3> analytic_jacobian_three(const SpacetimeParams& params, Resolution res);

// ---------------------------------------------------------------------------
// Reconstruction

enum class JacobianMethod { finite_difference, analytic_chain };

struct Seed {
  double M0 = 0.0;
  double a0 = 0.0;
};

/// M0 = 1 / (3 sqrt(Lambda + 3 U^2)), a0 = V / c_Z(M0).
Seed closed_form_seed(double U, double V, double Lambda);

struct InversionOptions {
  double tolerance = 1e-12;  ///< max-norm residual in observable space
  int max_iterations = 30;
  JacobianMethod jacobian = JacobianMethod::finite_difference;
  StepSpec step{};
  double singular_guard = 0.5;  ///< 2x2: SingularJacobian below this fraction of |Omega_ph' c_Z|
  // three-parameter problem only
  double a_min = 0.05;
  int lambda_scan_points = 8;
  double scan_min = 1e-3;  ///< scan range in 9 Lambda M^2
  double scan_max = 0.8;

  static InversionOptions three_parameter() {
    InversionOptions o;
    o.tolerance = 1e-11;
    return o;
  }
};

struct ReconResult {
  SpacetimeParams params{1.0, 0.0, 0.0};
  int iterations = 0;
  double final_residual = 0.0;
  double jacobian_det = 0.0;
  /// 2x2: ||J|| / |det J| (bounds ||J^-1||); 3x3: ||J^-1|| = 1 / sigma_min.
  double stability_constant = 0.0;
  std::vector<double> residual_history;  ///< max-norm residual per iterate, seed first
  double seed_M = 0.0;
  double seed_a = 0.0;
  double seed_Lambda = 0.0;
};

ReconResult newton_invert_two(const TwoModeObservables& data, double Lambda, int ell, int n,
                              const InversionOptions& opts = {});
/// Same solver on an arbitrary resolution (ell = 0 gives the geometric map).
ReconResult newton_invert_two(const TwoModeObservables& data, double Lambda, Resolution res,
                              const InversionOptions& opts = {});

ReconResult newton_invert_three(const ThreeObservables& data, int ell, int n,
                                const InversionOptions& opts = InversionOptions::three_parameter());

struct UnlabeledResult {
  ReconResult recon;  ///< recon.params.a() is |a|
  bool sign_ambiguous = false;
};

UnlabeledResult unlabeled_invert(double U, double absV, double Lambda, int ell, int n,
                                 const InversionOptions& opts = {});

// ---------------------------------------------------------------------------
// Grid studies

/// Rectangle [M_min, M_max] x [a_min, a_max] sampled on an nM x na grid.
struct RectangleSpec {
  double M_min = 0.9;
  double M_max = 1.1;
  double a_min = -0.1;
  double a_max = 0.1;
  int nM = 21;
  int na = 21;

  int node_count() const { return nM * na; }
  double M_at(int i) const;
  double a_at(int j) const;

  friend bool operator==(const RectangleSpec&, const RectangleSpec&) = default;
};

struct StabilityConstants {
  double c_star = 0.0;  ///< min |det J|
  double L_star = 0.0;  ///< max ||J||_2
  double C_star = 0.0;  ///< L_star / c_star
  int nodes_used = 0;
  int nodes_filtered = 0;
  double worst_M = 0.0;  ///< node attaining c_star
  double worst_a = 0.0;
};

/// Sample-based estimates over the grid nodes where the map is defined.
/// Throws EmptyRegion if no node survives filtering.
StabilityConstants stability_constants(const ObservableMap<2>& map, double Lambda,
                                       const RectangleSpec& grid, const StepSpec& step = {},
                                       Execution exec = Execution::parallel);

struct PMatrixNode {
  double M = 0.0;
  double a = 0.0;
  double U = 0.0;
  double V = 0.0;
  double minus_dU_dM = 0.0;
  double dV_da = 0.0;
  double minus_det = 0.0;
  bool ok = false;
};

struct PMatrixReport {
  std::vector<PMatrixNode> nodes;  ///< admissible nodes, M-major order
  int nodes_filtered = 0;
  bool truncated = false;
  double min_minus_dU_dM = 0.0;
  double min_dV_da = 0.0;
  double min_minus_det = 0.0;
  bool signs_pass = false;
  double min_separation = 0.0;  ///< min over node pairs of max(|dU|, |dV|)
  bool collision_found = false;
  bool pass = false;
};

/// Gale-Nikaido check of the sign-changed Jacobian (-dU/dM, dV/da, -det > 0)
/// at every node plus a brute-force pairwise collision probe in (U, V).
PMatrixReport p_matrix_rectangle_scan(const RectangleSpec& rect, double Lambda, int ell, int n,
                                      Execution exec = Execution::parallel,
                                      double collision_tolerance = 1e-9);

}  // namespace kdsqnm
