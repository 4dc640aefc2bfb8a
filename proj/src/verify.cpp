#include "kdsqnm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace kdsqnm {

std::string_view to_string(SeriesQuantity q) {
  switch (q) {
    case SeriesQuantity::Omega_plus: return "Omega_plus";
    case SeriesQuantity::lambda_plus: return "lambda_plus";
    case SeriesQuantity::r_plus: return "r_plus";
    case SeriesQuantity::U_geo: return "U_geo";
    case SeriesQuantity::V_geo: return "V_geo";
  }
  return "unknown";
}

SeriesQuantity parse_series_quantity(std::string_view text) {
  for (SeriesQuantity q : {SeriesQuantity::Omega_plus, SeriesQuantity::lambda_plus, SeriesQuantity::r_plus,
                           SeriesQuantity::U_geo, SeriesQuantity::V_geo}) {
    if (text == to_string(q)) return q;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown series quantity '" + std::string(text) + "'");
}

std::string_view to_string(ParityConstraint p) {
  switch (p) {
    case ParityConstraint::none: return "none";
    case ParityConstraint::even: return "even";
    case ParityConstraint::odd: return "odd";
  }
  return "unknown";
}

ParityConstraint parse_parity(std::string_view text) {
  for (ParityConstraint p : {ParityConstraint::none, ParityConstraint::even, ParityConstraint::odd}) {
    if (text == to_string(p)) return p;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown parity '" + std::string(text) + "'");
}

std::vector<double> FitGrid::nodes() const {
  if (points < 2 || points % 2 != 0 || !(a_max > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "fit grid needs an even point count >= 2 and a_max > 0");
  }
  const int half = points / 2;
  std::vector<double> a;
  a.reserve(static_cast<std::size_t>(points));
  for (int k = half; k >= 1; --k) a.push_back(-a_max * k / half);
  for (int k = 1; k <= half; ++k) a.push_back(a_max * k / half);
  return a;
}

double series_quantity_value(SeriesQuantity quantity, double M, double a, double Lambda) {
  const SpacetimeParams p(M, a, Lambda);
  switch (quantity) {
    case SeriesQuantity::Omega_plus: return solve_circular_orbit(p, Branch::co).Omega;
    case SeriesQuantity::lambda_plus: return solve_circular_orbit(p, Branch::co).lyapunov;
    case SeriesQuantity::r_plus: return solve_circular_orbit(p, Branch::co).r_orbit;
    case SeriesQuantity::U_geo: return geometric_two_map(p).U;
    case SeriesQuantity::V_geo: return geometric_two_map(p).V;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown series quantity");
}

namespace {

struct References {
  double c1;
  double c2;
  ParityConstraint parity;
};

References references_for(SeriesQuantity q, double M, double Lambda) {
  const SeriesCoefficients c = closed_form_coefficients(M, Lambda);
  switch (q) {
    case SeriesQuantity::Omega_plus: return {c.c_Z, c.c_Omega2, ParityConstraint::none};
    case SeriesQuantity::lambda_plus: return {0.0, c.c_lambda2, ParityConstraint::none};
    case SeriesQuantity::r_plus: return {c.r1, c.r2, ParityConstraint::none};
    case SeriesQuantity::U_geo: return {0.0, c.c_Omega2, ParityConstraint::even};
    case SeriesQuantity::V_geo: return {c.c_Z, 0.0, ParityConstraint::odd};
  }
  throw Error(ErrorCode::InvalidArgument, "unknown series quantity");
}

double relative(double value, double ref) {
  const double diff = std::abs(value - ref);
  return ref == 0.0 ? diff : diff / std::abs(ref);
}

}  // namespace

SeriesFitReport fit_series_coefficients(SeriesQuantity quantity, double M, double Lambda, const FitGrid& grid,
                                        int degree, std::optional<ParityConstraint> parity, Execution exec) {
  if (degree < 3 || degree > 5) throw Error(ErrorCode::InvalidArgument, "fit degree must be 3, 4 or 5");
  const References ref = references_for(quantity, M, Lambda);

  SeriesFitReport rep;
  rep.target = std::string(to_string(quantity));
  rep.parity = parity.value_or(ref.parity);
  for (int k = 0; k <= degree; ++k) {
    if (rep.parity == ParityConstraint::even && k % 2 != 0) continue;
    if (rep.parity == ParityConstraint::odd && k % 2 == 0) continue;
    rep.powers.push_back(k);
  }

  const std::vector<double> a = grid.nodes();
  const auto m = static_cast<Eigen::Index>(a.size());
  const auto p = static_cast<Eigen::Index>(rep.powers.size());
  if (m < p) throw Error(ErrorCode::IllConditionedFit, "fewer grid points than fitted coefficients");

  Eigen::VectorXd y(m);
  for_each_index(exec, a.size(), [&](std::size_t i) {
    y[static_cast<Eigen::Index>(i)] = series_quantity_value(quantity, M, a[i], Lambda);
  });

  // Fit in t = a / a_max so the design matrix stays well scaled.
  Eigen::MatrixXd X(m, p);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double t = a[static_cast<std::size_t>(i)] / grid.a_max;
    for (Eigen::Index j = 0; j < p; ++j) X(i, j) = std::pow(t, rep.powers[static_cast<std::size_t>(j)]);
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  rep.condition_number = sv(0) / sv(p - 1);
  if (!(rep.condition_number < 1e8)) {
    throw Error(ErrorCode::IllConditionedFit, "Vandermonde condition number above 1e8");
  }
  const Eigen::VectorXd beta = svd.solve(y);
  const Eigen::VectorXd resid = y - X * beta;
  rep.fit_residual = resid.lpNorm<Eigen::Infinity>();

  const double dof = static_cast<double>(m - p);
  const double sigma2 = dof > 0 ? resid.squaredNorm() / dof : 0.0;
  const Eigen::MatrixXd V = svd.matrixV();
  const Eigen::VectorXd inv_s2 = sv.array().square().inverse();
  for (Eigen::Index j = 0; j < p; ++j) {
    const double scale = std::pow(grid.a_max, rep.powers[static_cast<std::size_t>(j)]);
    const double var = sigma2 * (V.row(j).array().square() * inv_s2.transpose().array()).sum();
    rep.coefficients.push_back(beta[j] / scale);
    rep.uncertainties.push_back(std::sqrt(var) / scale);
  }

  for (std::size_t j = 0; j < rep.powers.size(); ++j) {
    if (rep.powers[j] == 1) {
      rep.c1 = rep.coefficients[j];
      rep.c1_err = rep.uncertainties[j];
    } else if (rep.powers[j] == 2) {
      rep.c2 = rep.coefficients[j];
      rep.c2_err = rep.uncertainties[j];
    }
  }
  rep.c1_ref = ref.c1;
  rep.c2_ref = ref.c2;
  rep.c1_abs_disc = std::abs(rep.c1 - ref.c1);
  rep.c2_abs_disc = std::abs(rep.c2 - ref.c2);
  rep.c1_rel_disc = relative(rep.c1, ref.c1);
  rep.c2_rel_disc = relative(rep.c2, ref.c2);

  std::ostringstream desc;
  desc << grid.points << " symmetric points in [-" << grid.a_max << ", " << grid.a_max << "], degree " << degree
       << ", parity " << to_string(rep.parity);
  rep.grid_description = desc.str();
  return rep;
}

namespace {

// Column i of D map at x with step h: central differences, or the one-sided
// stencil (-3 f0 + 4 f1 - f2) / 2h; both have O(h^2) error.
Vec<3> difference_column(const ObservableMap<3>& map, const Vec<3>& x, int i, double h, bool one_sided) {
  Vec<3> e = Vec<3>::Zero();
  e[i] = h;
  if (one_sided) return (-3.0 * map(x) + 4.0 * map(x + e) - map(x + 2.0 * e)) / (2.0 * h);
  return (map(x + e) - map(x - e)) / (2.0 * h);
}

}  // namespace

double geometric_three_det(double M, double a, double Lambda, JacobianMethod method) {
  if (method == JacobianMethod::analytic_chain) {
    return analytic_jacobian_three(SpacetimeParams(M, a, Lambda), Resolution::geometric()).determinant();
  }
  const ObservableMap<3> map = three_parameter_map(Resolution::geometric());
  const Vec<3> x(M, a, Lambda);
  // Richardson at h = 1e-4 keeps truncation near 1e-16 and rounding near
  // 1e-12 per entry, so the a = 0 determinant resolves to zero.
  const StepSpec step{1e-4, true};
  // Lambda >= 0 bounds the map, so near Lambda = 0 its column is one-sided.
  if (Lambda >= step.relative * std::max(1.0, Lambda)) return numeric_jacobian<3>(map, x, step).determinant();
  Mat<3> J;
  for (int i = 0; i < 3; ++i) {
    const double h = step.relative * std::max(1.0, std::abs(x[i]));
    const bool one_sided = i == 2;
    J.col(i) = (4.0 * difference_column(map, x, i, 0.5 * h, one_sided) -
                difference_column(map, x, i, h, one_sided)) / 3.0;
  }
  return J.determinant();
}

namespace {

template <class F>
LimitCheckReport limit_check(std::string target, const std::vector<double>& a_values, double reference,
                             F&& quantity) {
  if (a_values.empty()) throw Error(ErrorCode::InvalidArgument, "limit check needs at least one a value");
  LimitCheckReport rep;
  rep.target = std::move(target);
  rep.a_values = a_values;
  rep.reference = reference;
  for (double a : a_values) {
    if (a == 0.0) throw Error(ErrorCode::InvalidArgument, "limit check a values must be nonzero");
    rep.ratios.push_back(quantity(a) / (a * a));
  }
  // ratio(a) = c + d a + O(a^2): eliminate d between consecutive points.
  for (std::size_t i = 0; i + 1 < a_values.size(); ++i) {
    const double rho = a_values[i] / a_values[i + 1];
    rep.extrapolated.push_back((rho * rep.ratios[i + 1] - rep.ratios[i]) / (rho - 1.0));
  }
  rep.estimate = rep.extrapolated.empty() ? rep.ratios.back() : rep.extrapolated.back();
  rep.rel_error = relative(rep.estimate, reference);
  rep.refinement_improves = true;
  for (std::size_t i = 0; i + 1 < rep.extrapolated.size(); ++i) {
    if (!(std::abs(rep.extrapolated[i + 1] - reference) < std::abs(rep.extrapolated[i] - reference))) {
      rep.refinement_improves = false;
    }
  }
  return rep;
}

}  // namespace

LimitCheckReport jacobian_det_limit_check(double M, double Lambda, const std::vector<double>& a_values,
                                          JacobianMethod method) {
  const double M5 = M * M * M * M * M;
  const double reference = 5.0 * (9.0 * Lambda * M * M - 4.0) / (1458.0 * M5);
  return limit_check("det_DH_geo_over_a2", a_values, reference,
                     [&](double a) { return geometric_three_det(M, a, Lambda, method); });
}

LimitCheckReport wminusu_limit_check(double M, double Lambda, const std::vector<double>& a_values) {
  const double S = std::sqrt(1.0 - 9.0 * Lambda * M * M);
  const double reference = -5.0 * std::numbers::sqrt3 / 162.0 * S / (M * M * M);
  return limit_check("lambda_minus_U_geo_over_a2", a_values, reference, [&](double a) {
    const ThreeObservables h = geometric_three_map(SpacetimeParams(M, a, Lambda));
    return h.W_tilde - h.U;
  });
}

std::vector<std::pair<double, double>> noise_phases(std::uint64_t seed, int trials) {
  std::mt19937_64 gen(seed);
  // Raw 53-bit draws: the distribution classes are implementation-defined.
  auto uniform = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(std::max(trials, 0)));
  for (int t = 0; t < trials; ++t) {
    const double plus = 2.0 * std::numbers::pi * uniform();
    const double minus = 2.0 * std::numbers::pi * uniform();
    out.emplace_back(plus, minus);
  }
  return out;
}

NoiseStudyResult noise_propagation_study(const SpacetimeParams& truth, int n, const std::vector<int>& ells,
                                         const std::vector<double>& eps_list, int trials, std::uint64_t seed,
                                         Execution exec) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  const auto phases = noise_phases(seed, trials);

  NoiseStudyResult result;
  result.seed = seed;
  for (int ell : ells) {
    const PseudopolePair clean = synthesize_pair(truth, n, ell);
    const double stability =
        newton_invert_two(two_mode_observables(clean), truth.Lambda(), ell, n).stability_constant;

    for (double eps : eps_list) {
      if (!(eps >= 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be >= 0");
      std::vector<double> errors(static_cast<std::size_t>(trials));
      for_each_index(exec, errors.size(), [&](std::size_t t) {
        const NoiseSpec noise{std::polar(eps, phases[t].first), std::polar(eps, phases[t].second)};
        const TwoModeObservables data = two_mode_observables(apply_noise(clean, noise));
        const ReconResult r = newton_invert_two(data, truth.Lambda(), ell, n);
        errors[t] = std::hypot(r.params.M() - truth.M(), r.params.a() - truth.a());
      });
      NoiseStudyRow row;
      row.ell = ell;
      row.eps = eps;
      row.trials = trials;
      row.max_error = *std::max_element(errors.begin(), errors.end());
      row.scaled_error = eps > 0.0 ? row.max_error * ell / eps : 0.0;
      row.stability_constant = stability;
      result.rows.push_back(row);
    }
  }
  return result;
}

}  // namespace kdsqnm
