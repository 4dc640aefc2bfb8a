#include "kdsqnm/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace kdsqnm {

Seed closed_form_seed(double U, double V, double Lambda) {
  const double q = Lambda + 3.0 * U * U;
  if (!(q > 0.0)) throw Error(ErrorCode::OutOfRange, "Lambda + 3U^2 must be positive");
  const double M0 = 1.0 / (3.0 * std::sqrt(q));
  // 9 Lambda M0^2 = Lambda / q exactly; testing the ratio avoids rounding at U = 0.
  if (!(Lambda / q < 1.0)) {
    throw Error(ErrorCode::OutOfRange, "seed mass violates 9ΛM0² < 1");
  }
  const double c_Z = (2.0 + 9.0 * Lambda * M0 * M0) / (27.0 * M0 * M0);
  return {M0, V / c_Z};
}

namespace {

template <int N>
struct NewtonProblem {
  ObservableMap<N> map;
  std::function<Mat<N>(const Vec<N>&)> jacobian;
  std::function<bool(const Vec<N>&)> admissible;
  std::function<void(const Vec<N>&, const Mat<N>&)> guard;  // throws on failure
  Vec<N> target;
};

template <int N>
struct NewtonOutcome {
  Vec<N> x;
  Mat<N> J;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> history;
};

// Damped Newton: full step unless the residual fails to decrease, then halve.
template <int N>
NewtonOutcome<N> run_newton(const NewtonProblem<N>& prob, Vec<N> x, double tol, int max_iter) {
  NewtonOutcome<N> out;
  Vec<N> g = prob.map(x) - prob.target;
  double res = g.template lpNorm<Eigen::Infinity>();
  out.history.push_back(res);

  int it = 0;
  while (!(res <= tol)) {
    if (it >= max_iter) {
      throw Error(ErrorCode::NoConvergence, "Newton inversion hit the iteration limit");
    }
    const Mat<N> J = prob.jacobian(x);
    prob.guard(x, J);
    const Vec<N> step = J.partialPivLu().solve(g);

    bool accepted = false;
    double t = 1.0;
    for (int half = 0; half < 30 && !accepted; ++half, t *= 0.5) {
      const Vec<N> trial = x - t * step;
      if (!prob.admissible(trial)) continue;
      try {
        const Vec<N> g_trial = prob.map(trial) - prob.target;
        const double r_trial = g_trial.template lpNorm<Eigen::Infinity>();
        if (r_trial < res) {
          x = trial;
          g = g_trial;
          res = r_trial;
          accepted = true;
        }
      } catch (const Error&) {
        // outside the region where the forward map is defined; shorten
      }
    }
    if (!accepted) {
      throw Error(ErrorCode::NoConvergence, "Newton line search could not reduce the residual");
    }
    ++it;
    out.history.push_back(res);
  }
  out.x = x;
  out.J = prob.jacobian(x);
  out.iterations = it;
  out.residual = res;
  return out;
}

bool admissible_mass(double M, double Lambda) {
  return M > 0.0 && Lambda >= 0.0 && 9.0 * Lambda * M * M < 1.0 && std::isfinite(M);
}

double leading_two_det(double M, double Lambda) {
  const SeriesCoefficients c = closed_form_coefficients(M, Lambda);
  return c.Omega_ph_prime * c.c_Z;
}

double leading_three_det_coefficient(double M, double Lambda) {
  const double M5 = M * M * M * M * M;
  return 5.0 * (9.0 * Lambda * M * M - 4.0) / (1458.0 * M5);
}

double spectral_norm(const Eigen::MatrixXd& J) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(J).singularValues()(0);
}

}  // namespace

ReconResult newton_invert_two(const TwoModeObservables& data, double Lambda, Resolution res,
                              const InversionOptions& opts) {
  const Seed seed = closed_form_seed(data.U, data.V, Lambda);

  NewtonProblem<2> prob;
  prob.map = two_parameter_map(Lambda, res);
  if (opts.jacobian == JacobianMethod::analytic_chain) {
    prob.jacobian = [Lambda, res](const Vec<2>& x) {
      return analytic_jacobian_two(SpacetimeParams(x[0], x[1], Lambda), res);
    };
  } else {
    prob.jacobian = [map = prob.map, step = opts.step](const Vec<2>& x) {
      return numeric_jacobian<2>(map, x, step);
    };
  }
  prob.admissible = [Lambda](const Vec<2>& x) {
    return admissible_mass(x[0], Lambda) && std::isfinite(x[1]);
  };
  prob.guard = [Lambda, guard = opts.singular_guard](const Vec<2>& x, const Mat<2>& J) {
    const double floor = guard * std::abs(leading_two_det(x[0], Lambda));
    if (!(std::abs(J.determinant()) >= floor)) {
      throw Error(ErrorCode::SingularJacobian, "|det J| below the guard fraction of |Omega_ph' c_Z|");
    }
  };
  prob.target = Vec<2>(data.U, data.V);

  const Vec<2> x0(seed.M0, seed.a0);
  if (!prob.admissible(x0)) throw Error(ErrorCode::OutOfRange, "seed outside the admissible set");
  try {
    (void)prob.map(x0);
  } catch (const Error& e) {
    throw Error(ErrorCode::OutOfRange, std::string("seed outside the admissible set: ") + e.what());
  }
  const NewtonOutcome<2> out = run_newton<2>(prob, x0, opts.tolerance, opts.max_iterations);

  ReconResult r;
  r.params = SpacetimeParams(out.x[0], out.x[1], Lambda);
  r.iterations = out.iterations;
  r.final_residual = out.residual;
  r.jacobian_det = out.J.determinant();
  r.stability_constant = spectral_norm(out.J) / std::abs(r.jacobian_det);
  r.residual_history = out.history;
  r.seed_M = seed.M0;
  r.seed_a = seed.a0;
  r.seed_Lambda = Lambda;
  return r;
}

ReconResult newton_invert_two(const TwoModeObservables& data, double Lambda, int ell, int n,
                              const InversionOptions& opts) {
  return newton_invert_two(data, Lambda, Resolution::mode(n, ell), opts);
}

ReconResult newton_invert_three(const ThreeObservables& data, int ell, int n,
                                const InversionOptions& opts) {
  const Resolution res = Resolution::mode(n, ell);
  const Vec<3> target(data.U, data.V, data.W_tilde);
  const ObservableMap<3> map = three_parameter_map(res);

  // Lambda initialisation: log-spaced trial values of 9 Lambda M^2; at each,
  // (M, a) is fitted to (U, V) and the full residual is recorded.
  const int K = std::max(2, opts.lambda_scan_points);
  const double U = data.U;
  std::optional<Vec<3>> best;
  double best_res = std::numeric_limits<double>::infinity();
  bool any_seed_above_a_min = false;
  InversionOptions inner = opts;
  inner.tolerance = 1e-12;
  for (int k = 0; k < K; ++k) {
    const double xk = opts.scan_min * std::pow(opts.scan_max / opts.scan_min, double(k) / (K - 1));
    const double Lambda_k = 3.0 * U * U * xk / (1.0 - xk);
    try {
      const Seed s = closed_form_seed(data.U, data.V, Lambda_k);
      if (!(std::abs(s.a0) >= opts.a_min)) continue;
      any_seed_above_a_min = true;
      const ReconResult two = newton_invert_two({data.U, data.V}, Lambda_k, res, inner);
      const Vec<3> xk3(two.params.M(), two.params.a(), Lambda_k);
      const double r = (map(xk3) - target).lpNorm<Eigen::Infinity>();
      if (r < best_res) {
        best_res = r;
        best = xk3;
      }
    } catch (const Error&) {
      // trial Lambda not usable
    }
  }
  if (!any_seed_above_a_min) {
    throw Error(ErrorCode::NearDegenerate,
                "|a| seed below a_min: the three-parameter map degenerates as a -> 0");
  }
  if (!best) throw Error(ErrorCode::NoConvergence, "no usable Lambda in the initialisation scan");

  NewtonProblem<3> prob;
  prob.map = map;
  if (opts.jacobian == JacobianMethod::analytic_chain) {
    prob.jacobian = [res](const Vec<3>& x) {
      return analytic_jacobian_three(SpacetimeParams(x[0], x[1], x[2]), res);
    };
  } else {
    prob.jacobian = [map, step = opts.step](const Vec<3>& x) { return numeric_jacobian<3>(map, x, step); };
  }
  prob.admissible = [](const Vec<3>& x) {
    return x[2] > 0.0 && admissible_mass(x[0], x[2]) && std::isfinite(x[1]);
  };
  prob.guard = [](const Vec<3>&, const Mat<3>& J) {
    if (J.determinant() == 0.0) throw Error(ErrorCode::NearDegenerate, "singular 3x3 Jacobian");
  };
  prob.target = target;

  const NewtonOutcome<3> out = run_newton<3>(prob, *best, opts.tolerance, opts.max_iterations);

  const double M = out.x[0], a = out.x[1], Lambda = out.x[2];
  const double det = out.J.determinant();
  const double floor = 0.1 * std::abs(leading_three_det_coefficient(M, Lambda)) * a * a;
  if (!(std::abs(det) >= floor)) {
    throw Error(ErrorCode::NearDegenerate, "|det DH| below 0.1 |5(9ΛM²-4)/(1458M⁵)| a²");
  }

  ReconResult r;
  r.params = SpacetimeParams(M, a, Lambda);
  r.iterations = out.iterations;
  r.final_residual = out.residual;
  r.jacobian_det = det;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd{Eigen::MatrixXd(out.J)};
  r.stability_constant = 1.0 / svd.singularValues()(2);
  r.residual_history = out.history;
  r.seed_M = (*best)[0];
  r.seed_a = (*best)[1];
  r.seed_Lambda = (*best)[2];
  return r;
}

UnlabeledResult unlabeled_invert(double U, double absV, double Lambda, int ell, int n,
                                 const InversionOptions& opts) {
  if (absV < 0.0) throw Error(ErrorCode::InvalidArgument, "absV must be non-negative");
  UnlabeledResult out;
  out.recon = newton_invert_two({U, absV}, Lambda, ell, n, opts);
  const SpacetimeParams& p = out.recon.params;
  out.recon.params = p.with_spin(std::abs(p.a()));
  out.sign_ambiguous = out.recon.params.a() != 0.0;
  return out;
}

}  // namespace kdsqnm
