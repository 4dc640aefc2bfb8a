#include "kdsqnm/kds_core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "equatorial_formulas.hpp"

namespace kdsqnm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotSubextremal: return "NotSubextremal";
    case ErrorCode::DegenerateRoot: return "DegenerateRoot";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateJacobian: return "DegenerateJacobian";
    case ErrorCode::HorizonEvaluation: return "HorizonEvaluation";
    case ErrorCode::NegativeCurvature: return "NegativeCurvature";
    case ErrorCode::OutsideAdmissible: return "OutsideAdmissible";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::NearDegenerate: return "NearDegenerate";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::IllConditionedFit: return "IllConditionedFit";
  }
  return "Unknown";
}

SpacetimeParams::SpacetimeParams(double mass, double spin, double cosmological_constant)
    : M_(mass), a_(spin), Lambda_(cosmological_constant) {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw Error(ErrorCode::InvalidArgument, "M must be finite and > 0");
  }
  if (!std::isfinite(spin)) {
    throw Error(ErrorCode::InvalidArgument, "a must be finite");
  }
  if (!(cosmological_constant >= 0.0) || !std::isfinite(cosmological_constant)) {
    throw Error(ErrorCode::InvalidArgument, "Lambda must be finite and >= 0");
  }
}

double evaluate_delta_r(const SpacetimeParams& params, double r, int order) {
  const auto jet = detail::delta_r_jet(params.M(), params.a(), params.Lambda(), r);
  switch (order) {
    case 0: return jet.d0;
    case 1: return jet.d1;
    case 2: return jet.d2;
    default: throw Error(ErrorCode::InvalidArgument, "derivative order must be 0, 1 or 2");
  }
}

std::vector<double> delta_r_coefficients(const SpacetimeParams& params) {
  const double a2 = params.a() * params.a();
  return {a2, -2.0 * params.M(), 1.0 - params.Lambda() * a2 / 3.0, 0.0, -params.Lambda() / 3.0};
}

namespace {

double surface_gravity(const SpacetimeParams& params, double r_h) {
  return std::abs(evaluate_delta_r(params, r_h, 1)) /
         (2.0 * (r_h * r_h + params.a() * params.a()));
}

// Scale of the terms summed when evaluating Delta_r at r; rounding in the
// Horner evaluation is proportional to this.
double term_scale(const std::vector<double>& c, double r) {
  double scale = 0.0;
  double power = 1.0;
  for (double ck : c) {
    scale += std::abs(ck) * power;
    power *= std::abs(r);
  }
  return std::max(1.0, scale);
}

double polish_root(const SpacetimeParams& params, const std::vector<double>& coeffs, double r) {
  constexpr int kMinSteps = 3;
  constexpr int kMaxSteps = 30;
  for (int k = 0; k < kMaxSteps; ++k) {
    const double f = evaluate_delta_r(params, r, 0);
    const double df = evaluate_delta_r(params, r, 1);
    if (k >= kMinSteps && std::abs(f) <= 1e-14 * term_scale(coeffs, r)) break;
    if (df == 0.0) break;
    const double step = f / df;
    r -= step;
    if (k >= kMinSteps && std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(r)) {
      break;
    }
  }
  return r;
}

HorizonData kerr_horizons(const SpacetimeParams& params) {
  const double M = params.M();
  const double a = params.a();
  const double disc = M * M - a * a;
  if (!(disc > 0.0)) {
    throw Error(ErrorCode::NotSubextremal, "M^2 - a^2 <= 0: no distinct event and Cauchy horizons");
  }
  HorizonData h;
  h.cosmological_horizon = false;
  h.r_e = M + std::sqrt(disc);
  h.r_minus = a * a / h.r_e;
  h.r0 = -std::numeric_limits<double>::infinity();
  h.r_c = std::numeric_limits<double>::infinity();
  h.kappa_e = surface_gravity(params, h.r_e);
  h.kappa_c = 0.0;
  h.L_sep = std::numeric_limits<double>::infinity();
  h.residual = std::max(std::abs(evaluate_delta_r(params, h.r_e)),
                        std::abs(evaluate_delta_r(params, h.r_minus)));
  h.notes.emplace_back("missing cosmological horizon (Lambda = 0): r0 = -inf, r_c = +inf");
  if (a == 0.0) h.notes.emplace_back("r_minus degenerate at a=0");
  return h;
}

}  // namespace

HorizonData horizon_roots(const SpacetimeParams& params) {
  if (params.Lambda() == 0.0) return kerr_horizons(params);

  const std::vector<double> c = delta_r_coefficients(params);
  // Companion matrix of the monic quartic r^4 + (c3/c4) r^3 + ... + c0/c4.
  Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
  for (int i = 1; i < 4; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < 4; ++i) companion(i, 3) = -c[i] / c[4];

  const Eigen::EigenSolver<Eigen::Matrix4d> solver(companion, false);
  const Eigen::Vector4cd eig = solver.eigenvalues();

  std::vector<double> roots;
  for (int i = 0; i < 4; ++i) {
    const double mag = std::max(1.0, std::abs(eig[i]));
    const double im = std::abs(eig[i].imag());
    if (im <= 1e-7 * mag) {
      roots.push_back(eig[i].real());
    } else if (im <= 1e-5 * mag) {
      throw Error(ErrorCode::DegenerateRoot, "near-double root of Delta_r (near-extremal parameters)");
    }
  }
  if (roots.size() != 4) {
    std::ostringstream msg;
    msg << "Delta_r has " << roots.size() << " real roots, need four";
    throw Error(ErrorCode::NotSubextremal, msg.str());
  }

  for (double& r : roots) r = polish_root(params, c, r);
  std::sort(roots.begin(), roots.end());

  HorizonData h;
  h.r0 = roots[0];
  h.r_minus = roots[1];
  h.r_e = roots[2];
  h.r_c = roots[3];
  if (params.a() == 0.0) {
    // Delta_r = r * cubic when a = 0, so the root at the origin is exact.
    h.r_minus = 0.0;
    h.notes.emplace_back("r_minus degenerate at a=0");
  }

  // Merged roots come first: polishing can land two of them on one value,
  // which would otherwise read as an ordering failure.
  h.L_sep = h.r_c - h.r_e;
  const std::array<double, 4> sorted{h.r0, h.r_minus, h.r_e, h.r_c};
  for (int i = 0; i < 3; ++i) {
    if (sorted[i + 1] - sorted[i] <= 1e-9 * h.L_sep) {
      throw Error(ErrorCode::DegenerateRoot, "two horizon roots closer than 1e-9 L_sep");
    }
  }

  const bool ordered = h.r0 < 0.0 && h.r_minus < h.r_e && h.r_e < h.r_c &&
                       (params.a() == 0.0 ? h.r_minus == 0.0 : h.r_minus > 0.0);
  if (!ordered) {
    throw Error(ErrorCode::NotSubextremal, "root ordering r0 < 0 < r_minus < r_e < r_c violated");
  }

  h.residual = 0.0;
  for (double r : sorted) {
    const double f = std::abs(evaluate_delta_r(params, r));
    if (f > 1e-12 * term_scale(c, r)) {
      throw Error(ErrorCode::NotSubextremal, "root polishing did not reach the residual bound");
    }
    h.residual = std::max(h.residual, f);
  }
  h.kappa_e = surface_gravity(params, h.r_e);
  h.kappa_c = surface_gravity(params, h.r_c);
  return h;
}

EquatorialMetric equatorial_metric(const SpacetimeParams& params, double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "equatorial_metric requires r > 0");
  const double a = params.a();
  const double a2 = a * a;
  const double xi = params.Xi();
  const double D = evaluate_delta_r(params, r);
  const double s = r * r + a2;
  const double r2 = r * r;
  return {
      (a2 - D) / r2,
      a * (D - s) / (r2 * xi),
      (s * s - a2 * D) / (r2 * xi * xi),
  };
}

}  // namespace kdsqnm
