#include <algorithm>
#include <cmath>
#include <tuple>

#include "kdsqnm/inversion.hpp"
#include "test_support.hpp"

using namespace kdsqnm;
using testing::error_code_of;
using testing::linspace;
using testing::near;

TEST_CASE("closed-form seed") {
  const Seed s = closed_form_seed(0.1539600717839002, 0.0, 0.04);
  CHECK(near(s.M0, 1.0, 1e-15));
  CHECK(s.a0 == 0.0);

  const Seed t = closed_form_seed(0.1539601, 0.00437, 0.04);
  CHECK(near(t.a0, 0.00437 / 0.0874074, 1e-6));
  CHECK(near(t.M0, 1.0, 1e-6));

  const Seed u = closed_form_seed(1.0, 0.0, 0.04);
  CHECK(near(u.M0, 1.0 / (3.0 * std::sqrt(3.04)), 1e-15));
  CHECK(9.0 * 0.04 * u.M0 * u.M0 < 1.0);

  CHECK(error_code_of([] { closed_form_seed(0.0, 0.0, 0.0); }) == ErrorCode::OutOfRange);
  CHECK(error_code_of([] { closed_form_seed(0.0, 0.0, 0.04); }) == ErrorCode::OutOfRange);
}

TEST_CASE("numeric Jacobian of the geometric map") {
  const ObservableMap<2> g = two_parameter_map(0.04, Resolution::geometric());
  const Mat<2> J = numeric_jacobian<2>(g, Vec<2>(1.0, 0.0));
  CHECK(near(J(0, 0), -0.2405626, 1e-7));
  CHECK(near(J(1, 1), 0.0874074, 1e-7));
  CHECK(near(J(0, 1), 0.0, 1e-8));
  const SeriesCoefficients c = closed_form_coefficients(1.0, 0.04);
  CHECK(near(J(0, 0), c.Omega_ph_prime, 1e-8));
  CHECK(near(J(1, 1), c.c_Z, 1e-8));
  CHECK(near(J.determinant(), c.Omega_ph_prime * c.c_Z, 1e-9));
  CHECK(near(J.determinant(), -0.0210270, 1e-7));

  const Mat<2> R = numeric_jacobian<2>(g, Vec<2>(1.0, 0.0), StepSpec{1e-4, true});
  CHECK(near(R(0, 0), c.Omega_ph_prime, 1e-9));
  CHECK(error_code_of([&] { numeric_jacobian<2>(g, Vec<2>(1.0, 0.0), StepSpec{0.0, false}); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("finite-difference and analytic Jacobians agree") {
  for (double M : {0.9, 1.0, 1.1}) {
    for (double a : {-0.08, 0.0, 0.05, 0.2}) {
      for (Resolution res : {Resolution::geometric(), Resolution::mode(0, 100)}) {
        const Mat<2> fd2 = numeric_jacobian<2>(two_parameter_map(0.04, res), Vec<2>(M, a));
        const Mat<2> an2 = analytic_jacobian_two(SpacetimeParams(M, a, 0.04), res);
        CHECK((fd2 - an2).cwiseAbs().maxCoeff() <= 1e-8);
        const Mat<3> fd3 = numeric_jacobian<3>(three_parameter_map(res), Vec<3>(M, a, 0.04));
        const Mat<3> an3 = analytic_jacobian_three(SpacetimeParams(M, a, 0.04), res);
        CHECK((fd3 - an3).cwiseAbs().maxCoeff() <= 1e-7);
      }
    }
  }
}

TEST_CASE("two-parameter Newton inversion") {
  const TwoModeObservables d = two_mode_map(SpacetimeParams(1.0, 0.05, 0.04), 0, 100);
  const ReconResult r = newton_invert_two(d, 0.04, 100, 0);
  CHECK(near(r.params.M(), 1.0, 1e-10));
  CHECK(near(r.params.a(), 0.05, 1e-10));
  CHECK(r.params.Lambda() == 0.04);
  CHECK(r.iterations <= 8);
  CHECK(r.final_residual <= 1e-12);
  CHECK(r.jacobian_det < 0.0);
  CHECK(r.stability_constant > 0.0);
  CHECK(r.residual_history.size() == static_cast<std::size_t>(r.iterations) + 1);

  SUBCASE("analytic Jacobian gives the same answer") {
    InversionOptions opts;
    opts.jacobian = JacobianMethod::analytic_chain;
    const ReconResult s = newton_invert_two(d, 0.04, 100, 0, opts);
    CHECK(near(s.params.M(), 1.0, 1e-10));
    CHECK(near(s.params.a(), 0.05, 1e-10));
  }

  SUBCASE("V = 0 stays on the axis") {
    const TwoModeObservables z = two_mode_map(SpacetimeParams(1.1, 0.0, 0.04), 2, 60);
    const ReconResult s = newton_invert_two(z, 0.04, 60, 2);
    CHECK(s.params.a() == 0.0);
    CHECK(near(s.params.M(), 1.1, 1e-10));
  }

  SUBCASE("noise propagates at the C eps / ell level") {
    const PseudopolePair pair = apply_noise(synthesize_pair(SpacetimeParams(1.0, 0.05, 0.04), 0, 100),
                                            {{1e-3, 0.0}, {-1e-3, 0.0}});
    const ReconResult s = newton_invert_two(two_mode_observables(pair), 0.04, 100, 0);
    const double err = std::hypot(s.params.M() - 1.0, s.params.a() - 0.05);
    CHECK(err > 0.0);
    CHECK(err <= r.stability_constant * 1e-3 / 100 * std::sqrt(2.0));
  }
}

TEST_CASE("round trip across (M, a, Lambda)") {
  for (double M : linspace(0.9, 1.1, 5)) {
    for (double a : linspace(-0.08, 0.08, 5)) {
      for (double L : {0.01, 0.04, 0.07}) {
        const TwoModeObservables d = two_mode_map(SpacetimeParams(M, a, L), 0, 100);
        const ReconResult r = newton_invert_two(d, L, 100, 0);
        CHECK(near(r.params.M(), M, 1e-10));
        CHECK(near(r.params.a(), a, 1e-10));
      }
    }
  }
}

TEST_CASE("Newton converges quadratically") {
  const TwoModeObservables d = two_mode_map(SpacetimeParams(0.95, 0.08, 0.04), 0, 50);
  const ReconResult r = newton_invert_two(d, 0.04, 50, 0);
  const auto& h = r.residual_history;
  for (std::size_t k = 0; k + 1 < h.size(); ++k) {
    if (h[k] < 1e-3 && h[k + 1] > 1e-14) CHECK(h[k + 1] / (h[k] * h[k]) <= 1e3);
  }
}

TEST_CASE("seed quality is O(a^2) + O(1/ell)") {
  double lo = 1e300, hi = 0.0;
  for (double a : {0.02, 0.04, 0.08}) {
    for (int ell : {50, 100, 200}) {
      const TwoModeObservables d = two_mode_map(SpacetimeParams(1.0, a, 0.04), 0, ell);
      const Seed s = closed_form_seed(d.U, d.V, 0.04);
      const double ratio = std::hypot(s.M0 - 1.0, s.a0 - a) / (a * a + 1.0 / ell);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  CHECK(hi / lo <= 2.0);
}

TEST_CASE("two-parameter inversion errors") {
  InversionOptions one;
  one.max_iterations = 1;
  const TwoModeObservables d = two_mode_map(SpacetimeParams(1.0, 0.08, 0.04), 0, 20);
  CHECK(error_code_of([&] { newton_invert_two(d, 0.04, 20, 0, one); }) == ErrorCode::NoConvergence);
  // |det J| grows with |a| on the slow-rotation set, so the guard only fires
  // when its fraction exceeds one.
  InversionOptions strict;
  strict.singular_guard = 2.0;
  CHECK(error_code_of([&] { newton_invert_two(d, 0.04, 20, 0, strict); }) == ErrorCode::SingularJacobian);
  CHECK(error_code_of([] { newton_invert_two({0.16, 0.2}, 0.04, 100, 0); }) == ErrorCode::OutOfRange);
  CHECK(error_code_of([] { newton_invert_two({0.0, 0.0}, 0.04, 100, 0); }) == ErrorCode::OutOfRange);
}

TEST_CASE("three-parameter Newton inversion") {
  const ThreeObservables d = three_map(SpacetimeParams(1.0, 0.2, 0.04), 0, 200);
  const ReconResult r = newton_invert_three(d, 200, 0);
  CHECK(near(r.params.M(), 1.0, 1e-8));
  CHECK(near(r.params.a(), 0.2, 1e-8));
  CHECK(near(r.params.Lambda(), 0.04, 1e-8));
  CHECK(r.final_residual <= 1e-11);
  CHECK(near(r.jacobian_det, -0.0124829 * 0.04, 0.2 * 0.0124829 * 0.04));
  CHECK(r.stability_constant > 0.0);

  SUBCASE("negative spin and other points") {
    for (const auto& [M, a, L] : {std::tuple{1.0, -0.2, 0.04}, std::tuple{0.9, 0.15, 0.06},
                                   std::tuple{1.1, 0.3, 0.02}}) {
      const ReconResult s = newton_invert_three(three_map(SpacetimeParams(M, a, L), 0, 200), 200, 0);
      CHECK(near(s.params.M(), M, 1e-8));
      CHECK(near(s.params.a(), a, 1e-8));
      CHECK(near(s.params.Lambda(), L, 1e-8));
    }
  }

  SUBCASE("analytic Jacobian") {
    InversionOptions opts = InversionOptions::three_parameter();
    opts.jacobian = JacobianMethod::analytic_chain;
    const ReconResult s = newton_invert_three(d, 200, 0, opts);
    CHECK(near(s.params.a(), 0.2, 1e-8));
  }

  CHECK(error_code_of([] { newton_invert_three(three_map(SpacetimeParams(1.0, 0.0, 0.04), 0, 200), 200, 0); }) ==
        ErrorCode::NearDegenerate);
  CHECK(error_code_of([] { newton_invert_three(three_map(SpacetimeParams(1.0, 0.01, 0.04), 0, 200), 200, 0); }) ==
        ErrorCode::NearDegenerate);
}

TEST_CASE("unlabeled inversion") {
  const UnlabeledObservables up = unlabeled_observables(SpacetimeParams(1.0, 0.05, 0.04), 0, 100);
  const UnlabeledObservables dn = unlabeled_observables(SpacetimeParams(1.0, -0.05, 0.04), 0, 100);
  const UnlabeledResult a = unlabeled_invert(up.U, up.absV, 0.04, 100, 0);
  const UnlabeledResult b = unlabeled_invert(dn.U, dn.absV, 0.04, 100, 0);
  CHECK(a.recon.params == b.recon.params);
  CHECK(near(a.recon.params.M(), 1.0, 1e-10));
  CHECK(near(a.recon.params.a(), 0.05, 1e-10));
  CHECK(a.sign_ambiguous);

  const UnlabeledObservables z = unlabeled_observables(SpacetimeParams(1.0, 0.0, 0.04), 0, 100);
  const UnlabeledResult c = unlabeled_invert(z.U, z.absV, 0.04, 100, 0);
  CHECK(c.recon.params.a() == 0.0);
  CHECK_FALSE(c.sign_ambiguous);
  CHECK(error_code_of([] { unlabeled_invert(0.15, -0.01, 0.04, 100, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("stability constants") {
  const ObservableMap<2> g = two_parameter_map(0.04, Resolution::geometric());
  const StabilityConstants s = stability_constants(g, 0.04, RectangleSpec{});
  CHECK(s.nodes_used == 441);
  CHECK(s.nodes_filtered == 0);
  CHECK(s.c_star > 0.0);
  CHECK(std::isfinite(s.C_star));
  CHECK(s.C_star == doctest::Approx(s.L_star / s.c_star));

  RectangleSpec single{1.0, 1.0, 0.0, 0.0, 1, 1};
  const StabilityConstants p = stability_constants(g, 0.04, single);
  CHECK(near(p.c_star, 0.0210270, 1e-7));

  RectangleSpec outside{2.0, 3.0, -0.1, 0.1, 5, 5};
  CHECK(error_code_of([&] { stability_constants(g, 0.04, outside); }) == ErrorCode::EmptyRegion);

  SUBCASE("det D G - Omega_ph' c_Z is O(a^2)") {
    const SeriesCoefficients c = closed_form_coefficients(1.0, 0.04);
    const double lead = c.Omega_ph_prime * c.c_Z;
    double previous = 0.0;
    for (double a : {0.08, 0.04, 0.02}) {
      const double det = numeric_jacobian<2>(g, Vec<2>(1.0, a), StepSpec{1e-5, true}).determinant();
      const double C = (det - lead) / (a * a);
      if (previous != 0.0) CHECK(std::abs(C - previous) <= 0.1 * std::abs(previous));
      previous = C;
    }
  }
}

TEST_CASE("P-matrix rectangle scan") {
  const PMatrixReport r = p_matrix_rectangle_scan(RectangleSpec{}, 0.04, 100, 0);
  CHECK(r.pass);
  CHECK(r.signs_pass);
  CHECK_FALSE(r.collision_found);
  CHECK_FALSE(r.truncated);
  CHECK(r.nodes.size() == 441);
  CHECK(r.min_minus_det > 0.0);

  RectangleSpec crossing{0.9, 2.0, -0.1, 0.1, 12, 3};
  const PMatrixReport t = p_matrix_rectangle_scan(crossing, 0.04, 100, 0);
  CHECK(t.truncated);
  CHECK(t.nodes_filtered > 0);

  RectangleSpec single{1.0, 1.0, 0.05, 0.05, 1, 1};
  const PMatrixReport s = p_matrix_rectangle_scan(single, 0.04, 100, 0);
  CHECK(s.nodes.size() == 1);
  CHECK(s.pass == s.nodes[0].ok);
  CHECK(s.pass);

  RectangleSpec bad{1.0, 0.9, 0.0, 0.1, 3, 3};
  CHECK(error_code_of([&] { p_matrix_rectangle_scan(bad, 0.04, 100, 0); }) == ErrorCode::InvalidArgument);
}
