#include <cmath>

#include "kdsqnm/verify.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace kdsqnm;
using testing::error_code_of;
using testing::near;

TEST_CASE("fit grid") {
  const std::vector<double> a = FitGrid{}.nodes();
  CHECK(a == std::vector<double>{-0.02, -0.015, -0.01, -0.005, 0.005, 0.01, 0.015, 0.02});
  CHECK(error_code_of([] { (void)FitGrid{0.02, 7}.nodes(); }) == ErrorCode::InvalidArgument);
  CHECK(error_code_of([] { (void)FitGrid{0.0, 8}.nodes(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("series fits reproduce the closed forms") {
  const oracle::Coefficients ref = oracle::coefficients(1.0, 0.04);

  const SeriesFitReport om = fit_series_coefficients(SeriesQuantity::Omega_plus, 1.0, 0.04);
  CHECK(near(om.c1, 0.0874074, 1e-6));
  CHECK(near(om.c2, 0.0409847, 1e-5));
  CHECK(near(om.c1, static_cast<double>(ref.c_Z), 1e-6));
  CHECK(near(om.c2, static_cast<double>(ref.c_Omega2), 1e-5));
  CHECK(om.c1_abs_disc <= 1e-6);
  CHECK(om.c2_abs_disc <= 1e-5);
  CHECK(om.powers == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(om.fit_residual < 1e-10);  // O(a^5) truncation at a = 0.02

  const SeriesFitReport lam = fit_series_coefficients(SeriesQuantity::lambda_plus, 1.0, 0.04);
  CHECK(std::abs(lam.c1) < 1e-7);
  CHECK(near(lam.c2, -0.0017819, 1e-5));
  CHECK(near(lam.c2, static_cast<double>(ref.c_lambda2), 1e-5));

  const SeriesFitReport r = fit_series_coefficients(SeriesQuantity::r_plus, 1.0, 0.04);
  CHECK(near(r.c1, -0.9237604, 1e-6));
  CHECK(near(r.c2, -0.3422222, 1e-5));

  const SeriesFitReport u = fit_series_coefficients(SeriesQuantity::U_geo, 1.0, 0.04);
  CHECK(u.parity == ParityConstraint::even);
  CHECK(u.powers == std::vector<int>{0, 2, 4});
  CHECK(u.c1 == 0.0);
  CHECK(near(u.c2, static_cast<double>(ref.c_Omega2), 1e-5));

  const SeriesFitReport v = fit_series_coefficients(SeriesQuantity::V_geo, 1.0, 0.04);
  CHECK(v.parity == ParityConstraint::odd);
  CHECK(v.powers == std::vector<int>{1, 3});
  CHECK(v.c2 == 0.0);
  CHECK(near(v.c1, static_cast<double>(ref.c_Z), 1e-6));

  SUBCASE("other masses and Lambda = 0") {
    for (const auto& [M, L] : {std::pair{0.9, 0.04}, std::pair{1.2, 0.02}, std::pair{1.0, 0.0}}) {
      const oracle::Coefficients c = oracle::coefficients(M, L);
      const SeriesFitReport f = fit_series_coefficients(SeriesQuantity::Omega_plus, M, L);
      CHECK(near(f.c1, static_cast<double>(c.c_Z), 1e-6));
      CHECK(near(f.c2, static_cast<double>(c.c_Omega2), 1e-5));
    }
  }
}

TEST_CASE("parity-constrained and unconstrained fits agree") {
  for (SeriesQuantity q : {SeriesQuantity::U_geo, SeriesQuantity::V_geo}) {
    const SeriesFitReport c = fit_series_coefficients(q, 1.0, 0.04);
    const SeriesFitReport f = fit_series_coefficients(q, 1.0, 0.04, {}, 4, ParityConstraint::none);
    const double tol1 = 3.0 * std::hypot(c.c1_err, f.c1_err) + 1e-12;
    const double tol2 = 3.0 * std::hypot(c.c2_err, f.c2_err) + 1e-12;
    CHECK(std::abs(c.c1 - f.c1) <= tol1);
    CHECK(std::abs(c.c2 - f.c2) <= tol2);
  }
}

TEST_CASE("lambda - Omega identity within fit uncertainty") {
  const SeriesFitReport om = fit_series_coefficients(SeriesQuantity::Omega_plus, 1.0, 0.04);
  const SeriesFitReport lam = fit_series_coefficients(SeriesQuantity::lambda_plus, 1.0, 0.04);
  const double expected = -5.0 * std::sqrt(3.0) / 162.0 * std::sqrt(1.0 - 9.0 * 0.04);
  CHECK(near(expected, -0.0427666, 1e-7));
  // Fitted quadratics carry the O(a^2) truncation of the degree-4 model too.
  const double tol = 3.0 * std::hypot(om.c2_err, lam.c2_err) + 1e-5;
  CHECK(std::abs((lam.c2 - om.c2) - expected) <= tol);
}

TEST_CASE("fit errors") {
  CHECK(error_code_of([] { fit_series_coefficients(SeriesQuantity::Omega_plus, 1.0, 0.04, {}, 2); }) ==
        ErrorCode::InvalidArgument);
  CHECK(error_code_of([] { fit_series_coefficients(SeriesQuantity::Omega_plus, 1.0, 0.04, {}, 6); }) ==
        ErrorCode::InvalidArgument);
  CHECK(error_code_of([] { fit_series_coefficients(SeriesQuantity::Omega_plus, 1.0, 0.04, {0.02, 2}, 5); }) ==
        ErrorCode::IllConditionedFit);
  CHECK(error_code_of([] { fit_series_coefficients(SeriesQuantity::Omega_plus, 1.0, 0.2); }) ==
        ErrorCode::OutsideAdmissible);
  CHECK(error_code_of([] { parse_series_quantity("Omega"); }) == ErrorCode::InvalidArgument);
  CHECK(parse_series_quantity(to_string(SeriesQuantity::r_plus)) == SeriesQuantity::r_plus);
  CHECK(parse_parity("odd") == ParityConstraint::odd);
}

TEST_CASE("three-parameter determinant limit") {
  const LimitCheckReport r = jacobian_det_limit_check(1.0, 0.04, {0.04, 0.02, 0.01});
  CHECK(near(r.reference, 5.0 * (0.36 - 4.0) / 1458.0, 1e-15));
  CHECK(near(r.reference, -0.0124829, 1e-7));
  CHECK(r.rel_error < 5e-3);
  CHECK(r.refinement_improves);
  CHECK(r.ratios.size() == 3);
  CHECK(r.extrapolated.size() == 2);

  const LimitCheckReport z = jacobian_det_limit_check(1.0, 0.0, {0.04, 0.02, 0.01});
  CHECK(near(z.reference, -20.0 / 1458.0, 1e-15));
  CHECK(near(z.estimate, -0.0137174, 0.005 * 0.0137174));

  const LimitCheckReport an = jacobian_det_limit_check(1.0, 0.04, {0.04, 0.02, 0.01}, JacobianMethod::analytic_chain);
  CHECK(an.rel_error < 5e-3);

  CHECK(std::abs(geometric_three_det(1.0, 0.0, 0.04)) <= 1e-12);
  CHECK(std::abs(geometric_three_det(1.0, 0.0, 0.04, JacobianMethod::analytic_chain)) <= 1e-12);
  CHECK(error_code_of([] { jacobian_det_limit_check(1.0, 0.04, {}); }) == ErrorCode::InvalidArgument);
  CHECK(error_code_of([] { jacobian_det_limit_check(1.0, 0.04, {0.02, 0.0}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("lambda - U limit") {
  const LimitCheckReport r = wminusu_limit_check(1.0, 0.04, {0.04, 0.02, 0.01});
  CHECK(near(r.reference, -0.0427666, 1e-7));
  CHECK(r.rel_error < 1e-2);
}

TEST_CASE("noise propagation study") {
  const SpacetimeParams truth(1.0, 0.05, 0.04);

  SUBCASE("noise phases are reproducible") {
    const auto p = noise_phases(7, 16);
    CHECK(p == noise_phases(7, 16));
    CHECK(p != noise_phases(8, 16));
    for (const auto& [t1, t2] : p) {
      CHECK(t1 >= 0.0);
      CHECK(t1 < 2.0 * M_PI);
      CHECK(t2 >= 0.0);
      CHECK(t2 < 2.0 * M_PI);
    }
  }

  SUBCASE("zero noise is the round-trip floor") {
    const NoiseStudyResult r = noise_propagation_study(truth, 0, {100}, {0.0}, 4);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].max_error <= 1e-10);
    CHECK(r.rows[0].scaled_error == 0.0);
  }

  SUBCASE("linear in eps and 1/ell") {
    const NoiseStudyResult r = noise_propagation_study(truth, 0, {100, 200}, {1e-3, 2e-3}, 32);
    REQUIRE(r.rows.size() == 4);
    CHECK(r.seed == 20240601);
    CHECK(r.rows[0].ell == 100);
    CHECK(r.rows[1].eps == 2e-3);
    CHECK(r.rows[2].ell == 200);
    CHECK(near(r.rows[1].max_error / r.rows[0].max_error, 2.0, 0.1));
    CHECK(near(r.rows[2].max_error / r.rows[0].max_error, 0.5, 0.05));
    for (const NoiseStudyRow& row : r.rows) {
      CHECK(row.trials == 32);
      CHECK(near(row.scaled_error, row.max_error * row.ell / row.eps, 1e-12 * row.scaled_error));
      CHECK(row.max_error <= row.stability_constant * row.eps / row.ell * std::sqrt(2.0));
    }
  }

  CHECK(error_code_of([&] { noise_propagation_study(truth, 0, {100}, {1e-3}, 0); }) == ErrorCode::InvalidArgument);
  CHECK(error_code_of([&] { noise_propagation_study(truth, 0, {100}, {-1e-3}, 4); }) == ErrorCode::InvalidArgument);
}
