#include <algorithm>
#include <atomic>
#include <string>
#include <vector>

#include "kdsqnm/verify.hpp"
#include "test_support.hpp"

using namespace kdsqnm;

TEST_CASE("for_each_index visits every index once") {
  for (Execution exec : {Execution::serial, Execution::parallel}) {
    std::vector<int> hits(1000, 0);
    for_each_index(exec, hits.size(), [&](std::size_t i) { ++hits[i]; });
    CHECK(std::count(hits.begin(), hits.end(), 1) == 1000);
  }
  CHECK(available_threads() >= 1);
}

TEST_CASE("the lowest failing index is rethrown") {
  for (Execution exec : {Execution::serial, Execution::parallel}) {
    std::atomic<int> calls{0};
    try {
      for_each_index(exec, 200, [&](std::size_t i) {
        ++calls;
        if (i % 17 == 5) throw Error(ErrorCode::NoConvergence, std::to_string(i));
      });
      FAIL("expected a throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoConvergence);
      CHECK(std::string(e.what()) == "NoConvergence: 5");
    }
    // The serial path stops at the first failure; the parallel one finishes.
    CHECK(calls.load() == (exec == Execution::serial ? 6 : 200));
  }
}

TEST_CASE("serial and parallel scans are bitwise identical") {
  SUBCASE("P-matrix scan") {
    const RectangleSpec rect{0.9, 1.1, -0.1, 0.1, 9, 9};
    const PMatrixReport s = p_matrix_rectangle_scan(rect, 0.04, 100, 0, Execution::serial);
    const PMatrixReport p = p_matrix_rectangle_scan(rect, 0.04, 100, 0, Execution::parallel);
    REQUIRE(s.nodes.size() == p.nodes.size());
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
      CHECK(s.nodes[i].U == p.nodes[i].U);
      CHECK(s.nodes[i].V == p.nodes[i].V);
      CHECK(s.nodes[i].minus_det == p.nodes[i].minus_det);
    }
    CHECK(s.min_minus_det == p.min_minus_det);
    CHECK(s.min_separation == p.min_separation);
    CHECK(s.pass == p.pass);
  }

  SUBCASE("stability constants") {
    const ObservableMap<2> g = two_parameter_map(0.04, Resolution::geometric());
    const RectangleSpec rect{0.9, 1.1, -0.1, 0.1, 7, 7};
    const StabilityConstants s = stability_constants(g, 0.04, rect, {}, Execution::serial);
    const StabilityConstants p = stability_constants(g, 0.04, rect, {}, Execution::parallel);
    CHECK(s.c_star == p.c_star);
    CHECK(s.L_star == p.L_star);
    CHECK(s.worst_M == p.worst_M);
    CHECK(s.worst_a == p.worst_a);
  }

  SUBCASE("series fit") {
    const SeriesFitReport s = fit_series_coefficients(SeriesQuantity::Omega_plus, 1.0, 0.04, {}, 4, std::nullopt,
                                                      Execution::serial);
    const SeriesFitReport p = fit_series_coefficients(SeriesQuantity::Omega_plus, 1.0, 0.04, {}, 4, std::nullopt,
                                                      Execution::parallel);
    CHECK(s.coefficients == p.coefficients);
    CHECK(s.uncertainties == p.uncertainties);
  }

  SUBCASE("noise study") {
    const SpacetimeParams truth(1.0, 0.05, 0.04);
    const NoiseStudyResult s = noise_propagation_study(truth, 0, {100}, {1e-3}, 8, 11, Execution::serial);
    const NoiseStudyResult p = noise_propagation_study(truth, 0, {100}, {1e-3}, 8, 11, Execution::parallel);
    CHECK(s.rows[0].max_error == p.rows[0].max_error);
    CHECK(s.rows[0].stability_constant == p.rows[0].stability_constant);
  }
}
