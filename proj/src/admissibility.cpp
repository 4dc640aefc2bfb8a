#include <algorithm>
#include <cmath>
#include <limits>

#include "kdsqnm/kds_core.hpp"
#include "kdsqnm/photon_orbit.hpp"

namespace kdsqnm {

AdmissibilityReport is_subextremal(const SpacetimeParams& params) {
  AdmissibilityReport report;
  const double M = params.M();
  if (!(9.0 * params.Lambda() * M * M < 1.0)) {
    report.diagnostic = "9ΛM² ≥ 1";
    return report;
  }

  try {
    const HorizonData h = horizon_roots(params);
    report.notes = h.notes;
  } catch (const Error& e) {
    report.diagnostic = e.what();
    return report;
  }

  const double omega_ph = std::sqrt(1.0 - 9.0 * params.Lambda() * M * M) / (3.0 * std::sqrt(3.0) * M);
  report.orbit_guard = std::numeric_limits<double>::infinity();
  for (Branch b : {Branch::co, Branch::counter}) {
    try {
      const CircularOrbit orbit = solve_circular_orbit(params, b);
      report.orbit_guard = std::min(report.orbit_guard, std::abs(orbit.jacobian_det) / (4.0 * omega_ph));
    } catch (const Error& e) {
      report.diagnostic = std::string(to_string(b)) + " orbit: " + e.what();
      return report;
    }
  }
  report.admissible = true;
  return report;
}

}  // namespace kdsqnm
