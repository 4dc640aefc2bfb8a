#pragma once

#include <complex>

#include "kdsqnm/photon_orbit.hpp"

namespace kdsqnm {

struct ModeIndex {
  int n = 0;    ///< overtone, >= 0
  int ell = 1;  ///< angular momentum, >= 1
  Branch branch = Branch::co;
};

// Geometric-optics pseudopole
//   omega = Omega#_branch (ell + 1/2) - i (n + 1/2) lambda_branch.
// Sub-leading symbol corrections are not modelled; they enter only as
// explicit NoiseSpec offsets.
struct Pseudopole {
  std::complex<double> omega;
};

/// Labeled co/counter pair at the same (n, ell).
struct PseudopolePair {
  Pseudopole plus;
  Pseudopole minus;
  int n = 0;
  int ell = 1;
};

struct TwoModeObservables {
  double U = 0.0;
  double V = 0.0;
};

struct SingleModeObservables {
  double W_tilde = 0.0;
  double U_plus = 0.0;
};

struct ThreeObservables {
  double U = 0.0;
  double V = 0.0;
  double W_tilde = 0.0;
};

struct UnlabeledObservables {
  double U = 0.0;
  double absV = 0.0;
};

/// Additive complex frequency errors on the co and counter modes.
struct NoiseSpec {
  std::complex<double> eta_plus{0.0, 0.0};
  std::complex<double> eta_minus{0.0, 0.0};
};

void validate(const ModeIndex& mode);

Pseudopole synthesize_pseudopole(const SpacetimeParams& params, const ModeIndex& mode);
PseudopolePair synthesize_pair(const SpacetimeParams& params, int n, int ell);

PseudopolePair apply_noise(const PseudopolePair& pair, const NoiseSpec& noise);

// Observables from a (possibly perturbed) pair.
TwoModeObservables two_mode_observables(const PseudopolePair& pair);
SingleModeObservables single_mode_observables(const PseudopolePair& pair);
ThreeObservables three_observables(const PseudopolePair& pair);
UnlabeledObservables unlabeled_observables(const PseudopolePair& pair);

// Noise-free observable maps.
TwoModeObservables two_mode_map(const SpacetimeParams& params, int n, int ell);
SingleModeObservables single_mode_map(const SpacetimeParams& params, int n, int ell);
ThreeObservables three_map(const SpacetimeParams& params, int n, int ell);
UnlabeledObservables unlabeled_observables(const SpacetimeParams& params, int n, int ell);

/// ell -> infinity limit: U_geo = (Omega#_+ + Omega#_-)/2, V_geo = (Omega#_+ - Omega#_-)/2.
TwoModeObservables geometric_two_map(const SpacetimeParams& params);
/// (U_geo, V_geo, lambda_+).
ThreeObservables geometric_three_map(const SpacetimeParams& params);

}  // namespace kdsqnm
