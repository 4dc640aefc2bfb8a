#pragma once

// Closed-form equatorial Kerr-de Sitter expressions, templated on the scalar
// type so the same code serves double evaluation and dual-number
// differentiation with respect to (r, Omega, M, a, Lambda).
//
// Every expression is written so that (a, Omega, b) -> (-a, -Omega, -b)
// produces bit-for-bit negated or identical intermediates. The reflection
// symmetry between the co- and counter-rotating branches therefore holds
// exactly in floating point, not just to rounding.

namespace kdsqnm::detail {

template <class T>
struct DeltaJet {
  T d0, d1, d2;
};

// Delta_r = -(Lambda/3) r^4 + (1 - Lambda a^2 / 3) r^2 - 2 M r + a^2.
template <class T>
DeltaJet<T> delta_r_jet(const T& M, const T& a, const T& Lambda, const T& r) {
  const T a2 = a * a;
  const T c4 = -Lambda / 3.0;
  const T c2 = 1.0 - Lambda * a2 / 3.0;
  const T c1 = -2.0 * M;
  return {
      (((c4 * r) * r + c2) * r + c1) * r + a2,
      ((4.0 * c4 * r) * r + 2.0 * c2) * r + c1,
      12.0 * c4 * r * r + 2.0 * c2,
  };
}

template <class T>
struct PhiJet {
  T phi, phi_r, phi_rr, phi_w, phi_rw;
};

// Phi(r, W) = g_tt + 2 W g_tphi + W^2 g_phiphi and the derivatives the orbit
// Newton iteration needs. Each coefficient is written as N(r) / r^2 with a
// polynomial numerator, which keeps the r-derivatives short.
template <class T>
PhiJet<T> null_quadratic_jet(const T& M, const T& a, const T& Lambda, const T& r, const T& w) {
  const T a2 = a * a;
  const T xi = 1.0 + Lambda * a2 / 3.0;
  const T xi2 = xi * xi;
  const DeltaJet<T> D = delta_r_jet(M, a, Lambda, r);
  const T s = r * r + a2;

  const T ntt0 = a2 - D.d0;
  const T ntt1 = -D.d1;
  const T ntt2 = -D.d2;

  const T ntp0 = a * (D.d0 - s) / xi;
  const T ntp1 = a * (D.d1 - 2.0 * r) / xi;
  const T ntp2 = a * (D.d2 - 2.0) / xi;

  const T npp0 = (s * s - a2 * D.d0) / xi2;
  const T npp1 = (4.0 * r * s - a2 * D.d1) / xi2;
  const T npp2 = (4.0 * s + 8.0 * r * r - a2 * D.d2) / xi2;

  const T tw = 2.0 * w;
  const T w2 = w * w;
  const T n0 = ntt0 + tw * ntp0 + w2 * npp0;
  const T n1 = ntt1 + tw * ntp1 + w2 * npp1;
  const T n2 = ntt2 + tw * ntp2 + w2 * npp2;
  const T nw0 = 2.0 * ntp0 + tw * npp0;
  const T nw1 = 2.0 * ntp1 + tw * npp1;

  const T inv = 1.0 / r;
  const T inv2 = inv * inv;
  return {
      n0 * inv2,
      (n1 - 2.0 * n0 * inv) * inv2,
      (n2 - 4.0 * n1 * inv + 6.0 * n0 * inv2) * inv2,
      nw0 * inv2,
      (nw1 - 2.0 * nw0 * inv) * inv2,
  };
}

template <class T>
struct RadialJet {
  T R, R1, R2, t_dot;
};

// R(r) = ((r^2 + a^2) - a Xi b)^2 - Delta_r (Xi b - a)^2 with b held fixed,
// and dt/dtau on the equatorial plane.
template <class T>
RadialJet<T> radial_potential_jet(const T& M, const T& a, const T& Lambda, const T& r, const T& b) {
  const T a2 = a * a;
  const T xi = 1.0 + Lambda * a2 / 3.0;
  const DeltaJet<T> D = delta_r_jet(M, a, Lambda, r);
  const T s = r * r + a2;
  const T xb = xi * b;
  const T p = s - a * xb;
  const T q = xb - a;
  const T q2 = q * q;
  const T r2 = r * r;
  return {
      p * p - D.d0 * q2,
      4.0 * r * p - D.d1 * q2,
      12.0 * r2 + 4.0 * a2 - 4.0 * a * xb - D.d2 * q2,
      s * p / (D.d0 * r2) + a * q / r2,
  };
}

// lambda^2 = R'' / (2 r^4 tdot^2). Returns lambda^2 so callers can test the
// sign before taking the root.
template <class T>
T lyapunov_squared(const T& M, const T& a, const T& Lambda, const T& r, const T& b) {
  const RadialJet<T> rad = radial_potential_jet(M, a, Lambda, r, b);
  const T r2 = r * r;
  return rad.R2 / (2.0 * r2 * r2 * rad.t_dot * rad.t_dot);
}

}  // namespace kdsqnm::detail
