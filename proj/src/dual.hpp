#pragma once

#include <array>
#include <cmath>

namespace kdsqnm::detail {

// Forward-mode dual number carrying N directional derivatives.
template <int N>
struct Dual {
  double val = 0.0;
  std::array<double, N> grad{};

  Dual() = default;
  Dual(double v) : val(v) {}  // NOLINT: constants promote implicitly

  static Dual variable(double v, int index) {
    Dual d(v);
    d.grad[index] = 1.0;
    return d;
  }

  Dual& operator+=(const Dual& o) {
    val += o.val;
    for (int i = 0; i < N; ++i) grad[i] += o.grad[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    val -= o.val;
    for (int i = 0; i < N; ++i) grad[i] -= o.grad[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (int i = 0; i < N; ++i) grad[i] = grad[i] * o.val + val * o.grad[i];
    val *= o.val;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.val;
    for (int i = 0; i < N; ++i) grad[i] = (grad[i] - val * inv * o.grad[i]) * inv;
    val *= inv;
    return *this;
  }

  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(Dual a, const Dual& b) { return a *= b; }
  friend Dual operator/(Dual a, const Dual& b) { return a /= b; }
  friend Dual operator-(Dual a) {
    a.val = -a.val;
    for (auto& g : a.grad) g = -g;
    return a;
  }
};

template <int N>
Dual<N> sqrt(const Dual<N>& x) {
  Dual<N> r(std::sqrt(x.val));
  const double scale = 0.5 / r.val;
  for (int i = 0; i < N; ++i) r.grad[i] = x.grad[i] * scale;
  return r;
}

inline double value_of(double x) { return x; }
template <int N>
double value_of(const Dual<N>& x) {
  return x.val;
}

}  // namespace kdsqnm::detail
