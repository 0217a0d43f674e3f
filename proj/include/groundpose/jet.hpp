#pragma once

// Forward-mode dual numbers carrying N partial derivatives. Only the
// operations the geometry chain needs are provided.

#include <array>
#include <cmath>

namespace groundpose {

template <int N>
struct Jet {
  double a = 0.0;
  std::array<double, N> v{};

  constexpr Jet() = default;
  constexpr Jet(double value) : a(value) {}  // NOLINT(google-explicit-constructor)
  static Jet variable(double value, int index) {
    Jet j(value);
    j.v[static_cast<std::size_t>(index)] = 1.0;
    return j;
  }
};

template <int N>
Jet<N> operator-(const Jet<N>& x) {
  Jet<N> r(-x.a);
  for (int i = 0; i < N; ++i) r.v[i] = -x.v[i];
  return r;
}

template <int N>
Jet<N> operator+(const Jet<N>& x, const Jet<N>& y) {
  Jet<N> r(x.a + y.a);
  for (int i = 0; i < N; ++i) r.v[i] = x.v[i] + y.v[i];
  return r;
}

template <int N>
Jet<N> operator-(const Jet<N>& x, const Jet<N>& y) {
  Jet<N> r(x.a - y.a);
  for (int i = 0; i < N; ++i) r.v[i] = x.v[i] - y.v[i];
  return r;
}

template <int N>
Jet<N> operator*(const Jet<N>& x, const Jet<N>& y) {
  Jet<N> r(x.a * y.a);
  for (int i = 0; i < N; ++i) r.v[i] = x.a * y.v[i] + y.a * x.v[i];
  return r;
}

template <int N>
Jet<N> operator/(const Jet<N>& x, const Jet<N>& y) {
  const double inv = 1.0 / y.a;
  const double q = x.a * inv;
  Jet<N> r(q);
  for (int i = 0; i < N; ++i) r.v[i] = (x.v[i] - q * y.v[i]) * inv;
  return r;
}

template <int N> Jet<N> operator+(const Jet<N>& x, double s) { return x + Jet<N>(s); }
template <int N> Jet<N> operator+(double s, const Jet<N>& x) { return Jet<N>(s) + x; }
template <int N> Jet<N> operator-(const Jet<N>& x, double s) { return x - Jet<N>(s); }
template <int N> Jet<N> operator-(double s, const Jet<N>& x) { return Jet<N>(s) - x; }
template <int N> Jet<N> operator*(const Jet<N>& x, double s) { return x * Jet<N>(s); }
template <int N> Jet<N> operator*(double s, const Jet<N>& x) { return Jet<N>(s) * x; }
template <int N> Jet<N> operator/(const Jet<N>& x, double s) { return x / Jet<N>(s); }
template <int N> Jet<N> operator/(double s, const Jet<N>& x) { return Jet<N>(s) / x; }

template <int N>
Jet<N> sin(const Jet<N>& x) {
  const double c = std::cos(x.a);
  Jet<N> r(std::sin(x.a));
  for (int i = 0; i < N; ++i) r.v[i] = c * x.v[i];
  return r;
}

template <int N>
Jet<N> cos(const Jet<N>& x) {
  const double s = -std::sin(x.a);
  Jet<N> r(std::cos(x.a));
  for (int i = 0; i < N; ++i) r.v[i] = s * x.v[i];
  return r;
}

template <int N>
Jet<N> sqrt(const Jet<N>& x) {
  const double s = std::sqrt(x.a);
  Jet<N> r(s);
  const double d = s > 0.0 ? 0.5 / s : 0.0;
  for (int i = 0; i < N; ++i) r.v[i] = d * x.v[i];
  return r;
}

inline double value_of(double x) { return x; }
template <int N>
double value_of(const Jet<N>& x) {
  return x.a;
}

}  // namespace groundpose
