#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>

#include "pinnfp/autodiff/tape.hpp"
#include "pinnfp/error.hpp"

namespace pinnfp::autodiff {

/// Second-order Taylor jet over up to three seeded input slots.
///
/// Holds the value, the gradient d1[k] and the symmetric Hessian d2(k, l) with respect to the
/// seeded slots. `T` is `double` for plain evaluation or `Var` to record the whole propagation
/// on a Tape, which makes every coefficient differentiable with respect to the parameters.
template <typename T>
class Jet {
 public:
  static constexpr int kMaxSlots = 3;
  static constexpr int kPairs = kMaxSlots * (kMaxSlots + 1) / 2;

  Jet() = default;
  Jet(T value, int slots) : value_(std::move(value)), slots_(slots) {
    if (slots < 0 || slots > kMaxSlots) throw CapabilityError("jet supports at most 3 seeded axes");
    d1_.fill(T(0.0));
    d2_.fill(T(0.0));
  }

  static Jet constant(T value, int slots) { return Jet(std::move(value), slots); }
  /// d1[slot] = 1, everything else zero.
  static Jet seeded(T value, int slots, int slot) {
    Jet j(std::move(value), slots);
    j.d1_[static_cast<std::size_t>(slot)] = T(1.0);
    return j;
  }

  const T& value() const { return value_; }
  int slots() const { return slots_; }
  const T& d1(int k) const { return d1_[static_cast<std::size_t>(k)]; }
  const T& d2(int k, int l) const { return d2_[pair(k, l)]; }
  T& value() { return value_; }
  T& d1(int k) { return d1_[static_cast<std::size_t>(k)]; }
  T& d2(int k, int l) { return d2_[pair(k, l)]; }

  /// Apply a scalar function given f(a), f'(a), f''(a) at the jet's value.
  Jet chain(T f0, T f1, T f2) const {
    Jet r(std::move(f0), slots_);
    for (int k = 0; k < slots_; ++k) r.d1(k) = f1 * d1(k);
    for (int k = 0; k < slots_; ++k)
      for (int l = k; l < slots_; ++l) r.d2(k, l) = f2 * d1(k) * d1(l) + f1 * d2(k, l);
    return r;
  }

  static std::size_t pair(int k, int l) {
    if (k > l) std::swap(k, l);
    // Upper-triangular row-major index for a 3x3 symmetric matrix.
    return static_cast<std::size_t>(k * kMaxSlots - k * (k - 1) / 2 + (l - k));
  }

 private:
  T value_{};
  int slots_ = 0;
  std::array<T, kMaxSlots> d1_{};
  std::array<T, kPairs> d2_{};
};

template <typename T>
Jet<T> operator+(const Jet<T>& a, const Jet<T>& b) {
  Jet<T> r(a.value() + b.value(), a.slots());
  for (int k = 0; k < a.slots(); ++k) r.d1(k) = a.d1(k) + b.d1(k);
  for (int k = 0; k < a.slots(); ++k)
    for (int l = k; l < a.slots(); ++l) r.d2(k, l) = a.d2(k, l) + b.d2(k, l);
  return r;
}

template <typename T>
Jet<T> operator-(const Jet<T>& a) {
  Jet<T> r(-a.value(), a.slots());
  for (int k = 0; k < a.slots(); ++k) r.d1(k) = -a.d1(k);
  for (int k = 0; k < a.slots(); ++k)
    for (int l = k; l < a.slots(); ++l) r.d2(k, l) = -a.d2(k, l);
  return r;
}

template <typename T>
Jet<T> operator-(const Jet<T>& a, const Jet<T>& b) {
  return a + (-b);
}

template <typename T>
Jet<T> operator*(const Jet<T>& a, const Jet<T>& b) {
  Jet<T> r(a.value() * b.value(), a.slots());
  for (int k = 0; k < a.slots(); ++k) r.d1(k) = a.d1(k) * b.value() + a.value() * b.d1(k);
  for (int k = 0; k < a.slots(); ++k)
    for (int l = k; l < a.slots(); ++l)
      r.d2(k, l) = a.d2(k, l) * b.value() + a.d1(k) * b.d1(l) + a.d1(l) * b.d1(k) + a.value() * b.d2(k, l);
  return r;
}

/// Scale by a scalar of the underlying type (e.g. a network weight).
template <typename T>
Jet<T> operator*(const T& s, const Jet<T>& a) {
  Jet<T> r(s * a.value(), a.slots());
  for (int k = 0; k < a.slots(); ++k) r.d1(k) = s * a.d1(k);
  for (int k = 0; k < a.slots(); ++k)
    for (int l = k; l < a.slots(); ++l) r.d2(k, l) = s * a.d2(k, l);
  return r;
}

template <typename T>
Jet<T> operator+(const Jet<T>& a, const T& s) {
  Jet<T> r = a;
  r.value() = a.value() + s;
  return r;
}

template <typename T>
Jet<T> reciprocal(const Jet<T>& a) {
  T inv = T(1.0) / a.value();
  T inv2 = inv * inv;
  return a.chain(inv, -inv2, T(2.0) * inv2 * inv);
}

template <typename T>
Jet<T> operator/(const Jet<T>& a, const Jet<T>& b) {
  return a * reciprocal(b);
}

template <typename T>
Jet<T> tanh(const Jet<T>& a) {
  using std::tanh;
  T t = tanh(a.value());
  T d = T(1.0) - t * t;
  return a.chain(t, d, T(-2.0) * t * d);
}

template <typename T>
Jet<T> sigmoid(const Jet<T>& a) {
  using autodiff::sigmoid;
  T s = sigmoid(a.value());
  T d = s * (T(1.0) - s);
  return a.chain(s, d, d * (T(1.0) - T(2.0) * s));
}

template <typename T>
Jet<T> sin(const Jet<T>& a) {
  using std::cos;
  using std::sin;
  T s = sin(a.value());
  return a.chain(s, cos(a.value()), -s);
}

template <typename T>
Jet<T> cos(const Jet<T>& a) {
  using std::cos;
  using std::sin;
  T c = cos(a.value());
  return a.chain(c, -sin(a.value()), -c);
}

template <typename T>
Jet<T> exp(const Jet<T>& a) {
  using std::exp;
  T e = exp(a.value());
  return a.chain(e, e, e);
}

template <typename T>
Jet<T> pow(const Jet<T>& a, double p) {
  using std::pow;
  T f1 = p * pow(a.value(), p - 1.0);
  T f2 = p * (p - 1.0) * pow(a.value(), p - 2.0);
  return a.chain(pow(a.value(), p), f1, f2);
}

}  // namespace pinnfp::autodiff
