#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "pinnfp/autodiff/partial.hpp"
#include "pinnfp/autodiff/tape.hpp"
#include "pinnfp/error.hpp"

namespace pinnfp::autodiff {

/// Values and input derivatives of one or more output channels at a single point.
///
/// Small fixed-capacity map keyed by (channel, partial); lookups are linear, which is
/// cheaper than hashing for the handful of entries a residual needs.
template <typename T>
class Bundle {
 public:
  static constexpr std::size_t kCapacity = 48;

  struct Entry {
    int channel = 0;
    Partial partial;
    T value{};
  };

  void set(int channel, const Partial& p, T value) {
    for (std::size_t i = 0; i < size_; ++i)
      if (entries_[i].channel == channel && entries_[i].partial == p) {
        entries_[i].value = std::move(value);
        return;
      }
    if (size_ == kCapacity) throw CapabilityError("derivative bundle capacity exceeded");
    entries_[size_++] = Entry{channel, p, std::move(value)};
  }

  bool has(int channel, const Partial& p) const { return find(channel, p) != nullptr; }

  const T& at(int channel, const Partial& p) const {
    if (const T* v = find(channel, p)) return *v;
    throw ConfigError("derivative bundle lacks channel " + std::to_string(channel) + " entry u" + p.suffix());
  }

  /// Value of channel `channel` (the zero-order partial).
  const T& value(int channel = 0) const { return at(channel, Partial{}); }

  std::size_t size() const { return size_; }
  const Entry& entry(std::size_t i) const { return entries_[i]; }
  void clear() { size_ = 0; }

 private:
  const T* find(int channel, const Partial& p) const {
    for (std::size_t i = 0; i < size_; ++i)
      if (entries_[i].channel == channel && entries_[i].partial == p) return &entries_[i].value;
    return nullptr;
  }

  std::array<Entry, kCapacity> entries_{};
  std::size_t size_ = 0;
};

/// Network output value together with the requested input derivatives at one point.
using DerivativeBundle = Bundle<double>;

}  // namespace pinnfp::autodiff
