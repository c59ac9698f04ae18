#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace pinnfp::autodiff {

/// Input axes carried by a partial derivative: 0 = t, 1 = x, 2 = y.
inline constexpr int kMaxAxes = 4;
/// Highest total derivative order the batched engine propagates.
inline constexpr int kMaxOrder = 3;

/// Mixed partial derivative d^|m| / (d axis_0^m0 d axis_1^m1 ...), stored as per-axis counts.
class Partial {
 public:
  constexpr Partial() = default;

  /// Partial::along({1, 1}) is d^2/dx^2; Partial::along({}) is the value itself.
  static Partial along(std::initializer_list<int> axes);
  static Partial along(std::span<const int> axes);

  int count(int axis) const { return counts_[static_cast<std::size_t>(axis)]; }
  int order() const;
  bool is_value() const { return order() == 0; }

  Partial plus(int axis) const;
  /// Componentwise <= : every derivative in `*this` also appears in `other`.
  bool divides(const Partial& other) const;
  /// Expanded axis list, e.g. d^3/dx^2dy -> {1, 1, 2}.
  std::vector<int> axes() const;
  /// Highest axis index with a nonzero count, or -1 for the value.
  int max_axis() const;

  /// "u" -> "u_t", "u_xx", ... using axis names t, x, y, z.
  std::string suffix() const;

  bool operator==(const Partial&) const = default;
  /// Graded order: total order first, then lexicographic on counts.
  std::strong_ordering operator<=>(const Partial& other) const;

 private:
  std::array<std::uint8_t, kMaxAxes> counts_{};
};

/// One term of the multivariate Faa di Bruno expansion of d^m sigma(s):
/// coeff * sigma^(order)(s) * prod_k s_{blocks[k]}.
struct ChainTerm {
  double coeff = 1.0;
  int order = 0;
  std::vector<int> blocks;  // indices into the owning PartialSet
};

/// Sorted set of partials closed under taking sub-partials (always contains the value).
class PartialSet {
 public:
  PartialSet() : PartialSet(std::span<const Partial>{}) {}
  explicit PartialSet(std::span<const Partial> requested);
  PartialSet(std::initializer_list<Partial> requested)
      : PartialSet(std::span<const Partial>(requested.begin(), requested.size())) {}

  std::size_t size() const { return partials_.size(); }
  const Partial& operator[](std::size_t i) const { return partials_[i]; }
  const std::vector<Partial>& partials() const { return partials_; }

  /// Index of `p`, or -1 when absent.
  int index_of(const Partial& p) const;
  bool contains(const Partial& p) const { return index_of(p) >= 0; }
  int max_order() const;
  /// Smallest input width able to host every axis in the set.
  int min_input_width() const;

  /// Chain-rule expansion of entry i through a scalar nonlinearity (empty for the value).
  const std::vector<ChainTerm>& chain_terms(std::size_t i) const { return chain_terms_[i]; }

 private:
  std::vector<Partial> partials_;
  std::vector<std::vector<ChainTerm>> chain_terms_;
};

}  // namespace pinnfp::autodiff
