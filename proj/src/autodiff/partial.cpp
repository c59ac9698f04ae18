#include "pinnfp/autodiff/partial.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "pinnfp/error.hpp"

namespace pinnfp::autodiff {

Partial Partial::along(std::initializer_list<int> axes) {
  return along(std::span<const int>(axes.begin(), axes.size()));
}

Partial Partial::along(std::span<const int> axes) {
  Partial p;
  for (int a : axes) {
    if (a < 0 || a >= kMaxAxes) throw ConfigError("partial derivative axis out of range: " + std::to_string(a));
    if (p.counts_[static_cast<std::size_t>(a)] == 255) throw CapabilityError("derivative order overflow");
    ++p.counts_[static_cast<std::size_t>(a)];
  }
  return p;
}

int Partial::order() const {
  return std::accumulate(counts_.begin(), counts_.end(), 0);
}

Partial Partial::plus(int axis) const {
  if (axis < 0 || axis >= kMaxAxes) throw ConfigError("partial derivative axis out of range: " + std::to_string(axis));
  Partial p = *this;
  ++p.counts_[static_cast<std::size_t>(axis)];
  return p;
}

bool Partial::divides(const Partial& other) const {
  for (std::size_t a = 0; a < counts_.size(); ++a)
    if (counts_[a] > other.counts_[a]) return false;
  return true;
}

std::vector<int> Partial::axes() const {
  std::vector<int> out;
  for (int a = 0; a < kMaxAxes; ++a)
    for (int k = 0; k < counts_[static_cast<std::size_t>(a)]; ++k) out.push_back(a);
  return out;
}

int Partial::max_axis() const {
  for (int a = kMaxAxes - 1; a >= 0; --a)
    if (counts_[static_cast<std::size_t>(a)] > 0) return a;
  return -1;
}

std::string Partial::suffix() const {
  static constexpr char kNames[kMaxAxes] = {'t', 'x', 'y', 'z'};
  if (is_value()) return "";
  std::string out = "_";
  for (int a : axes()) out += kNames[a];
  return out;
}

std::strong_ordering Partial::operator<=>(const Partial& other) const {
  if (auto c = order() <=> other.order(); c != 0) return c;
  for (std::size_t a = 0; a < counts_.size(); ++a)
    if (auto c = counts_[a] <=> other.counts_[a]; c != 0) return c;
  return std::strong_ordering::equal;
}

namespace {

// Every set partition of {0..k-1}, as restricted-growth strings.
void partitions(int k, std::vector<int>& labels, int pos, int used, std::vector<std::vector<int>>& out) {
  if (pos == k) {
    out.push_back(labels);
    return;
  }
  for (int b = 0; b <= used && b < k; ++b) {
    labels[static_cast<std::size_t>(pos)] = b;
    partitions(k, labels, pos + 1, std::max(used, b + 1), out);
  }
}

void add_sub_partials(const Partial& p, std::vector<Partial>& out) {
  std::array<int, kMaxAxes> c{};
  for (int a = 0; a < kMaxAxes; ++a) c[static_cast<std::size_t>(a)] = p.count(a);
  std::array<int, kMaxAxes> k{};
  while (true) {
    std::vector<int> axes;
    for (int a = 0; a < kMaxAxes; ++a)
      for (int r = 0; r < k[static_cast<std::size_t>(a)]; ++r) axes.push_back(a);
    out.push_back(Partial::along(axes));
    int a = 0;
    while (a < kMaxAxes) {
      auto ua = static_cast<std::size_t>(a);
      if (k[ua] < c[ua]) {
        ++k[ua];
        break;
      }
      k[ua] = 0;
      ++a;
    }
    if (a == kMaxAxes) break;
  }
}

}  // namespace

PartialSet::PartialSet(std::span<const Partial> requested) {
  std::vector<Partial> all{Partial{}};
  for (const auto& p : requested) {
    if (p.order() > kMaxOrder)
      throw CapabilityError("derivative order " + std::to_string(p.order()) + " exceeds supported maximum " +
                            std::to_string(kMaxOrder));
    add_sub_partials(p, all);
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  partials_ = std::move(all);

  chain_terms_.resize(partials_.size());
  for (std::size_t i = 1; i < partials_.size(); ++i) {
    const auto axes = partials_[i].axes();
    const int k = static_cast<int>(axes.size());
    std::vector<int> labels(static_cast<std::size_t>(k), 0);
    std::vector<std::vector<int>> parts;
    partitions(k, labels, 0, 0, parts);

    std::map<std::pair<int, std::vector<int>>, double> grouped;
    for (const auto& rgs : parts) {
      const int n_blocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
      std::vector<std::vector<int>> block_axes(static_cast<std::size_t>(n_blocks));
      for (int pos = 0; pos < k; ++pos)
        block_axes[static_cast<std::size_t>(rgs[static_cast<std::size_t>(pos)])].push_back(
            axes[static_cast<std::size_t>(pos)]);
      std::vector<int> blocks;
      for (const auto& ba : block_axes) blocks.push_back(index_of(Partial::along(ba)));
      std::sort(blocks.begin(), blocks.end());
      grouped[{n_blocks, blocks}] += 1.0;
    }
    for (auto& [key, coeff] : grouped) chain_terms_[i].push_back(ChainTerm{coeff, key.first, key.second});
  }
}

int PartialSet::index_of(const Partial& p) const {
  auto it = std::lower_bound(partials_.begin(), partials_.end(), p);
  if (it == partials_.end() || *it != p) return -1;
  return static_cast<int>(it - partials_.begin());
}

int PartialSet::max_order() const {
  return partials_.empty() ? 0 : partials_.back().order();
}

int PartialSet::min_input_width() const {
  int w = 0;
  for (const auto& p : partials_) w = std::max(w, p.max_axis() + 1);
  return w;
}

}  // namespace pinnfp::autodiff
