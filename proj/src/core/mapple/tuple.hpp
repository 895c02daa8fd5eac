#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace mapple {

/// Ordered integer sequence: iteration points, space extents, processor-space
/// indices and factorizations all share this representation.
class Tuple {
 public:
  using value_type = std::int64_t;

  Tuple() = default;
  Tuple(std::initializer_list<std::int64_t> values) : v_(values) {}
  explicit Tuple(std::vector<std::int64_t> values) : v_(std::move(values)) {}
  explicit Tuple(std::span<const std::int64_t> values) : v_(values.begin(), values.end()) {}
  Tuple(std::size_t n, std::int64_t fill) : v_(n, fill) {}

  std::size_t size() const noexcept { return v_.size(); }
  bool empty() const noexcept { return v_.empty(); }

  std::int64_t& operator[](std::size_t i) { return v_[i]; }
  std::int64_t operator[](std::size_t i) const { return v_[i]; }

  auto begin() noexcept { return v_.begin(); }
  auto end() noexcept { return v_.end(); }
  auto begin() const noexcept { return v_.begin(); }
  auto end() const noexcept { return v_.end(); }

  void push_back(std::int64_t x) { v_.push_back(x); }
  const std::vector<std::int64_t>& values() const noexcept { return v_; }
  std::span<const std::int64_t> span() const noexcept { return v_; }

  /// Product of all elements; throws Overflow instead of wrapping.
  std::int64_t product() const;

  /// "(2,3)" style rendering.
  std::string to_string() const;

  friend bool operator==(const Tuple&, const Tuple&) = default;
  friend auto operator<=>(const Tuple& a, const Tuple& b) { return a.v_ <=> b.v_; }

 private:
  std::vector<std::int64_t> v_;
};

/// Parses "12x18", "12,18" or "(12, 18)". Throws Error(InvalidArgument).
Tuple parse_tuple(std::string_view text);

/// Calls fn(index) for every index of a box of the given extents, row-major.
template <typename Fn>
void for_each_index(const Tuple& extents, Fn&& fn) {
  if (extents.empty()) return;
  for (auto e : extents)
    if (e <= 0) return;
  Tuple idx(extents.size(), 0);
  while (true) {
    fn(static_cast<const Tuple&>(idx));
    std::size_t d = extents.size();
    while (d > 0) {
      --d;
      if (++idx[d] < extents[d]) break;
      idx[d] = 0;
      if (d == 0) return;
    }
  }
}

}  // namespace mapple
