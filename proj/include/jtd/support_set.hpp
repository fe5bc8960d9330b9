#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace jtd {

/// Strictly increasing list of column indices. Ordering is lexicographic on
/// the index list, which is what the decoder uses for tie-breaking.
class SupportSet {
 public:
  SupportSet() = default;

  /// Throws kIndexOutOfRange on negative entries and kInvalidConfig when the
  /// list is not strictly increasing.
  explicit SupportSet(std::vector<int> indices);

  /// Sorts and validates; duplicates are rejected.
  static SupportSet from_unsorted(std::vector<int> indices);

  std::span<const int> indices() const noexcept { return indices_; }
  int size() const noexcept { return static_cast<int>(indices_.size()); }
  bool empty() const noexcept { return indices_.empty(); }
  int operator[](int k) const { return indices_[static_cast<std::size_t>(k)]; }
  bool contains(int index) const;

  /// Largest index + 1, or 0 for the empty set.
  int bound() const noexcept { return indices_.empty() ? 0 : indices_.back() + 1; }

  /// |this ∩ other|
  int overlap(const SupportSet& other) const;

  std::string to_string() const;

  friend auto operator<=>(const SupportSet&, const SupportSet&) = default;
  friend bool operator==(const SupportSet&, const SupportSet&) = default;

 private:
  std::vector<int> indices_;
};

/// C(m, l), or nullopt when it does not fit in 64 bits.
std::optional<std::uint64_t> binomial(int m, int l);

/// The rank-th (0-based) size-l subset of {0..m-1} in lexicographic order.
SupportSet nth_combination(int m, int l, std::uint64_t rank);

/// Advances `indices` to the next size-l subset of {0..m-1} in lexicographic
/// order. Returns false after the last one.
bool next_combination(std::vector<int>& indices, int m);

/// All C(m, l) supports in lexicographic order. Throws kBudget if the count
/// exceeds max_subsets.
std::vector<SupportSet> enumerate_supports(int m, int l, std::uint64_t max_subsets);

}  // namespace jtd
