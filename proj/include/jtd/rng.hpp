#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace jtd {

/// SplitMix64 finalizer. Used to derive independent child seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Child seed for a named sub-stream, e.g. derive_seed(master, trial_index).
/// Distinct (parent, tags...) tuples give unrelated streams.
std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> tags) noexcept;

/// Seeded random stream. The engine is std::mt19937_64 (output fully specified
/// by the standard); uniform and normal transforms are done here rather than
/// through <random> distributions so draws do not depend on the stdlib.
class Stream {
 public:
  explicit Stream(std::uint64_t seed);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform on (0, 1).
  double uniform_open();

  /// Standard normal (Marsaglia polar method).
  double normal();

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace jtd
