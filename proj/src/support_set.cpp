#include "jtd/support_set.hpp"

#include <algorithm>
#include <sstream>

#include "jtd/error.hpp"

namespace jtd {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimensionOverflow: return "dimension overflow";
    case ErrorKind::kInvalidSparsity: return "invalid sparsity";
    case ErrorKind::kShapeMismatch: return "shape mismatch";
    case ErrorKind::kRegime: return "regime error";
    case ErrorKind::kIndexOutOfRange: return "index out of range";
    case ErrorKind::kRankDeficient: return "rank deficient";
    case ErrorKind::kBudget: return "subset budget exceeded";
    case ErrorKind::kInvalidConfig: return "invalid config";
    case ErrorKind::kDomain: return "domain error";
    case ErrorKind::kPrecondition: return "precondition violated";
    case ErrorKind::kSingularity: return "singularity";
    case ErrorKind::kRange: return "range error";
    case ErrorKind::kIo: return "I/O error";
  }
  return "error";
}

SupportSet::SupportSet(std::vector<int> indices) : indices_(std::move(indices)) {
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (indices_[k] < 0) throw Error(ErrorKind::kIndexOutOfRange, "negative support index");
    if (k > 0 && indices_[k] <= indices_[k - 1])
      throw Error(ErrorKind::kInvalidConfig, "support indices must be strictly increasing");
  }
}

SupportSet SupportSet::from_unsorted(std::vector<int> indices) {
  std::sort(indices.begin(), indices.end());
  return SupportSet(std::move(indices));
}

bool SupportSet::contains(int index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

int SupportSet::overlap(const SupportSet& other) const {
  int count = 0;
  auto a = indices_.begin();
  auto b = other.indices_.begin();
  while (a != indices_.end() && b != other.indices_.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++count;
      ++a;
      ++b;
    }
  }
  return count;
}

std::string SupportSet::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t k = 0; k < indices_.size(); ++k) os << (k ? "," : "") << indices_[k];
  os << '}';
  return os.str();
}

std::optional<std::uint64_t> binomial(int m, int l) {
  if (l < 0 || m < 0 || l > m) return 0;
  l = std::min(l, m - l);
  unsigned __int128 c = 1;
  for (int k = 1; k <= l; ++k) {
    // c * (m - l + k) / k is exact at every step.
    c = c * static_cast<unsigned>(m - l + k) / static_cast<unsigned>(k);
    if (c > UINT64_MAX) return std::nullopt;
  }
  return static_cast<std::uint64_t>(c);
}

SupportSet nth_combination(int m, int l, std::uint64_t rank) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(l));
  int next = 0;
  for (int slot = 0; slot < l; ++slot) {
    for (int v = next; v < m; ++v) {
      // Number of completions when `v` is placed at this slot.
      const std::uint64_t block = binomial(m - v - 1, l - slot - 1).value();
      if (rank < block) {
        out.push_back(v);
        next = v + 1;
        break;
      }
      rank -= block;
    }
  }
  if (static_cast<int>(out.size()) != l) throw Error(ErrorKind::kRange, "combination rank out of range");
  return SupportSet(std::move(out));
}

bool next_combination(std::vector<int>& indices, int m) {
  const int l = static_cast<int>(indices.size());
  int k = l - 1;
  while (k >= 0 && indices[static_cast<std::size_t>(k)] == m - l + k) --k;
  if (k < 0) return false;
  ++indices[static_cast<std::size_t>(k)];
  for (int j = k + 1; j < l; ++j)
    indices[static_cast<std::size_t>(j)] = indices[static_cast<std::size_t>(j - 1)] + 1;
  return true;
}

std::vector<SupportSet> enumerate_supports(int m, int l, std::uint64_t max_subsets) {
  if (l < 0 || l > m) throw Error(ErrorKind::kInvalidSparsity, "need 0 <= l <= m");
  const auto count = binomial(m, l);
  if (!count || *count > max_subsets)
    throw Error(ErrorKind::kBudget, "C(" + std::to_string(m) + ", " + std::to_string(l) +
                                        ") exceeds max_subsets=" + std::to_string(max_subsets));
  std::vector<SupportSet> out;
  out.reserve(static_cast<std::size_t>(*count));
  std::vector<int> current(static_cast<std::size_t>(l));
  for (int k = 0; k < l; ++k) current[static_cast<std::size_t>(k)] = k;
  do {
    out.emplace_back(current);
  } while (next_combination(current, m));
  return out;
}

}  // namespace jtd
