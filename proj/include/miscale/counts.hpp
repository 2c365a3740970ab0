#pragma once

#include <cstdint>
#include <map>

#include "miscale/sequence.hpp"

namespace miscale {

inline std::uint64_t pack_pair(std::uint32_t x, std::uint32_t y) {
  return (static_cast<std::uint64_t>(x) << 32) | y;
}
inline std::uint32_t pair_first(std::uint64_t key) {
  return static_cast<std::uint32_t>(key >> 32);
}
inline std::uint32_t pair_second(std::uint64_t key) {
  return static_cast<std::uint32_t>(key & 0xffffffffULL);
}

/// Sparse count table over symbols or packed symbol pairs. Zero-count entries
/// are never stored.
struct CountTable {
  std::map<std::uint64_t, std::uint64_t> counts;
  std::uint64_t total = 0;

  void add(std::uint64_t key, std::uint64_t n = 1) {
    if (n == 0) return;
    counts[key] += n;
    total += n;
  }
  bool empty() const { return counts.empty(); }
  std::size_t distinct() const { return counts.size(); }
};

// Dense pair-count kernels at a fixed lag. Both return a row-major V*V table
// of counts of (x_t, x_{t+lag}) pooled over all start positions and all
// sequences. The OpenMP version reduces per-thread integer tables, so the
// result is identical to the serial reference for any thread count.
std::vector<std::uint64_t> pair_counts_at_lag(const Corpus& corpus, std::uint64_t lag);
std::vector<std::uint64_t> pair_counts_at_lag_serial(const Corpus& corpus, std::uint64_t lag);

/// Convert a dense V*V pair-count table into a sparse CountTable.
CountTable pair_table_from_dense(const std::vector<std::uint64_t>& dense, std::uint32_t vocab);

}  // namespace miscale
