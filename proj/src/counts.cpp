#include "miscale/counts.hpp"

#include <omp.h>

#include <vector>

#include "miscale/common.hpp"

namespace miscale {

std::vector<std::uint64_t> pair_counts_at_lag_serial(const Corpus& corpus, std::uint64_t lag) {
  if (lag == 0) throw numeric_error("pair_counts_at_lag: lag must be positive");
  const std::uint64_t v = corpus.vocab_size;
  std::vector<std::uint64_t> dense(v * v, 0);
  for (const auto& seq : corpus.sequences) {
    if (seq.size() <= lag) continue;
    const std::size_t n = seq.size() - lag;
    const std::uint32_t* s = seq.symbols.data();
    for (std::size_t t = 0; t < n; ++t) dense[s[t] * v + s[t + lag]] += 1;
  }
  return dense;
}

std::vector<std::uint64_t> pair_counts_at_lag(const Corpus& corpus, std::uint64_t lag) {
  if (lag == 0) throw numeric_error("pair_counts_at_lag: lag must be positive");
  const std::uint64_t v = corpus.vocab_size;
  const std::size_t cells = v * v;
  std::vector<std::uint64_t> dense(cells, 0);
  const auto& seqs = corpus.sequences;

#pragma omp parallel
  {
    std::vector<std::uint64_t> local(cells, 0);
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(seqs.size()); ++i) {
      const auto& seq = seqs[static_cast<std::size_t>(i)];
      if (seq.size() <= lag) continue;
      const std::size_t n = seq.size() - lag;
      const std::uint32_t* s = seq.symbols.data();
      for (std::size_t t = 0; t < n; ++t) local[s[t] * v + s[t + lag]] += 1;
    }
#pragma omp critical
    {
      for (std::size_t c = 0; c < cells; ++c) dense[c] += local[c];
    }
  }
  return dense;
}

CountTable pair_table_from_dense(const std::vector<std::uint64_t>& dense, std::uint32_t vocab) {
  CountTable table;
  for (std::uint32_t x = 0; x < vocab; ++x)
    for (std::uint32_t y = 0; y < vocab; ++y) {
      const std::uint64_t n = dense[static_cast<std::uint64_t>(x) * vocab + y];
      if (n) table.add(pack_pair(x, y), n);
    }
  return table;
}

}  // namespace miscale
