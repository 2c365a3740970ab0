// Benchmark of the OpenMP kernels against their serial references:
// pair counting at a fixed lag, the full auto-MI curve, and copula sampling
// with a capped thread count.

#include <omp.h>

#include <chrono>
#include <cstdint>
#include <iostream>
#include <vector>

#include "miscale/copula.hpp"
#include "miscale/counts.hpp"
#include "miscale/mi.hpp"

using namespace miscale;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_of(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

template <typename F>
double time_best_of(int reps, F&& f) {
  double best = 1e100;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best, seconds_of(t0, Clock::now()));
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n_seqs = argc > 1 ? std::stoul(argv[1]) : 4000;
  const std::size_t length = argc > 2 ? std::stoul(argv[2]) : 512;
  const int threads = omp_get_max_threads();
  std::cout << "threads " << threads << ", corpus " << n_seqs << " x " << length
            << "\n\n";

  const auto cov = build_covariance(0.1, 0.4, length, CovMode::approx);
  const auto factor = factor_covariance(cov);

  const auto t_sample0 = Clock::now();
  omp_set_num_threads(1);
  const auto corpus_serial = sample_binary(factor, n_seqs, 12345);
  const auto t_sample1 = Clock::now();
  omp_set_num_threads(threads);
  const auto corpus = sample_binary(factor, n_seqs, 12345);
  const auto t_sample2 = Clock::now();
  const double samp_serial = seconds_of(t_sample0, t_sample1);
  const double samp_par = seconds_of(t_sample1, t_sample2);
  bool identical = corpus.sequences.size() == corpus_serial.sequences.size();
  for (std::size_t s = 0; identical && s < corpus.sequences.size(); ++s)
    identical = corpus.sequences[s].symbols == corpus_serial.sequences[s].symbols;
  std::cout << "copula sampling   serial " << samp_serial << " s, parallel " << samp_par
            << " s, speedup " << samp_serial / samp_par << "x, outputs "
            << (identical ? "identical" : "DIFFER") << '\n';

  const std::vector<std::uint64_t> lags = {1, 2, 4, 8, 16, 32, 64, 128};

  const double count_serial =
      time_best_of(3, [&] { (void)pair_counts_at_lag_serial(corpus, 4); });
  const double count_par = time_best_of(3, [&] { (void)pair_counts_at_lag(corpus, 4); });
  const bool counts_match = pair_counts_at_lag(corpus, 4) == pair_counts_at_lag_serial(corpus, 4);
  std::cout << "pair counts lag 4 serial " << count_serial << " s, parallel " << count_par
            << " s, speedup " << count_serial / count_par << "x, outputs "
            << (counts_match ? "identical" : "DIFFER") << '\n';

  const double curve_serial = time_best_of(
      2, [&] { (void)auto_mi_curve(corpus, lags, Estimator::grassberger, false); });
  const double curve_par = time_best_of(
      2, [&] { (void)auto_mi_curve(corpus, lags, Estimator::grassberger, true); });
  const auto c1 = auto_mi_curve(corpus, lags, Estimator::grassberger, false);
  const auto c2 = auto_mi_curve(corpus, lags, Estimator::grassberger, true);
  bool curves_match = c1.points.size() == c2.points.size();
  for (std::size_t i = 0; curves_match && i < c1.points.size(); ++i)
    curves_match = c1.points[i].mi == c2.points[i].mi && c1.points[i].lag == c2.points[i].lag;
  std::cout << "auto-MI curve     serial " << curve_serial << " s, parallel " << curve_par
            << " s, speedup " << curve_serial / curve_par << "x, outputs "
            << (curves_match ? "identical" : "DIFFER") << '\n';

  return identical && counts_match && curves_match ? 0 : 1;
}
