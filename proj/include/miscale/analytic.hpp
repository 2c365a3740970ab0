#pragma once

#include <cstdint>

#include "miscale/sequence.hpp"

namespace miscale {

/// The pair-emitting process: each period independently emits "01" with
/// probability p and "10" otherwise.
struct RepetitiveParams {
  double p = 0.5;
  std::size_t length = 0;  // must be even
};

SymbolSequence gen_repetitive(const RepetitiveParams& params, std::uint64_t seed);

/// Closed-form auto-MI of the repetitive process, one tau-independent value
/// valid for all tau > 1. Symmetric under p -> 1-p; endpoints by continuity.
double mi_repetitive(double p);

/// Nearest-neighbor Ising chain sampled left to right from
/// p(s_t | s_{t-1}) = exp(-beta_j s_{t-1} s_t) / (2 cosh(beta_j s_{t-1})).
/// Sign convention is the Boltzmann weight exp(-beta J s s'), so
/// ferromagnetic alignment corresponds to beta_j < 0. Spins are coded
/// -1 -> 0, +1 -> 1; the first spin is uniform.
struct IsingParams {
  double beta_j = 0.0;
  std::size_t length = 0;
};

SymbolSequence gen_ising(const IsingParams& params, std::uint64_t seed);

/// Exact auto-MI of the Ising chain at lag tau: with c = (-tanh beta_j)^tau,
/// the joint is p(s, s') = (1 + c s s') / 4 and
/// I = ((1+c)/2) ln(1+c) + ((1-c)/2) ln(1-c).
double mi_ising(double beta_j, std::uint64_t tau);

}  // namespace miscale
