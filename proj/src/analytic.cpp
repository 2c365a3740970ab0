#include "miscale/analytic.hpp"

#include <cmath>
#include <numbers>

#include "miscale/common.hpp"
#include "miscale/rng.hpp"

namespace miscale {

SymbolSequence gen_repetitive(const RepetitiveParams& params, std::uint64_t seed) {
  if (!(params.p >= 0.0 && params.p <= 1.0))
    throw numeric_error("gen_repetitive: p must lie in [0, 1]");
  if (params.length == 0 || params.length % 2 != 0)
    throw numeric_error("gen_repetitive: length must be even and positive");
  RandomStream rng(seed);
  SymbolSequence seq;
  seq.vocab_size = 2;
  seq.symbols.resize(params.length);
  for (std::size_t n = 0; n < params.length / 2; ++n) {
    const bool zero_one = rng.bernoulli(params.p);
    seq.symbols[2 * n] = zero_one ? 0u : 1u;
    seq.symbols[2 * n + 1] = zero_one ? 1u : 0u;
  }
  return seq;
}

namespace {

// (1+c)/2 * ln(1+c) + (1-c)/2 * ln(1-c), the MI of the symmetric binary joint
// p(s,s') = (1 + c s s')/4. Continuous at |c| = 1 with value ln 2.
double symmetric_pair_mi(double c) {
  const double a = std::abs(c);
  if (a >= 1.0) return std::numbers::ln2;
  if (a == 0.0) return 0.0;
  return 0.5 * ((1.0 + a) * std::log1p(a) + (1.0 - a) * std::log1p(-a));
}

}  // namespace

double mi_repetitive(double p) {
  if (p <= 0.0 || p >= 1.0) return std::numbers::ln2;  // continuity limit
  // Joint cells at any tau > 1: p(0,0) = p(1,1) = (p^2 + (1-p)^2)/2,
  // p(0,1) = p(1,0) = p(1-p). Equivalent to the symmetric pair with
  // c = (1-2p)^2.
  const double q = 1.0 - 2.0 * p;
  return symmetric_pair_mi(q * q);
}

SymbolSequence gen_ising(const IsingParams& params, std::uint64_t seed) {
  if (params.length == 0) throw numeric_error("gen_ising: length must be >= 1");
  if (!std::isfinite(params.beta_j)) throw numeric_error("gen_ising: beta_j must be finite");
  RandomStream rng(seed);
  SymbolSequence seq;
  seq.vocab_size = 2;
  seq.symbols.resize(params.length);
  int spin = rng.bernoulli(0.5) ? 1 : -1;
  seq.symbols[0] = spin > 0 ? 1u : 0u;
  for (std::size_t t = 1; t < params.length; ++t) {
    // p(s_t = +1 | s_{t-1}) = exp(-bJ s_{t-1}) / (2 cosh(bJ s_{t-1}))
    const double w = -params.beta_j * spin;
    const double p_up = 1.0 / (1.0 + std::exp(-2.0 * w));
    spin = rng.bernoulli(p_up) ? 1 : -1;
    seq.symbols[t] = spin > 0 ? 1u : 0u;
  }
  return seq;
}

double mi_ising(double beta_j, std::uint64_t tau) {
  if (!std::isfinite(beta_j)) throw numeric_error("mi_ising: beta_j must be finite");
  if (tau == 0) throw numeric_error("mi_ising: tau must be positive");
  const double c = std::pow(-std::tanh(beta_j), static_cast<double>(tau));
  return symmetric_pair_mi(c);
}

}  // namespace miscale
