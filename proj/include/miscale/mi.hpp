#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "miscale/counts.hpp"
#include "miscale/sequence.hpp"

namespace miscale {

enum class Estimator { grassberger, plugin };

Estimator estimator_from_string(const std::string& name);
std::string to_string(Estimator e);

/// Digamma function at a positive integer, accurate to ~1e-15 relative.
/// Small arguments are lifted to n >= 20 by the recurrence psi(x+1) =
/// psi(x) + 1/x, then the Bernoulli asymptotic series is applied. Values for
/// small n are memoized.
double digamma_int(std::uint64_t n);

/// Bias-corrected entropy estimate H = ln N - (1/N) sum n_i psi(n_i), in
/// nats. Reported raw: may be negative or exceed ln V.
double entropy_grassberger(const CountTable& counts);

/// Maximum-likelihood (plug-in) entropy -sum (n_i/N) ln(n_i/N), in nats.
double entropy_plugin(const CountTable& counts);

/// MI estimate over a pair table: H(X) + H(Y) - H(X,Y), marginals derived by
/// summation over the packed pair keys.
double mi_from_pair_counts(const CountTable& joint, Estimator estimator);

/// Delta-method standard error of the plug-in MI of a pair table, plus a
/// chi-square noise-floor term that dominates near independence. Used by
/// statistical checks, not by the estimators themselves.
double mi_standard_error(const CountTable& joint);

struct MIPoint {
  std::uint64_t lag = 0;
  double mi = 0.0;
  std::uint64_t pairs = 0;
};

struct MICurve {
  std::vector<MIPoint> points;
  std::string estimator_id;  // "grassberger", "plugin", or "analytic"
};

/// Auto-MI curve of a corpus: for each lag, pools (x_t, x_{t+lag}) pairs
/// across all positions and sequences, then estimates MI. Lags are sorted and
/// deduplicated; lags with zero pairs are omitted. Deterministic for any
/// thread count.
MICurve auto_mi_curve(const Corpus& corpus, std::vector<std::uint64_t> lags,
                      Estimator estimator, bool parallel = true);

// MICurve CSV: header "tau,mi_nats,pairs,estimator", 10 significant digits.
void write_mi_csv(std::ostream& out, const MICurve& curve);
void write_mi_csv(const std::string& path, const MICurve& curve);
MICurve read_mi_csv(std::istream& in);
MICurve read_mi_csv(const std::string& path);

}  // namespace miscale
