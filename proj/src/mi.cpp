#include "miscale/mi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "miscale/common.hpp"

namespace miscale {

Estimator estimator_from_string(const std::string& name) {
  if (name == "grassberger") return Estimator::grassberger;
  if (name == "plugin") return Estimator::plugin;
  throw usage_error("unknown estimator: " + name);
}

std::string to_string(Estimator e) {
  return e == Estimator::grassberger ? "grassberger" : "plugin";
}

namespace {

double digamma_asymptotic(double x) {
  // Bernoulli series, valid to ~1e-16 for x >= 20.
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double tail = inv2 * (1.0 / 12.0 -
                inv2 * (1.0 / 120.0 -
                inv2 * (1.0 / 252.0 -
                inv2 * (1.0 / 240.0 -
                inv2 * (1.0 / 132.0)))));
  return std::log(x) - 0.5 * inv - tail;
}

double digamma_compute(std::uint64_t n) {
  double acc = 0.0;
  double x = static_cast<double>(n);
  while (x < 20.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  return digamma_asymptotic(x) + acc;
}

}  // namespace

double digamma_int(std::uint64_t n) {
  if (n == 0) throw numeric_error("digamma_int: argument must be >= 1");
  static const std::vector<double> memo = [] {
    std::vector<double> t(4097);
    for (std::uint64_t i = 1; i < t.size(); ++i) t[i] = digamma_compute(i);
    return t;
  }();
  if (n < memo.size()) return memo[n];
  return digamma_asymptotic(static_cast<double>(n));
}

double entropy_grassberger(const CountTable& counts) {
  if (counts.empty()) throw numeric_error("entropy_grassberger: empty count table");
  const double n_total = static_cast<double>(counts.total);
  double acc = 0.0;
  for (const auto& [key, n] : counts.counts)
    acc += static_cast<double>(n) * digamma_int(n);
  return std::log(n_total) - acc / n_total;
}

double entropy_plugin(const CountTable& counts) {
  if (counts.empty()) throw numeric_error("entropy_plugin: empty count table");
  const double n_total = static_cast<double>(counts.total);
  double acc = 0.0;
  for (const auto& [key, n] : counts.counts) {
    const double p = static_cast<double>(n) / n_total;
    acc -= p * std::log(p);
  }
  return acc;
}

namespace {

// Marginal tables of a packed-pair joint table.
std::pair<CountTable, CountTable> marginals(const CountTable& joint) {
  CountTable mx, my;
  for (const auto& [key, n] : joint.counts) {
    mx.add(pair_first(key), n);
    my.add(pair_second(key), n);
  }
  return {mx, my};
}

}  // namespace

double mi_from_pair_counts(const CountTable& joint, Estimator estimator) {
  if (joint.empty()) throw numeric_error("mi_from_pair_counts: empty joint table");
  const auto [mx, my] = marginals(joint);
  const auto entropy =
      estimator == Estimator::grassberger ? entropy_grassberger : entropy_plugin;
  return entropy(mx) + entropy(my) - entropy(joint);
}

double mi_standard_error(const CountTable& joint) {
  if (joint.empty()) throw numeric_error("mi_standard_error: empty joint table");
  const auto [mx, my] = marginals(joint);
  const double n_total = static_cast<double>(joint.total);
  double mean_g = 0.0, mean_g2 = 0.0;
  for (const auto& [key, n] : joint.counts) {
    const double p = static_cast<double>(n) / n_total;
    const double px = static_cast<double>(mx.counts.at(pair_first(key))) / n_total;
    const double py = static_cast<double>(my.counts.at(pair_second(key))) / n_total;
    const double g = std::log(p / (px * py));
    mean_g += p * g;
    mean_g2 += p * g * g;
  }
  const double delta_var = std::max(0.0, mean_g2 - mean_g * mean_g);
  const double df = static_cast<double>((mx.distinct() - 1) * (my.distinct() - 1));
  // Near independence the delta-method variance vanishes; the chi-square
  // limit 2N*I ~ chi2_df sets the residual scale.
  return std::sqrt(delta_var / n_total + 0.5 * df / (n_total * n_total));
}

MICurve auto_mi_curve(const Corpus& corpus, std::vector<std::uint64_t> lags,
                      Estimator estimator, bool parallel) {
  corpus.validate();
  if (lags.empty()) throw numeric_error("auto_mi_curve: empty lag list");
  std::sort(lags.begin(), lags.end());
  lags.erase(std::unique(lags.begin(), lags.end()), lags.end());
  const std::size_t max_len = corpus.max_length();
  for (std::uint64_t lag : lags) {
    if (lag == 0) throw numeric_error("auto_mi_curve: lags must be positive");
    if (lag >= max_len)
      throw numeric_error("auto_mi_curve: lag " + std::to_string(lag) +
                          " >= max sequence length " + std::to_string(max_len));
  }
  MICurve curve;
  curve.estimator_id = to_string(estimator);
  for (std::uint64_t lag : lags) {
    const auto dense = parallel ? pair_counts_at_lag(corpus, lag)
                                : pair_counts_at_lag_serial(corpus, lag);
    const CountTable joint = pair_table_from_dense(dense, corpus.vocab_size);
    if (joint.total == 0) continue;
    curve.points.push_back({lag, mi_from_pair_counts(joint, estimator), joint.total});
  }
  return curve;
}

void write_mi_csv(std::ostream& out, const MICurve& curve) {
  out << "tau,mi_nats,pairs,estimator\n";
  char buf[64];
  for (const auto& p : curve.points) {
    std::snprintf(buf, sizeof(buf), "%.10g", p.mi);
    out << p.lag << ',' << buf << ',' << p.pairs << ',' << curve.estimator_id << '\n';
  }
}

void write_mi_csv(const std::string& path, const MICurve& curve) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write MI curve: " + path);
  write_mi_csv(out, curve);
  if (!out) throw io_error("write failed: " + path);
}

MICurve read_mi_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw io_error("MI curve CSV: empty input");
  // tolerate trailing \r from foreign files
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "tau,mi_nats,pairs,estimator")
    throw io_error("MI curve CSV: bad header '" + line + "'");
  MICurve curve;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string tau_s, mi_s, pairs_s, est_s;
    if (!std::getline(row, tau_s, ',') || !std::getline(row, mi_s, ',') ||
        !std::getline(row, pairs_s, ',') || !std::getline(row, est_s))
      throw io_error("MI curve CSV: malformed line " + std::to_string(lineno));
    MIPoint p;
    try {
      p.lag = std::stoull(tau_s);
      p.mi = std::stod(mi_s);
      p.pairs = std::stoull(pairs_s);
    } catch (const std::exception&) {
      throw io_error("MI curve CSV: bad number on line " + std::to_string(lineno));
    }
    if (curve.estimator_id.empty()) curve.estimator_id = est_s;
    curve.points.push_back(p);
  }
  return curve;
}

MICurve read_mi_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open MI curve: " + path);
  return read_mi_csv(in);
}

}  // namespace miscale
