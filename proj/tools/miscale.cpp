// Command-line front end for the MI scaling toolkit: sequence generators,
// auto-MI estimation, decay fits, linear-RNN analysis and dataset audits.

#include <omp.h>

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "miscale/analytic.hpp"
#include "miscale/audit.hpp"
#include "miscale/common.hpp"
#include "miscale/copula.hpp"
#include "miscale/counts.hpp"
#include "miscale/fit.hpp"
#include "miscale/linrnn.hpp"
#include "miscale/mi.hpp"
#include "miscale/sequence.hpp"

using namespace miscale;

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open output file: " + path);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open input file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Lag selection shared by estimate-mi and audit-dataset: an explicit list
// takes precedence over the geometric grid.
struct LagSpec {
  std::vector<std::uint64_t> lags;
  std::uint64_t lag_min = 1;
  std::uint64_t lag_max = 100;
  int points_per_decade = 10;

  std::vector<std::uint64_t> resolve() const {
    if (!lags.empty()) return lags;
    if (lag_min == lag_max) return {lag_min};
    return log_lag_grid(lag_min, lag_max, points_per_decade);
  }
};

void add_lag_options(CLI::App* cmd, LagSpec& spec) {
  cmd->add_option("--lags", spec.lags, "Explicit lag list (overrides the grid)");
  cmd->add_option("--lag-min", spec.lag_min, "Smallest lag of the geometric grid");
  cmd->add_option("--lag-max", spec.lag_max, "Largest lag of the geometric grid");
  cmd->add_option("--points-per-decade", spec.points_per_decade,
                  "Grid density of the geometric lag grid");
}

void report_factor(const CovFactor& factor) {
  if (factor.repaired)
    std::cerr << "note: covariance repaired to PSD (min eigenvalue "
              << factor.min_eigenvalue << ", clipped mass " << factor.clipped_mass
              << ")\n";
  else
    std::cerr << "note: covariance factorized without repair\n";
}

FitResult run_fit(const MICurve& curve, const std::string& model, double threshold) {
  if (model == "exponential") return fit_exponential(curve, threshold);
  if (model == "powerlaw") return fit_powerlaw(curve, threshold);
  throw usage_error("unknown model: " + model);
}

int run(int argc, char** argv) {
  CLI::App app{"Mutual-information scaling toolkit"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker thread cap (0 = library default)");

  // ---- generate-copula ----
  auto* gc = app.add_subcommand("generate-copula",
                                "Binary corpus with power-law MI via a Gaussian copula");
  struct {
    double amplitude = 0.1;
    double power = 0.4;
    std::size_t length = 512;
    std::size_t n_seqs = 10000;
    std::string mode = "approx";
    std::uint64_t seed = 0;
    std::string out;
  } gc_opt;
  gc->add_option("--amplitude,-A", gc_opt.amplitude, "MI amplitude A")->capture_default_str();
  gc->add_option("--power,-g", gc_opt.power, "MI decay power gamma")->capture_default_str();
  gc->add_option("--length,-L", gc_opt.length, "Sequence length")->capture_default_str();
  gc->add_option("--n-seqs,-n", gc_opt.n_seqs, "Number of sequences")->capture_default_str();
  gc->add_option("--mode", gc_opt.mode, "Covariance design: approx or exact")
      ->capture_default_str();
  gc->add_option("--seed", gc_opt.seed, "RNG seed")->required();
  gc->add_option("--out,-o", gc_opt.out, "Output corpus file")->required();

  // ---- generate-repetitive ----
  auto* gr = app.add_subcommand("generate-repetitive",
                                "Pair process with constant auto-MI");
  struct {
    double p = 0.5;
    std::size_t length = 0;
    std::uint64_t seed = 0;
    std::string out;
  } gr_opt;
  gr->add_option("--p", gr_opt.p, "Probability of emitting 01 per period")->required();
  gr->add_option("--length,-L", gr_opt.length, "Sequence length (even)")->required();
  gr->add_option("--seed", gr_opt.seed, "RNG seed")->required();
  gr->add_option("--out,-o", gr_opt.out, "Output corpus file")->required();

  // ---- generate-ising ----
  auto* gi = app.add_subcommand("generate-ising",
                                "Nearest-neighbor Ising chain (exponential MI decay)");
  struct {
    double beta_j = 0.0;
    std::size_t length = 0;
    std::uint64_t seed = 0;
    std::string out;
  } gi_opt;
  gi->add_option("--beta-j", gi_opt.beta_j, "Coupling beta*J (negative = ferromagnetic)")
      ->required();
  gi->add_option("--length,-L", gi_opt.length, "Chain length")->required();
  gi->add_option("--seed", gi_opt.seed, "RNG seed")->required();
  gi->add_option("--out,-o", gi_opt.out, "Output corpus file")->required();

  // ---- estimate-mi ----
  auto* em = app.add_subcommand("estimate-mi", "Auto-MI curve of a corpus");
  struct {
    std::string in;
    std::string out;
    std::string estimator = "grassberger";
    LagSpec lags;
  } em_opt;
  em->add_option("--in,-i", em_opt.in, "Input corpus file")->required();
  em->add_option("--out,-o", em_opt.out, "Output MI curve CSV")->required();
  em->add_option("--estimator", em_opt.estimator, "grassberger or plugin")
      ->capture_default_str();
  add_lag_options(em, em_opt.lags);

  // ---- fit ----
  auto* ft = app.add_subcommand("fit", "Fit a decay model to an MI curve CSV");
  struct {
    std::string in;
    std::string out;
    std::string model = "exponential";
    double threshold = kDefaultFitThreshold;
  } ft_opt;
  ft->add_option("--in,-i", ft_opt.in, "Input MI curve CSV")->required();
  ft->add_option("--out,-o", ft_opt.out, "Output file (default stdout)");
  ft->add_option("--model", ft_opt.model, "exponential, powerlaw or compare")
      ->capture_default_str();
  ft->add_option("--threshold", ft_opt.threshold, "MI threshold filter")
      ->capture_default_str();

  // ---- benchmark-estimator ----
  auto* be = app.add_subcommand(
      "benchmark-estimator",
      "End-to-end copula benchmark: generate, estimate, fit gamma-hat per gamma");
  struct {
    std::vector<double> gammas;
    double amplitude = 0.1;
    std::size_t n_seqs = 10000;
    std::size_t length = 1000;
    std::string mode = "exact";
    std::string estimator = "grassberger";
    std::uint64_t seed = 0;
    std::uint64_t lag_min = 2;
    std::uint64_t lag_max = 128;
    int points_per_decade = 8;
    int blocks = 8;
    std::string out;
  } be_opt;
  be->add_option("--gamma", be_opt.gammas, "Ground-truth gamma values")->required();
  be->add_option("--amplitude,-A", be_opt.amplitude, "MI amplitude A")->capture_default_str();
  be->add_option("--n-seqs,-n", be_opt.n_seqs, "Sequences per gamma")->capture_default_str();
  be->add_option("--length,-L", be_opt.length, "Sequence length")->capture_default_str();
  be->add_option("--mode", be_opt.mode, "Covariance design: approx or exact")
      ->capture_default_str();
  be->add_option("--estimator", be_opt.estimator, "grassberger or plugin")
      ->capture_default_str();
  be->add_option("--seed", be_opt.seed, "RNG seed")->required();
  be->add_option("--lag-min", be_opt.lag_min, "Smallest fitted lag")->capture_default_str();
  be->add_option("--lag-max", be_opt.lag_max, "Largest fitted lag")->capture_default_str();
  be->add_option("--points-per-decade", be_opt.points_per_decade, "Lag grid density")
      ->capture_default_str();
  be->add_option("--blocks", be_opt.blocks,
                 "Independent sequence blocks used for the CI")
      ->capture_default_str();
  be->add_option("--out,-o", be_opt.out, "Output table (default stdout)");

  // ---- linrnn-analyze ----
  auto* la = app.add_subcommand("linrnn-analyze",
                                "Analytic MI curve, poles and stability of a linear RNN");
  struct {
    std::string params;
    std::string out_curve;
    std::string out;
    int t_max = 200;
  } la_opt;
  la->add_option("--params,-p", la_opt.params, "RNN parameter file")->required();
  la->add_option("--t-max,-T", la_opt.t_max, "Largest time separation")
      ->capture_default_str();
  la->add_option("--out-curve", la_opt.out_curve, "Analytic MI curve CSV");
  la->add_option("--out,-o", la_opt.out, "Report file (default stdout)");

  // ---- linrnn-sample ----
  auto* ls = app.add_subcommand("linrnn-sample", "Monte Carlo runs of a linear RNN");
  struct {
    std::string params;
    std::string out;
    std::size_t n_runs = 0;
    int t_max = 0;
    std::uint64_t seed = 0;
  } ls_opt;
  ls->add_option("--params,-p", ls_opt.params, "RNN parameter file")->required();
  ls->add_option("--n-runs,-n", ls_opt.n_runs, "Number of runs")->required();
  ls->add_option("--t-max,-T", ls_opt.t_max, "Steps per run")->required();
  ls->add_option("--seed", ls_opt.seed, "RNG seed")->required();
  ls->add_option("--out,-o", ls_opt.out, "Output CSV (run,t,x_0..x_{d-1})")->required();

  // ---- audit-dataset ----
  auto* ad = app.add_subcommand("audit-dataset",
                                "Train/validation MI non-uniformity audit of text files");
  struct {
    std::string train;
    std::vector<std::string> others;
    std::string unit = "char";
    std::string estimator = "grassberger";
    std::string out;
    std::string out_curves;
    LagSpec lags{{}, 1, 1000, 10};
  } ad_opt;
  ad->add_option("--train", ad_opt.train, "Training split text file")->required();
  ad->add_option("--split", ad_opt.others, "Comparison split as label=path (repeatable)")
      ->required();
  ad->add_option("--unit", ad_opt.unit, "Text unit: char or byte")->capture_default_str();
  ad->add_option("--estimator", ad_opt.estimator, "grassberger or plugin")
      ->capture_default_str();
  ad->add_option("--out,-o", ad_opt.out, "Report file (default stdout)");
  ad->add_option("--out-curves", ad_opt.out_curves, "Prefix for per-split MI curve CSVs");
  add_lag_options(ad, ad_opt.lags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (threads > 0) omp_set_num_threads(threads);

  if (gc->parsed()) {
    const auto cov = build_covariance(gc_opt.amplitude, gc_opt.power, gc_opt.length,
                                      cov_mode_from_string(gc_opt.mode));
    const auto factor = factor_covariance(cov);
    report_factor(factor);
    write_corpus(gc_opt.out, sample_binary(factor, gc_opt.n_seqs, gc_opt.seed));
  } else if (gr->parsed()) {
    Corpus corpus;
    corpus.sequences.push_back(gen_repetitive({gr_opt.p, gr_opt.length}, gr_opt.seed));
    corpus.vocab_size = 2;
    write_corpus(gr_opt.out, corpus);
  } else if (gi->parsed()) {
    Corpus corpus;
    corpus.sequences.push_back(gen_ising({gi_opt.beta_j, gi_opt.length}, gi_opt.seed));
    corpus.vocab_size = 2;
    write_corpus(gi_opt.out, corpus);
  } else if (em->parsed()) {
    const auto corpus = read_corpus(em_opt.in);
    const auto curve = auto_mi_curve(corpus, em_opt.lags.resolve(),
                                     estimator_from_string(em_opt.estimator));
    write_mi_csv(em_opt.out, curve);
  } else if (ft->parsed()) {
    const auto curve = read_mi_csv(ft_opt.in);
    std::ostringstream text;
    if (ft_opt.model == "compare") {
      const auto cmp = compare_models(curve, ft_opt.threshold);
      text << "selected " << to_string(cmp.selected) << '\n';
      write_fit(text, cmp.exponential);
      write_fit(text, cmp.powerlaw);
    } else {
      write_fit(text, run_fit(curve, ft_opt.model, ft_opt.threshold));
    }
    if (ft_opt.out.empty())
      std::cout << text.str();
    else
      open_out(ft_opt.out) << text.str();
  } else if (be->parsed()) {
    if (be_opt.gammas.empty()) throw usage_error("benchmark-estimator: empty gamma list");
    for (double gamma : be_opt.gammas)
      if (!(gamma > 0.0 && gamma < 2.0))
        throw usage_error("benchmark-estimator: gamma must lie in (0, 2)");
    std::ostringstream table;
    table.precision(10);
    table << "gamma,gamma_hat,ci95,covered\n";
    const auto lags =
        log_lag_grid(be_opt.lag_min, be_opt.lag_max, be_opt.points_per_decade);
    for (std::size_t i = 0; i < be_opt.gammas.size(); ++i) {
      const double gamma = be_opt.gammas[i];
      const auto cov = build_covariance(be_opt.amplitude, gamma, be_opt.length,
                                        cov_mode_from_string(be_opt.mode));
      const auto factor = factor_covariance(cov);
      report_factor(factor);
      // one seed offset per gamma keeps the runs independent
      const auto corpus =
          sample_binary(factor, be_opt.n_seqs, be_opt.seed + 1000003 * i);
      // MI estimates at different lags of one corpus are strongly correlated,
      // which makes the single-fit OLS interval too narrow. The CI therefore
      // comes from gamma-hat fitted on independent sequence blocks.
      const int blocks = be_opt.blocks;
      if (blocks < 2 || static_cast<std::size_t>(blocks) > be_opt.n_seqs)
        throw usage_error("benchmark-estimator: blocks must lie in [2, n_seqs]");
      const auto est = estimator_from_string(be_opt.estimator);
      std::vector<double> block_gammas;
      for (int b = 0; b < blocks; ++b) {
        Corpus block;
        block.vocab_size = corpus.vocab_size;
        const std::size_t lo = be_opt.n_seqs * b / blocks;
        const std::size_t hi = be_opt.n_seqs * (b + 1) / blocks;
        block.sequences.assign(corpus.sequences.begin() + lo,
                               corpus.sequences.begin() + hi);
        block_gammas.push_back(fit_powerlaw(auto_mi_curve(block, lags, est), 0.0).decay);
      }
      double mean = 0.0;
      for (double g : block_gammas) mean += g;
      mean /= blocks;
      double var = 0.0;
      for (double g : block_gammas) var += (g - mean) * (g - mean);
      var /= blocks - 1;
      const boost::math::students_t dist(blocks - 1);
      const double ci95 =
          boost::math::quantile(dist, 0.975) * std::sqrt(var / blocks);
      const bool covered = std::abs(mean - gamma) <= ci95;
      table << gamma << ',' << mean << ',' << ci95 << ',' << (covered ? "yes" : "no")
            << '\n';
    }
    if (be_opt.out.empty())
      std::cout << table.str();
    else
      open_out(be_opt.out) << table.str();
  } else if (la->parsed()) {
    const auto params = read_rnn_params(la_opt.params);
    const auto poles = find_poles(params);
    const auto stability = classify_stability(poles);
    std::ostringstream report;
    report.precision(10);
    report << "class " << to_string(stability) << '\n';
    report << "has_poles " << (poles.has_poles ? "true" : "false") << '\n';
    if (poles.has_poles) {
      report << "z_min " << poles.z_min.real() << ' ' << poles.z_min.imag() << '\n';
      report << "z_min_modulus " << std::abs(poles.z_min) << '\n';
      report << "predicted_rate " << poles.predicted_rate << '\n';
      report << "predicted_mi_rate " << 2.0 * poles.predicted_rate << '\n';
      for (const auto& pole : poles.poles)
        report << "pole " << pole.z.real() << ' ' << pole.z.imag() << " multiplicity "
               << pole.multiplicity << '\n';
    } else {
      report << "predicted_rate inf\n";
    }
    if (!la_opt.out_curve.empty()) {
      const auto curve = mi_curve_linear_rnn(params, la_opt.t_max);
      report << "memorizing " << (curve.memorizing ? "true" : "false") << '\n';
      write_mi_csv(la_opt.out_curve, curve.curve);
    }
    if (la_opt.out.empty())
      std::cout << report.str();
    else
      open_out(la_opt.out) << report.str();
  } else if (ls->parsed()) {
    const auto params = read_rnn_params(ls_opt.params);
    const auto runs = sample_linear_rnn(params, ls_opt.n_runs, ls_opt.t_max, ls_opt.seed);
    auto out = open_out(ls_opt.out);
    out.precision(10);
    out << "run,t";
    for (int j = 0; j < params.d(); ++j) out << ",x" << j;
    out << '\n';
    for (std::size_t r = 0; r < runs.size(); ++r)
      for (int t = 0; t <= ls_opt.t_max; ++t) {
        out << r << ',' << t;
        for (int j = 0; j < params.d(); ++j) out << ',' << runs[r](j, t);
        out << '\n';
      }
  } else if (ad->parsed()) {
    VocabMap vocab;
    const auto unit = text_unit_from_string(ad_opt.unit);
    auto train = ingest_text(read_file(ad_opt.train), unit, vocab);
    std::vector<std::pair<std::string, SymbolSequence>> others;
    for (const auto& split : ad_opt.others) {
      const auto eq = split.find('=');
      if (eq == std::string::npos || eq == 0)
        throw usage_error("--split expects label=path, got: " + split);
      others.emplace_back(split.substr(0, eq),
                          ingest_text(read_file(split.substr(eq + 1)), unit, vocab));
    }
    // all splits share the union vocabulary
    train.vocab_size = vocab.size();
    for (auto& [label, seq] : others) seq.vocab_size = vocab.size();
    const auto report = audit(train, others, ad_opt.lags.resolve(),
                              estimator_from_string(ad_opt.estimator));
    std::ostringstream text;
    text.precision(10);
    write_audit_report(text, report);
    if (ad_opt.out.empty())
      std::cout << text.str();
    else
      open_out(ad_opt.out) << text.str();
    if (!ad_opt.out_curves.empty())
      for (const auto& split : report.splits)
        write_mi_csv(ad_opt.out_curves + split.label + ".csv", split.curve);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const usage_error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const io_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 3;
  } catch (const numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
