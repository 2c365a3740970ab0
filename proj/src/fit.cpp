#include "miscale/fit.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "miscale/common.hpp"

namespace miscale {

namespace {

struct Ols {
  double slope = 0.0, intercept = 0.0;
  double se_slope = 0.0, se_intercept = 0.0;
  double r_squared = 1.0;
  int n = 0;
};

Ols ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
  Ols fit;
  fit.n = static_cast<int>(x.size());
  const double n = static_cast<double>(fit.n);
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < fit.n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < fit.n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) throw numeric_error("fit: degenerate abscissa (all lags equal)");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (int i = 0; i < fit.n; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    rss += r * r;
  }
  const double s2 = fit.n > 2 ? rss / (fit.n - 2) : 0.0;
  fit.se_slope = std::sqrt(s2 / sxx);
  fit.se_intercept = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
  fit.r_squared = syy > 0.0 ? std::max(0.0, 1.0 - rss / syy) : 1.0;
  return fit;
}

double t_quantile_975(int df) {
  boost::math::students_t_distribution<double> dist(df);
  return boost::math::quantile(dist, 0.975);
}

FitResult fit_log_ols(const MICurve& curve, double threshold, FitModel model) {
  std::vector<double> x, y;
  for (const auto& p : curve.points) {
    if (!(p.mi > threshold) || !(p.mi > 0.0)) continue;
    x.push_back(model == FitModel::exponential ? static_cast<double>(p.lag)
                                               : std::log(static_cast<double>(p.lag)));
    y.push_back(std::log(p.mi));
  }
  if (x.size() < 3)
    throw numeric_error("fit: fewer than 3 points above threshold (" +
                        std::to_string(x.size()) + " retained)");
  const Ols ols = ols_fit(x, y);
  const double t = t_quantile_975(ols.n - 2);

  FitResult fit;
  fit.model = model;
  fit.points_used = ols.n;
  fit.r_squared = ols.r_squared;
  fit.amplitude = std::exp(ols.intercept);
  fit.ci95_amplitude = fit.amplitude * t * ols.se_intercept;  // delta method
  if (model == FitModel::exponential) {
    if (ols.slope >= 0.0) {
      fit.decay = std::numeric_limits<double>::infinity();
      fit.ci95_decay = std::numeric_limits<double>::infinity();
      fit.decay_infinite = true;
    } else {
      fit.decay = -1.0 / ols.slope;
      fit.ci95_decay = t * ols.se_slope / (ols.slope * ols.slope);
    }
  } else {
    fit.decay = -ols.slope;
    fit.ci95_decay = t * ols.se_slope;
  }
  return fit;
}

}  // namespace

FitResult fit_exponential(const MICurve& curve, double threshold) {
  return fit_log_ols(curve, threshold, FitModel::exponential);
}

FitResult fit_powerlaw(const MICurve& curve, double threshold) {
  for (const auto& p : curve.points)
    if (p.lag < 1) throw numeric_error("fit_powerlaw: lags must be >= 1");
  return fit_log_ols(curve, threshold, FitModel::powerlaw);
}

std::string to_string(ModelChoice c) {
  switch (c) {
    case ModelChoice::exponential: return "exponential";
    case ModelChoice::powerlaw: return "powerlaw";
    default: return "indeterminate";
  }
}

ModelComparison compare_models(const MICurve& curve, double threshold) {
  ModelComparison cmp;
  cmp.exponential = fit_exponential(curve, threshold);
  cmp.powerlaw = fit_powerlaw(curve, threshold);
  const double gap = cmp.exponential.r_squared - cmp.powerlaw.r_squared;
  if (gap > 0.05)
    cmp.selected = ModelChoice::exponential;
  else if (gap < -0.05)
    cmp.selected = ModelChoice::powerlaw;
  else
    cmp.selected = ModelChoice::indeterminate;
  return cmp;
}

void write_fit(std::ostream& out, const FitResult& fit) {
  const auto saved = out.precision(10);
  const bool exp = fit.model == FitModel::exponential;
  out << "model " << (exp ? "exponential" : "powerlaw") << '\n';
  out << (exp ? "I0 " : "A ") << fit.amplitude << '\n';
  out << (exp ? "xi " : "gamma ") << fit.decay << '\n';
  out << "ci95_amplitude " << fit.ci95_amplitude << '\n';
  out << "ci95_decay " << fit.ci95_decay << '\n';
  out << "points_used " << fit.points_used << '\n';
  out << "r_squared " << fit.r_squared << '\n';
  out.precision(saved);
}

std::string fit_to_string(const FitResult& fit) {
  std::ostringstream out;
  write_fit(out, fit);
  return out.str();
}

}  // namespace miscale
