#include <cmath>
#include <sstream>

#include "doctest.h"
#include "miscale/common.hpp"
#include "miscale/fit.hpp"
#include "miscale/rng.hpp"

using namespace miscale;

namespace {

MICurve exp_curve(double amplitude, double xi, std::uint64_t tau_max) {
  MICurve c;
  c.estimator_id = "analytic";
  for (std::uint64_t tau = 1; tau <= tau_max; ++tau)
    c.points.push_back({tau, amplitude * std::exp(-static_cast<double>(tau) / xi), 1});
  return c;
}

MICurve pow_curve(double amplitude, double gamma, std::uint64_t tau_max) {
  MICurve c;
  c.estimator_id = "analytic";
  for (std::uint64_t tau = 1; tau <= tau_max; ++tau)
    c.points.push_back({tau, amplitude * std::pow(static_cast<double>(tau), -gamma), 1});
  return c;
}

}  // namespace

TEST_CASE("noiseless exponential curve is recovered exactly") {
  const auto curve = exp_curve(2.0, 50.0, 300);
  const auto fit = fit_exponential(curve, 0.0);
  CHECK(fit.model == FitModel::exponential);
  CHECK(fit.amplitude == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(fit.decay == doctest::Approx(50.0).epsilon(1e-9));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.ci95_decay <= 1e-6);
  CHECK_FALSE(fit.decay_infinite);
  CHECK(fit.points_used == 300);
}

TEST_CASE("noiseless power law is recovered exactly") {
  const auto curve = pow_curve(0.1, 0.4, 1000);
  const auto fit = fit_powerlaw(curve, 0.0);
  CHECK(fit.model == FitModel::powerlaw);
  CHECK(fit.amplitude == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(fit.decay == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("default threshold keeps exactly 69 points of the reference curve") {
  // I(tau) = e^{-tau/10} on tau = 1..100: e^{-6.9} = 1.0061e-3 > 1e-3 >= e^{-7.0},
  // so the 1e-3 filter retains exactly tau <= 69.
  const auto curve = exp_curve(1.0, 10.0, 100);
  const auto fit = fit_exponential(curve, kDefaultFitThreshold);
  CHECK(fit.points_used == 69);
  CHECK(fit.decay == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(fit.amplitude == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("threshold filtering is strict and monotone") {
  const auto curve = exp_curve(1.0, 10.0, 200);
  int prev = fit_exponential(curve, 0.0).points_used;
  CHECK(prev == 200);
  for (double thr : {1e-6, 1e-4, 1e-2}) {
    const int used = fit_exponential(curve, thr).points_used;
    CHECK(used <= prev);
    prev = used;
  }
  // a point exactly at the threshold is excluded
  MICurve flat;
  flat.estimator_id = "analytic";
  for (std::uint64_t tau = 1; tau <= 5; ++tau) flat.points.push_back({tau, 1e-3, 1});
  CHECK_THROWS_AS(fit_exponential(flat, 1e-3), numeric_error);
}

TEST_CASE("decay estimates are scale equivariant") {
  const auto base = exp_curve(1.0, 30.0, 150);
  MICurve scaled = base;
  for (auto& p : scaled.points) p.mi *= 7.0;
  const auto f1 = fit_exponential(base, 0.0);
  const auto f2 = fit_exponential(scaled, 0.0);
  CHECK(f2.decay == doctest::Approx(f1.decay).epsilon(1e-12));
  CHECK(f2.amplitude == doctest::Approx(7.0 * f1.amplitude).epsilon(1e-12));
}

TEST_CASE("95% CIs cover the truth at roughly the nominal rate") {
  RandomStream rng(314159);
  const double true_xi = 40.0, true_amp = 1.0, sigma_log = 0.1;
  int cover_decay = 0;
  const int trials = 200;
  for (int trial = 0; trial < trials; ++trial) {
    MICurve curve;
    curve.estimator_id = "grassberger";
    for (std::uint64_t tau = 1; tau <= 100; ++tau) {
      const double mean = true_amp * std::exp(-static_cast<double>(tau) / true_xi);
      curve.points.push_back({tau, mean * std::exp(sigma_log * rng.gaussian()), 1000});
    }
    const auto fit = fit_exponential(curve, 0.0);
    if (std::abs(fit.decay - true_xi) <= fit.ci95_decay) ++cover_decay;
  }
  // binomial(200, 0.95) has SD ~ 3; demand at least 85%
  CHECK(cover_decay >= 170);
}

TEST_CASE("model comparison separates clean exponentials from power laws") {
  const auto e = compare_models(exp_curve(1.0, 25.0, 200), 1e-6);
  CHECK(e.selected == ModelChoice::exponential);
  const auto p = compare_models(pow_curve(0.5, 0.7, 200), 1e-6);
  CHECK(p.selected == ModelChoice::powerlaw);
  CHECK(to_string(e.selected) == "exponential");
  CHECK(to_string(p.selected) == "powerlaw");
}

TEST_CASE("model comparison is indeterminate when r^2 values are close") {
  // two points after filtering would throw; use a short noisy-ish curve where
  // both models fit almost equally well: a single-decade slow power law
  MICurve curve;
  curve.estimator_id = "analytic";
  for (std::uint64_t tau = 10; tau <= 20; ++tau)
    curve.points.push_back({tau, std::pow(static_cast<double>(tau), -0.1), 1});
  const auto cmp = compare_models(curve, 0.0);
  CHECK(std::abs(cmp.exponential.r_squared - cmp.powerlaw.r_squared) <= 0.05);
  CHECK(cmp.selected == ModelChoice::indeterminate);
}

TEST_CASE("fewer than three usable points is an error") {
  MICurve curve;
  curve.estimator_id = "plugin";
  curve.points.push_back({1, 0.5, 10});
  curve.points.push_back({2, 0.25, 10});
  CHECK_THROWS_AS(fit_exponential(curve, 0.0), numeric_error);
  curve.points.push_back({3, -0.01, 10});  // non-positive, still filtered
  CHECK_THROWS_AS(fit_powerlaw(curve, 0.0), numeric_error);
}

TEST_CASE("non-decaying curves report an infinite correlation length") {
  MICurve curve;
  curve.estimator_id = "analytic";
  for (std::uint64_t tau = 1; tau <= 50; ++tau) curve.points.push_back({tau, 0.3, 1});
  const auto fit = fit_exponential(curve, 0.0);
  CHECK(fit.decay_infinite);
  CHECK(std::isinf(fit.decay));
  const auto s = fit_to_string(fit);
  CHECK(s.find("inf") != std::string::npos);
}

TEST_CASE("fit records serialize as flat key-value text") {
  const auto fit = fit_exponential(exp_curve(2.0, 50.0, 300), 0.0);
  std::stringstream out;
  write_fit(out, fit);
  const auto text = out.str();
  CHECK(text.find("model exponential") != std::string::npos);
  CHECK(text.find("points_used 300") != std::string::npos);
  CHECK(text.find("r_squared") != std::string::npos);
  CHECK(text.find("ci95_decay") != std::string::npos);
  CHECK(fit_to_string(fit) == text);
}
