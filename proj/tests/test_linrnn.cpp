#include <cmath>
#include <complex>
#include <sstream>

#include "doctest.h"
#include "miscale/common.hpp"
#include "miscale/fit.hpp"
#include "miscale/linrnn.hpp"
#include "miscale/rng.hpp"

using namespace miscale;

namespace {

LinearRnnParams scalar_example() {
  // m = d = 1, U_h = 0.5, W_h = 1, U_o = 0.2, sigma = 1, h_0 deterministic,
  // Var(x_0) = 1. Feedback polynomial 1 - 0.5 z - 0.1 z^2 with roots
  // 1.5311289 and -6.5311289.
  LinearRnnParams p;
  p.u_h = Eigen::MatrixXd::Constant(1, 1, 0.5);
  p.w_h = Eigen::MatrixXd::Constant(1, 1, 1.0);
  p.u_o = Eigen::MatrixXd::Constant(1, 1, 0.2);
  p.sigma2 = 1.0;
  p.sigma0 = Eigen::MatrixXd::Zero(2, 2);
  p.sigma0(1, 1) = 1.0;
  p.mean_h0 = Eigen::VectorXd::Zero(1);
  p.mean_x0 = Eigen::VectorXd::Zero(1);
  return p;
}

const double kScalarZMin = (-0.5 + std::sqrt(0.65)) / 0.2;  // quadratic formula

LinearRnnParams random_instance(RandomStream& rng) {
  const int m = 1 + static_cast<int>(rng.bits() % 5);
  const int d = 1 + static_cast<int>(rng.bits() % 3);
  LinearRnnParams p;
  const auto fill = [&rng](Eigen::MatrixXd& mat) {
    for (int i = 0; i < mat.rows(); ++i)
      for (int j = 0; j < mat.cols(); ++j) mat(i, j) = 0.3 * rng.gaussian();
  };
  p.u_h.resize(m, m);
  p.w_h.resize(m, d);
  p.u_o.resize(d, m);
  fill(p.u_h);
  fill(p.w_h);
  fill(p.u_o);
  p.sigma2 = 0.5 + rng.uniform01();
  Eigen::MatrixXd g(m + d, m + d);
  fill(g);
  p.sigma0 = g * g.transpose() + 0.2 * Eigen::MatrixXd::Identity(m + d, m + d);
  p.mean_h0 = Eigen::VectorXd::Zero(m);
  p.mean_x0 = Eigen::VectorXd::Zero(d);
  return p;
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

}  // namespace

TEST_CASE("zero output weights give pure-noise outputs") {
  auto p = scalar_example();
  p.u_o.setZero();
  const auto states = propagate(p, 10);
  for (int t = 1; t <= 10; ++t) {
    CHECK(states[t].x_x0(1, 1).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK(states[t].xx(1, 1)(0, 0) == doctest::Approx(p.sigma2).epsilon(1e-12));
  }
}

TEST_CASE("no feedback path means independent outputs") {
  auto p = scalar_example();
  p.w_h.setZero();  // and Sigma_h0x0 is already zero
  const auto states = propagate(p, 10);
  for (int t = 1; t <= 10; ++t)
    CHECK(states[t].x_x0(1, 1).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("scalar propagate matches the direct recurrence oracle to 1e-12") {
  const auto p = scalar_example();
  const auto states = propagate(p, 200);
  const auto oracle = sigma_recurrence_oracle(p, 200);
  for (int t = 0; t <= 200; ++t)
    CHECK(std::abs(states[t].x_x0(1, 1)(0, 0) - oracle[t](0, 0)) <= 1e-12);
}

TEST_CASE("oracle closed forms at t = 1 and t = 2") {
  RandomStream rng(101);
  auto p = random_instance(rng);
  const int m = p.m(), d = p.d();
  const Eigen::MatrixXd s_h0x0 = p.sigma0.topRightCorner(m, d);
  const Eigen::MatrixXd s_x0x0 = p.sigma0.bottomRightCorner(d, d);
  const auto oracle = sigma_recurrence_oracle(p, 2);
  const Eigen::MatrixXd t1 = p.u_o * p.u_h * s_h0x0;
  const Eigen::MatrixXd t2 = p.u_o * p.u_h * p.u_h * s_h0x0 + p.u_o * p.u_h * p.w_h * s_x0x0;
  CHECK((oracle[1] - t1).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((oracle[2] - t2).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("propagate agrees with the oracle on 100 random instances") {
  RandomStream rng(2025);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_instance(rng);
    const int m = p.m(), d = p.d();
    const int t_max = 100;
    const auto states = propagate(p, t_max);
    const auto oracle = sigma_recurrence_oracle(p, t_max);
    for (int t = 0; t <= t_max; ++t) {
      const Eigen::MatrixXd diff = states[t].x_x0(m, d) - oracle[t];
      CHECK(diff.norm() <= 1e-10 * (1.0 + oracle[t].norm()));
      // symmetry and PSD of the full state covariance
      const Eigen::MatrixXd& cov = states[t].state_cov;
      CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + cov.norm()));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
      CHECK(es.eigenvalues().minCoeff() >= -1e-9 * (1.0 + cov.norm()));
      if (t >= 1) {
        // noise floor: min eigenvalue of the x block is at least sigma2
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(states[t].xx(m, d));
        CHECK(ex.eigenvalues().minCoeff() >= p.sigma2 - 1e-9);
      }
    }
  }
}

TEST_CASE("mi_gaussian") {
  const Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  CHECK(mi_gaussian(one, one, Eigen::MatrixXd::Zero(1, 1)) == 0.0);
  CHECK(mi_gaussian(one, one, Eigen::MatrixXd::Constant(1, 1, 0.5)) ==
        doctest::Approx(-0.5 * std::log(0.75)).epsilon(1e-14));
  CHECK(-0.5 * std::log(0.75) == doctest::Approx(0.1438410).epsilon(1e-6));
  CHECK(std::isinf(mi_gaussian(one, one, Eigen::MatrixXd::Constant(1, 1, 1.0 - 1e-18))));
  CHECK_THROWS_AS(mi_gaussian(Eigen::MatrixXd::Zero(1, 1), one, one), numeric_error);
  // accurate for tiny cross-covariance (log1p path): I ~ rho^2 / 2
  const double rho = 1e-30;
  CHECK(mi_gaussian(one, one, Eigen::MatrixXd::Constant(1, 1, rho)) ==
        doctest::Approx(0.5 * rho * rho).epsilon(1e-10));
}

TEST_CASE("analytic MI curve of the scalar example decays at the pole rate") {
  const auto p = scalar_example();
  const auto rnn_curve = mi_curve_linear_rnn(p, 200);
  CHECK_FALSE(rnn_curve.memorizing);
  MICurve window;
  window.estimator_id = rnn_curve.curve.estimator_id;
  for (const auto& pt : rnn_curve.curve.points)
    if (pt.lag >= 20) window.points.push_back(pt);
  const auto fit = fit_exponential(window, 0.0);
  const double rate = 2.0 * std::log(kScalarZMin);
  CHECK(rate == doctest::Approx(0.85200).epsilon(1e-4));
  CHECK(1.0 / fit.decay == doctest::Approx(rate).epsilon(0.01));
  CHECK(fit.r_squared >= 0.999);
  // trivial endpoints
  auto q = p;
  q.u_o.setZero();
  const auto zero_curve = mi_curve_linear_rnn(q, 10);
  for (const auto& pt : zero_curve.curve.points) CHECK(pt.mi == doctest::Approx(0.0));
}

TEST_CASE("poles of the scalar example") {
  const auto report = find_poles(scalar_example());
  REQUIRE(report.has_poles);
  CHECK(std::abs(report.z_min) == doctest::Approx(kScalarZMin).epsilon(1e-9));
  CHECK(std::abs(report.z_min) == doctest::Approx(1.531129).epsilon(1e-6));
  bool found_far = false;
  for (const auto& pole : report.poles)
    if (std::abs(pole.z - std::complex<double>(-6.5311288741, 0.0)) < 1e-6) found_far = true;
  CHECK(found_far);
  CHECK(classify_stability(report) == Stability::decaying);
}

TEST_CASE("with W_h = 0 the poles are reciprocal eigenvalues of U_h") {
  RandomStream rng(7);
  LinearRnnParams p;
  const int m = 3, d = 2;
  p.u_h.resize(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) p.u_h(i, j) = 0.3 * rng.gaussian();
  p.w_h = Eigen::MatrixXd::Zero(m, d);
  p.u_o = Eigen::MatrixXd::Ones(d, m);
  p.sigma2 = 1.0;
  p.sigma0 = Eigen::MatrixXd::Identity(m + d, m + d);
  p.mean_h0 = Eigen::VectorXd::Zero(m);
  p.mean_x0 = Eigen::VectorXd::Zero(d);
  const auto report = find_poles(p);
  REQUIRE(report.has_poles);
  Eigen::EigenSolver<Eigen::MatrixXd> es(p.u_h);
  for (const auto& lambda : es.eigenvalues()) {
    if (std::abs(lambda) < 1e-12) continue;
    bool found = false;
    for (const auto& pole : report.poles)
      if (std::abs(pole.z - 1.0 / lambda) < 1e-6 * (1.0 + std::abs(pole.z))) found = true;
    CHECK(found);
  }
}

TEST_CASE("memorizing instances are flagged") {
  auto p = scalar_example();
  p.u_h(0, 0) = 2.0;
  p.w_h(0, 0) = 1.0;
  p.u_o(0, 0) = 1.0;
  // roots of 1 - 2z - 2z^2: z_min = (sqrt(3) - 1)/2 = 0.366 inside the disk
  const auto report = find_poles(p);
  REQUIRE(report.has_poles);
  CHECK(std::abs(report.z_min) == doctest::Approx((std::sqrt(3.0) - 1.0) / 2.0).epsilon(1e-9));
  CHECK(classify_stability(report) == Stability::memorizing);
  CHECK(mi_curve_linear_rnn(p, 10).memorizing);

  auto q = scalar_example();
  q.u_h(0, 0) = 1.5;
  CHECK(classify_stability(q) == Stability::memorizing);
}

TEST_CASE("instant forgetting classifies as decaying") {
  auto p = scalar_example();
  p.u_h.setZero();
  p.u_o.setZero();
  const auto report = find_poles(p);
  CHECK_FALSE(report.has_poles);
  CHECK(std::isinf(report.predicted_rate));
  CHECK(classify_stability(report) == Stability::decaying);
}

TEST_CASE("covariance and MI decay rates match the pole prediction") {
  RandomStream rng(424242);
  int accepted = 0;
  for (int trial = 0; trial < 400 && accepted < 20; ++trial) {
    const auto p = random_instance(rng);
    const auto report = find_poles(p);
    if (!report.has_poles) continue;
    if (classify_stability(report) != Stability::decaying) continue;
    const double r1 = std::abs(report.poles[0].z);
    const double ratio = report.poles.size() > 1 ? std::abs(report.poles[1].z) / r1 : 10.0;
    if (ratio <= 1.05) continue;  // near-degenerate leading poles excluded
    const double rate = std::log(r1);
    if (rate < 0.05) continue;  // too slow to resolve in a bounded window
    int t_end = static_cast<int>(std::min(4000.0, std::max(100.0, 24.0 / std::log(ratio))));
    t_end = std::min(t_end, static_cast<int>(250.0 / rate));
    if (t_end < 24.0 / std::log(ratio) || t_end < 40) continue;  // would under-resolve

    const int m = p.m(), d = p.d();
    const auto states = propagate(p, t_end);
    const Eigen::MatrixXd sigma_x0x0 = p.sigma0.bottomRightCorner(d, d);
    std::vector<double> ts, log_norm, log_mi;
    bool usable = true;
    for (int t = t_end / 2; t <= t_end; ++t) {
      const Eigen::MatrixXd cross = states[t].x_x0(m, d);
      const double nrm = cross.norm();
      const double mi = mi_gaussian(sigma_x0x0, states[t].xx(m, d), cross.transpose());
      if (!(nrm > 1e-280) || !(mi > 1e-290)) {
        usable = false;
        break;
      }
      ts.push_back(t);
      log_norm.push_back(std::log(nrm));
      log_mi.push_back(std::log(mi));
    }
    if (!usable) continue;
    ++accepted;
    const double cov_rate = -ols_slope(ts, log_norm);
    const double mi_rate = -ols_slope(ts, log_mi);
    CHECK(cov_rate == doctest::Approx(rate).epsilon(0.02));
    CHECK(mi_rate == doctest::Approx(2.0 * cov_rate).epsilon(0.02));
  }
  CHECK(accepted >= 20);
}

TEST_CASE("bias vectors never change the analytic MI curve") {
  auto p = scalar_example();
  const auto base = mi_curve_linear_rnn(p, 50);
  p.mean_h0 = Eigen::VectorXd::Constant(1, 3.7);
  p.mean_x0 = Eigen::VectorXd::Constant(1, -1.2);
  const auto shifted = mi_curve_linear_rnn(p, 50);
  for (std::size_t i = 0; i < base.curve.points.size(); ++i)
    CHECK(base.curve.points[i].mi == shifted.curve.points[i].mi);
}

TEST_CASE("Monte Carlo covariances match the analytic propagation") {
  const auto p = scalar_example();
  const int t_max = 20;
  const std::size_t n_runs = 20000;
  const auto runs = sample_linear_rnn(p, n_runs, t_max, 555);
  const auto states = propagate(p, t_max);
  for (int t = 1; t <= t_max; ++t) {
    double sum_xx = 0.0, sum_x0 = 0.0, sum_xt = 0.0, sum_x0x0 = 0.0, sum_xtxt = 0.0;
    for (const auto& run : runs) {
      const double x0 = run(0, 0), xt = run(0, t);
      sum_x0 += x0;
      sum_xt += xt;
      sum_xx += x0 * xt;
      sum_x0x0 += x0 * x0;
      sum_xtxt += xt * xt;
    }
    const double n = static_cast<double>(n_runs);
    const double mean_x0 = sum_x0 / n, mean_xt = sum_xt / n;
    const double cov = sum_xx / n - mean_x0 * mean_xt;
    const double var0 = sum_x0x0 / n - mean_x0 * mean_x0;
    const double vart = sum_xtxt / n - mean_xt * mean_xt;
    const double se = std::sqrt((var0 * vart + cov * cov) / n);
    CHECK(std::abs(cov - states[t].x_x0(1, 1)(0, 0)) <= 3.5 * se);
    const double se_var = vart * std::sqrt(2.0 / n);
    CHECK(std::abs(vart - states[t].xx(1, 1)(0, 0)) <= 3.0 * se_var);
    // empirical output variance respects the noise floor
    CHECK(vart >= p.sigma2 - 3.0 * se_var);
  }
}

TEST_CASE("deterministic sampling and degenerate limits") {
  auto p = scalar_example();
  const auto a = sample_linear_rnn(p, 5, 10, 99);
  const auto b = sample_linear_rnn(p, 5, 10, 99);
  for (std::size_t r = 0; r < 5; ++r) CHECK(a[r] == b[r]);

  // sigma -> 0, U_o = 0, deterministic initial state: all x_t equal the mean
  p.u_o.setZero();
  p.sigma2 = 1e-30;
  p.sigma0.setZero();
  p.mean_x0 = Eigen::VectorXd::Constant(1, 2.5);
  const auto frozen = sample_linear_rnn(p, 3, 10, 1);
  for (const auto& run : frozen) {
    CHECK(run(0, 0) == doctest::Approx(2.5).epsilon(1e-9));
    for (int t = 1; t <= 10; ++t) CHECK(run(0, t) == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("rnn params file parsing") {
  std::stringstream good(
      "# scalar example\n"
      "m 1\nd 1\nsigma2 1.0\n"
      "U_h 0.5\nW_h 1.0\nU_o 0.2\n"
      "Sigma0 0 0 0 1\n");
  const auto p = parse_rnn_params(good);
  CHECK(p.u_h(0, 0) == 0.5);
  CHECK(p.sigma0(1, 1) == 1.0);
  CHECK(p.mean_h0.size() == 1);

  std::stringstream rt;
  write_rnn_params(rt, p);
  const auto q = parse_rnn_params(rt);
  CHECK(q.u_h(0, 0) == p.u_h(0, 0));
  CHECK(q.sigma0 == p.sigma0);

  std::stringstream missing_dims("U_h 0.5\n");
  CHECK_THROWS_AS(parse_rnn_params(missing_dims), io_error);
  std::stringstream short_matrix("m 2\nd 1\nU_h 0.5 0.5 0.5\n");
  CHECK_THROWS_AS(parse_rnn_params(short_matrix), io_error);
  std::stringstream bad_sigma("m 1\nd 1\nsigma2 -1\nU_h 0.5\nW_h 1\nU_o 0.2\n");
  CHECK_THROWS_AS(parse_rnn_params(bad_sigma), numeric_error);
}
