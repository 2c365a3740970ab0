#include "miscale/linrnn.hpp"

#include <omp.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "miscale/common.hpp"
#include "miscale/rng.hpp"

namespace miscale {

void LinearRnnParams::validate() const {
  const int mm = m(), dd = d();
  if (mm <= 0 || dd <= 0) throw numeric_error("rnn params: m and d must be positive");
  if (u_h.rows() != mm || u_h.cols() != mm) throw numeric_error("rnn params: U_h must be m x m");
  if (w_h.rows() != mm || w_h.cols() != dd) throw numeric_error("rnn params: W_h must be m x d");
  if (u_o.rows() != dd || u_o.cols() != mm) throw numeric_error("rnn params: U_o must be d x m");
  if (!(sigma2 > 0.0)) throw numeric_error("rnn params: sigma2 must be positive");
  if (sigma0.rows() != mm + dd || sigma0.cols() != mm + dd)
    throw numeric_error("rnn params: Sigma0 must be (m+d) x (m+d)");
  if ((sigma0 - sigma0.transpose()).cwiseAbs().maxCoeff() > 1e-9)
    throw numeric_error("rnn params: Sigma0 must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma0);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw numeric_error("rnn params: Sigma0 is not positive semidefinite (min eigenvalue " +
                        std::to_string(es.eigenvalues().minCoeff()) + ")");
  if (mean_h0.size() != 0 && mean_h0.size() != mm)
    throw numeric_error("rnn params: mean_h0 must have length m");
  if (mean_x0.size() != 0 && mean_x0.size() != dd)
    throw numeric_error("rnn params: mean_x0 must have length d");
}

namespace {

Eigen::MatrixXd read_matrix_tokens(std::istream& in, int rows, int cols,
                                   const std::string& key) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (!(in >> m(i, j)))
        throw io_error("rnn params: expected " + std::to_string(rows * cols) +
                       " values for " + key);
  return m;
}

}  // namespace

LinearRnnParams parse_rnn_params(std::istream& raw) {
  // Strip comment lines before token parsing.
  std::stringstream in;
  std::string line;
  while (std::getline(raw, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    in << line << '\n';
  }

  int m = -1, d = -1;
  LinearRnnParams p;
  bool have_uh = false, have_wh = false, have_uo = false, have_sigma0 = false;
  std::string key;
  while (in >> key) {
    if (key == "m") {
      if (!(in >> m) || m <= 0) throw io_error("rnn params: invalid m");
    } else if (key == "d") {
      if (!(in >> d) || d <= 0) throw io_error("rnn params: invalid d");
    } else if (key == "sigma2") {
      if (!(in >> p.sigma2)) throw io_error("rnn params: invalid sigma2");
    } else {
      if (m <= 0 || d <= 0)
        throw io_error("rnn params: m and d must precede matrix field " + key);
      if (key == "U_h") {
        p.u_h = read_matrix_tokens(in, m, m, key);
        have_uh = true;
      } else if (key == "W_h") {
        p.w_h = read_matrix_tokens(in, m, d, key);
        have_wh = true;
      } else if (key == "U_o") {
        p.u_o = read_matrix_tokens(in, d, m, key);
        have_uo = true;
      } else if (key == "Sigma0") {
        p.sigma0 = read_matrix_tokens(in, m + d, m + d, key);
        have_sigma0 = true;
      } else if (key == "mean_h0") {
        p.mean_h0 = read_matrix_tokens(in, m, 1, key);
      } else if (key == "mean_x0") {
        p.mean_x0 = read_matrix_tokens(in, d, 1, key);
      } else {
        throw io_error("rnn params: unknown field " + key);
      }
    }
  }
  if (m <= 0 || d <= 0) throw io_error("rnn params: missing m or d");
  if (!have_uh || !have_wh || !have_uo)
    throw io_error("rnn params: U_h, W_h and U_o are required");
  if (!have_sigma0) p.sigma0 = Eigen::MatrixXd::Identity(m + d, m + d);
  if (p.mean_h0.size() == 0) p.mean_h0 = Eigen::VectorXd::Zero(m);
  if (p.mean_x0.size() == 0) p.mean_x0 = Eigen::VectorXd::Zero(d);
  p.validate();
  return p;
}

LinearRnnParams read_rnn_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open rnn params file: " + path);
  return parse_rnn_params(in);
}

void write_rnn_params(std::ostream& out, const LinearRnnParams& params) {
  const auto dump = [&out](const std::string& key, const Eigen::MatrixXd& m) {
    out << key;
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) out << ' ' << m(i, j);
    out << '\n';
  };
  out << "m " << params.m() << "\nd " << params.d() << "\nsigma2 " << params.sigma2 << '\n';
  dump("U_h", params.u_h);
  dump("W_h", params.w_h);
  dump("U_o", params.u_o);
  dump("Sigma0", params.sigma0);
  dump("mean_h0", params.mean_h0);
  dump("mean_x0", params.mean_x0);
}

std::vector<CovarianceState> propagate(const LinearRnnParams& params, int t_max) {
  params.validate();
  if (t_max < 0) throw numeric_error("propagate: t_max must be >= 0");
  const int m = params.m(), d = params.d(), n = m + d;

  Eigen::MatrixXd trans = Eigen::MatrixXd::Zero(n, n);
  trans.topLeftCorner(m, m) = params.u_h;
  trans.topRightCorner(m, d) = params.w_h;
  trans.bottomLeftCorner(d, m) = params.u_o * params.u_h;

  Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(n, n);
  noise.bottomRightCorner(d, d) = params.sigma2 * Eigen::MatrixXd::Identity(d, d);

  std::vector<CovarianceState> states;
  states.reserve(static_cast<std::size_t>(t_max) + 1);
  CovarianceState s0;
  s0.t = 0;
  s0.state_cov = params.sigma0;
  s0.cross_x0 = params.sigma0.rightCols(d);
  states.push_back(s0);
  for (int t = 1; t <= t_max; ++t) {
    CovarianceState s;
    s.t = t;
    s.state_cov = trans * states.back().state_cov * trans.transpose() + noise;
    s.state_cov = 0.5 * (s.state_cov + s.state_cov.transpose().eval());
    s.cross_x0 = trans * states.back().cross_x0;
    states.push_back(std::move(s));
  }
  return states;
}

std::vector<Eigen::MatrixXd> sigma_recurrence_oracle(const LinearRnnParams& params,
                                                     int t_max) {
  params.validate();
  if (t_max < 0) throw numeric_error("sigma_recurrence_oracle: t_max must be >= 0");
  const int m = params.m(), d = params.d();
  const Eigen::MatrixXd sigma_h0x0 = params.sigma0.topRightCorner(m, d);
  const Eigen::MatrixXd sigma_x0x0 = params.sigma0.bottomRightCorner(d, d);

  // U_h^t for t = 0..t_max
  std::vector<Eigen::MatrixXd> uh_pow;
  uh_pow.reserve(static_cast<std::size_t>(t_max) + 1);
  uh_pow.push_back(Eigen::MatrixXd::Identity(m, m));
  for (int t = 1; t <= t_max; ++t) uh_pow.push_back(params.u_h * uh_pow.back());

  std::vector<Eigen::MatrixXd> cross;
  cross.reserve(static_cast<std::size_t>(t_max) + 1);
  cross.push_back(sigma_x0x0);
  for (int t = 1; t <= t_max; ++t) {
    Eigen::MatrixXd s = params.u_o * uh_pow[t] * sigma_h0x0;
    for (int i = 0; i + 2 <= t; ++i) s += params.u_o * uh_pow[t - 1 - i] * params.w_h * cross[i];
    cross.push_back(std::move(s));
  }
  return cross;
}

double mi_gaussian(const Eigen::MatrixXd& sigma_xx, const Eigen::MatrixXd& sigma_yy,
                   const Eigen::MatrixXd& sigma_xy) {
  Eigen::LLT<Eigen::MatrixXd> lltx(sigma_xx);
  Eigen::LLT<Eigen::MatrixXd> llty(sigma_yy);
  if (lltx.info() != Eigen::Success || llty.info() != Eigen::Success)
    throw numeric_error("mi_gaussian: marginal covariance is not positive definite");
  const Eigen::MatrixXd m = lltx.matrixL().solve(sigma_xy);
  const Eigen::MatrixXd g = llty.matrixL().solve(m.transpose());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
  double mi = 0.0;
  for (double s : svd.singularValues()) {
    const double s2 = s * s;
    if (s2 >= 1.0) return std::numeric_limits<double>::infinity();
    mi -= 0.5 * std::log1p(-s2);
  }
  return mi;
}

RnnMiCurve mi_curve_linear_rnn(const LinearRnnParams& params, int t_max) {
  const int m = params.m(), d = params.d();
  const auto states = propagate(params, t_max);
  const Eigen::MatrixXd sigma_x0x0 = params.sigma0.bottomRightCorner(d, d);
  RnnMiCurve out;
  out.curve.estimator_id = "analytic";
  out.memorizing = classify_stability(params) == Stability::memorizing;
  for (int t = 1; t <= t_max; ++t) {
    const Eigen::MatrixXd cov_x0_xt = states[t].x_x0(m, d).transpose();
    const double mi = mi_gaussian(sigma_x0x0, states[t].xx(m, d), cov_x0_xt);
    out.curve.points.push_back({static_cast<std::uint64_t>(t), mi, 1});
  }
  return out;
}

namespace {

std::vector<std::complex<double>> polynomial_roots(const std::vector<std::complex<double>>& coef) {
  // coef[k] multiplies z^k; leading coefficient nonzero.
  const int n = static_cast<int>(coef.size()) - 1;
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -coef[i] / coef[n];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp);
  std::vector<std::complex<double>> roots(es.eigenvalues().data(),
                                          es.eigenvalues().data() + n);
  return roots;
}

}  // namespace

PoleReport find_poles(const LinearRnnParams& params) {
  params.validate();
  const int m = params.m(), d = params.d();
  using Complex = std::complex<double>;

  std::vector<Complex> candidates;

  // q(z) sampled on the unit circle; degree <= d(m+1).
  const int degree_bound = d * (m + 1);
  const int k = degree_bound + 1;
  std::vector<Complex> samples(k);
  const Eigen::MatrixXcd uh = params.u_h.cast<Complex>();
  const Eigen::MatrixXcd uhwh = (params.u_h * params.w_h).cast<Complex>();
  const Eigen::MatrixXcd uo = params.u_o.cast<Complex>();
  const Eigen::MatrixXcd eye_m = Eigen::MatrixXcd::Identity(m, m);
  const Eigen::MatrixXcd eye_d = Eigen::MatrixXcd::Identity(d, d);
  for (int j = 0; j < k; ++j) {
    const double angle = 2.0 * M_PI * j / k;
    const Complex z(std::cos(angle), std::sin(angle));
    const Eigen::MatrixXcd mz = eye_m - uh * z;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(mz);
    const Eigen::MatrixXcd a = uo * lu.solve(uhwh) * (z * z);
    Complex det_mz = lu.determinant();
    Complex q = (eye_d - a).determinant();
    for (int e = 0; e < d; ++e) q *= det_mz;
    samples[j] = q;
  }
  // Inverse DFT on the roots-of-unity nodes gives the coefficients directly.
  std::vector<Complex> coef(k);
  for (int c = 0; c < k; ++c) {
    Complex acc = 0.0;
    for (int j = 0; j < k; ++j) {
      const double angle = -2.0 * M_PI * j * c / k;
      acc += samples[j] * Complex(std::cos(angle), std::sin(angle));
    }
    coef[c] = acc / static_cast<double>(k);
  }
  double max_coef = 0.0;
  for (const Complex& c : coef) max_coef = std::max(max_coef, std::abs(c));
  int degree = 0;
  for (int c = k - 1; c >= 0; --c) {
    if (std::abs(coef[c]) < 1e-12 * max_coef)
      coef[c] = 0.0;
    else if (degree == 0 && c > 0)
      degree = c;
  }
  if (degree > 0) {
    coef.resize(degree + 1);
    for (const Complex& r : polynomial_roots(coef))
      if (std::abs(r) > 1e-9) candidates.push_back(r);
  }

  // Poles of the initial-condition term B(z): reciprocals of U_h eigenvalues.
  Eigen::EigenSolver<Eigen::MatrixXd> es(params.u_h);
  for (Complex lambda : es.eigenvalues())
    if (std::abs(lambda) > 1e-12) candidates.push_back(1.0 / lambda);

  // Confirm candidates against the stacked transition matrix: its nonzero
  // eigenvalue reciprocals are the exact pole locations, while the q(z)
  // factorization can carry spurious det(I_m - U_h z) roots whose residues
  // cancel. Candidates without a matching eigenvalue are dropped; exact
  // locations missed by the interpolation are added back.
  Eigen::MatrixXd t_mat = Eigen::MatrixXd::Zero(m + d, m + d);
  t_mat.topLeftCorner(m, m) = params.u_h;
  t_mat.topRightCorner(m, d) = params.w_h;
  t_mat.bottomLeftCorner(d, m) = params.u_o * params.u_h;
  Eigen::EigenSolver<Eigen::MatrixXd> et(t_mat);
  std::vector<Complex> exact;
  for (Complex lambda : et.eigenvalues())
    if (std::abs(lambda) > 1e-9) exact.push_back(1.0 / lambda);
  std::vector<Complex> confirmed;
  for (const Complex& z : candidates)
    for (const Complex& w : exact)
      if (std::abs(z - w) <= 1e-6 * (1.0 + std::abs(w))) {
        confirmed.push_back(z);
        break;
      }
  for (const Complex& w : exact) {
    bool present = false;
    for (const Complex& z : confirmed)
      if (std::abs(z - w) <= 1e-5 * (1.0 + std::abs(w))) {
        present = true;
        break;
      }
    if (!present) confirmed.push_back(w);
  }
  candidates = std::move(confirmed);

  PoleReport report;
  if (candidates.empty()) {
    report.predicted_rate = std::numeric_limits<double>::infinity();
    return report;
  }
  std::sort(candidates.begin(), candidates.end(), [](const Complex& a, const Complex& b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
    return std::arg(a) < std::arg(b);
  });
  for (const Complex& z : candidates) {
    if (!report.poles.empty() &&
        std::abs(z - report.poles.back().z) <= 1e-6 * (1.0 + std::abs(z)))
      report.poles.back().multiplicity += 1;
    else
      report.poles.push_back({z, 1});
  }
  report.has_poles = true;
  report.z_min = report.poles.front().z;
  report.predicted_rate = std::log(std::abs(report.z_min));
  return report;
}

std::string to_string(Stability s) {
  switch (s) {
    case Stability::decaying: return "decaying";
    case Stability::memorizing: return "memorizing";
    default: return "marginal";
  }
}

Stability classify_stability(const PoleReport& report) {
  if (!report.has_poles) return Stability::decaying;
  const double r = std::abs(report.z_min);
  if (r > 1.0 + 1e-9) return Stability::decaying;
  if (r < 1.0 - 1e-9) return Stability::memorizing;
  return Stability::marginal;
}

Stability classify_stability(const LinearRnnParams& params) {
  return classify_stability(find_poles(params));
}

std::vector<Eigen::MatrixXd> sample_linear_rnn(const LinearRnnParams& params,
                                               std::size_t n_runs, int t_max,
                                               std::uint64_t seed) {
  params.validate();
  if (t_max < 0) throw numeric_error("sample_linear_rnn: t_max must be >= 0");
  const int m = params.m(), d = params.d(), n = m + d;

  // Factor Sigma0, tolerating semidefinite input (deterministic components).
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(params.sigma0);
  Eigen::VectorXd evals = es.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd init_factor =
      es.eigenvectors() * evals.cwiseSqrt().asDiagonal();
  const double sigma = std::sqrt(params.sigma2);

  std::vector<Eigen::MatrixXd> runs(n_runs);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(n_runs); ++r) {
    RandomStream rng(seed, static_cast<std::uint64_t>(r));
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z[i] = rng.gaussian();
    Eigen::VectorXd s0 = init_factor * z;
    Eigen::VectorXd h = params.mean_h0 + s0.head(m);
    Eigen::VectorXd x = params.mean_x0 + s0.tail(d);

    Eigen::MatrixXd traj(d, t_max + 1);
    traj.col(0) = x;
    for (int t = 1; t <= t_max; ++t) {
      Eigen::VectorXd eps(d);
      for (int i = 0; i < d; ++i) eps[i] = rng.gaussian();
      const Eigen::VectorXd x_next = params.u_o * (params.u_h * h) + sigma * eps;
      const Eigen::VectorXd h_next = params.u_h * h + params.w_h * x;
      h = h_next;
      x = x_next;
      traj.col(t) = x;
    }
    runs[static_cast<std::size_t>(r)] = std::move(traj);
  }
  return runs;
}

}  // namespace miscale
