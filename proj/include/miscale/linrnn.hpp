#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "miscale/mi.hpp"

namespace miscale {

/// Linear Elman RNN with Gaussian output:
///   h_t = U_h h_{t-1} + W_h x_{t-1}
///   x_t ~ N(o_t, sigma2 I_d),  o_t = U_o U_h h_{t-1}
/// The output reads the hidden state through U_o U_h, which makes the history
/// expansion o_t = U_o U_h^t h_0 + sum_{i<=t-2} U_o U_h^{t-1-i} W_h x_i hold
/// exactly.
struct LinearRnnParams {
  Eigen::MatrixXd u_h;     // m x m
  Eigen::MatrixXd w_h;     // m x d
  Eigen::MatrixXd u_o;     // d x m
  double sigma2 = 1.0;
  Eigen::MatrixXd sigma0;  // (m+d) x (m+d), joint covariance of (h_0, x_0)
  Eigen::VectorXd mean_h0;  // affects samples only, never MI
  Eigen::VectorXd mean_x0;

  int m() const { return static_cast<int>(u_h.rows()); }
  int d() const { return static_cast<int>(u_o.rows()); }
  void validate() const;
};

// Key-value text format: integer keys m, d; scalar sigma2; matrices U_h, W_h,
// U_o, Sigma0 and vectors mean_h0, mean_x0 as whitespace-separated row-major
// entries. mean_h0/mean_x0 default to zero, Sigma0 to the identity.
LinearRnnParams read_rnn_params(const std::string& path);
LinearRnnParams parse_rnn_params(std::istream& in);
void write_rnn_params(std::ostream& out, const LinearRnnParams& params);

/// Second moments of the stacked state s_t = (h_t, x_t) and its
/// cross-covariance with x_0.
struct CovarianceState {
  int t = 0;
  Eigen::MatrixXd state_cov;  // (m+d) x (m+d)
  Eigen::MatrixXd cross_x0;   // (m+d) x d, Cov(s_t, x_0)

  Eigen::MatrixXd xx(int m, int d) const { return state_cov.bottomRightCorner(d, d); }
  Eigen::MatrixXd x_x0(int m, int d) const { return cross_x0.bottomRows(d); }
};

/// Exact covariance propagation for t = 0..t_max via the linear-Gaussian
/// update s_t = T s_{t-1} + eta_t, T = [[U_h, W_h], [U_o U_h, 0]], noise
/// covariance diag(0, sigma2 I_d).
std::vector<CovarianceState> propagate(const LinearRnnParams& params, int t_max);

/// Direct O(T^2) evaluation of the cross-covariance recurrence
///   S_t = U_o U_h^t S_{h0x0} + sum_{i=0}^{t-2} U_o U_h^{t-1-i} W_h S_i.
/// Independent oracle against propagate; returns S_t for t = 0..t_max.
std::vector<Eigen::MatrixXd> sigma_recurrence_oracle(const LinearRnnParams& params,
                                                     int t_max);

/// Gaussian MI, exact log-det form
///   I = -1/2 ln det(I - Sxx^-1 Sxy Syy^-1 Sxy^T),
/// computed from the singular values s_i of Lxx^-1 Sxy Lyy^-T as
/// -1/2 sum log1p(-s_i^2), which stays accurate for tiny cross-covariances.
/// Returns +inf when a singular value reaches 1 (perfect correlation).
double mi_gaussian(const Eigen::MatrixXd& sigma_xx, const Eigen::MatrixXd& sigma_yy,
                   const Eigen::MatrixXd& sigma_xy);

struct RnnMiCurve {
  MICurve curve;  // estimator_id "analytic"
  bool memorizing = false;
};

/// Analytic MI curve I(t) = I(x_0; x_t) for t = 1..t_max.
RnnMiCurve mi_curve_linear_rnn(const LinearRnnParams& params, int t_max);

struct PoleReport {
  struct Pole {
    std::complex<double> z;
    int multiplicity = 1;
  };
  std::vector<Pole> poles;       // sorted by modulus
  bool has_poles = false;
  std::complex<double> z_min;    // valid only when has_poles
  double predicted_rate = 0.0;   // per-step covariance decay ln|z_min|; +inf when no poles
};

/// Candidate poles of the cross-covariance generating function: roots of
/// q(z) = det(I_m - U_h z)^d det(I_d - A(z)) with
/// A(z) = U_o (I_m - U_h z)^-1 U_h W_h z^2, found by sampling q on roots of
/// unity, interpolating the polynomial and rooting its companion matrix;
/// plus the reciprocal eigenvalues of U_h (poles of the initial-condition
/// term). Candidates are then confirmed against the reciprocal spectrum of
/// the stacked transition matrix, which removes factors whose residues
/// cancel in the resummed generating function.
PoleReport find_poles(const LinearRnnParams& params);

enum class Stability { decaying, memorizing, marginal };
std::string to_string(Stability s);

Stability classify_stability(const PoleReport& report);
Stability classify_stability(const LinearRnnParams& params);

/// Monte Carlo simulation of the model. Returns one d x (t_max+1) matrix per
/// run, column t holding x_t. One independent stream per run.
std::vector<Eigen::MatrixXd> sample_linear_rnn(const LinearRnnParams& params,
                                               std::size_t n_runs, int t_max,
                                               std::uint64_t seed);

}  // namespace miscale
