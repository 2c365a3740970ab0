#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "miscale/sequence.hpp"

namespace miscale {

enum class CovMode { approx, exact };

CovMode cov_mode_from_string(const std::string& name);
std::string to_string(CovMode mode);

/// MI in nats of the signs of a standard bivariate Gaussian with correlation
/// c = cos(theta), theta in [0, pi/2]. Monotone decreasing, image [0, ln 2].
double mi_of_theta(double theta);

/// Inverse of mi_of_theta on [0, ln 2], by bisection.
double theta_of_mi(double target);

/// Small-correlation expansion of the sign MI: 2 c^2 / pi^2.
double small_c_mi(double c);

/// Unit-diagonal Toeplitz covariance with power-law off-diagonal profile.
/// approx mode: c(d) = sqrt(A/2) * pi / d^(gamma/2), which makes the sign MI
/// approach A d^-gamma for large d. exact mode inverts the sign-MI formula so
/// the MI equals min(A d^-gamma, ln 2 - 1e-6) at every distance.
struct ToeplitzCovariance {
  double amplitude = 0.0;
  double power = 0.0;
  std::size_t length = 0;
  CovMode mode = CovMode::approx;
  std::vector<double> offdiag;  // c(d), d = 1..length-1

  double entry(std::size_t i, std::size_t j) const {
    return i == j ? 1.0 : offdiag[(i > j ? i - j : j - i) - 1];
  }
  Eigen::MatrixXd dense() const;
};

ToeplitzCovariance build_covariance(double amplitude, double power, std::size_t length,
                                    CovMode mode);

/// Triangular factor of a covariance matrix, with PSD repair bookkeeping.
/// When the Cholesky factorization fails, eigenvalues below 1e-10 are clipped
/// to 1e-10, the matrix is reconstructed and its diagonal renormalized to 1,
/// and the factorization is retried.
struct CovFactor {
  Eigen::MatrixXd lower;  // L with L L^T = (possibly repaired) covariance
  bool repaired = false;
  double clipped_mass = 0.0;    // sum of (clip - lambda) over clipped eigenvalues
  double min_eigenvalue = 0.0;  // most negative eigenvalue seen before repair
};

CovFactor factor_covariance(const ToeplitzCovariance& cov);

/// One correlated Gaussian vector: L z with z i.i.d. standard normal from the
/// stream (seed, stream index).
std::vector<double> sample_gaussian(const Eigen::MatrixXd& lower, std::uint64_t seed,
                                    std::uint64_t stream);

/// Binary corpus by thresholding correlated Gaussians at zero: y_i = 1 if
/// x_i > 0 else 0. One independent stream per sequence; output order is by
/// sequence index, independent of thread count.
Corpus sample_binary(const CovFactor& factor, std::size_t n_seqs, std::uint64_t seed);
Corpus sample_binary(const ToeplitzCovariance& cov, std::size_t n_seqs, std::uint64_t seed);

}  // namespace miscale
