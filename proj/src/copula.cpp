#include "miscale/copula.hpp"

#include <omp.h>

#include <cmath>
#include <numbers>

#include "miscale/common.hpp"
#include "miscale/rng.hpp"

namespace miscale {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;
constexpr double kMiCap = kLn2 - 1e-6;  // keeps arccos away from the degenerate endpoint
constexpr double kEigClip = 1e-10;
}  // namespace

CovMode cov_mode_from_string(const std::string& name) {
  if (name == "approx") return CovMode::approx;
  if (name == "exact") return CovMode::exact;
  throw usage_error("unknown covariance mode: " + name);
}

std::string to_string(CovMode mode) {
  return mode == CovMode::approx ? "approx" : "exact";
}

double mi_of_theta(double theta) {
  if (!(theta >= 0.0 && theta <= kPi / 2.0))
    throw numeric_error("mi_of_theta: theta must lie in [0, pi/2]");
  const double xlnx = theta > 0.0 ? theta * std::log(theta) : 0.0;
  return (kPi * std::log(2.0 / kPi) + (kPi - theta) * std::log(kPi - theta) + xlnx) / kPi;
}

double theta_of_mi(double target) {
  if (!(target >= 0.0 && target <= kLn2))
    throw numeric_error("theta_of_mi: target must lie in [0, ln 2]");
  // Endpoints are exact; near pi/2 the formula cancels to rounding noise, so
  // bisection alone cannot resolve the target 0.
  if (target == 0.0) return kPi / 2.0;
  if (target == kLn2) return 0.0;
  double lo = 0.0, hi = kPi / 2.0;  // mi_of_theta decreases from ln 2 to 0
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mi_of_theta(mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double small_c_mi(double c) {
  if (!(std::abs(c) < 1.0)) throw numeric_error("small_c_mi: |c| must be < 1");
  return 2.0 * c * c / (kPi * kPi);
}

Eigen::MatrixXd ToeplitzCovariance::dense() const {
  Eigen::MatrixXd m(length, length);
  for (std::size_t i = 0; i < length; ++i)
    for (std::size_t j = 0; j < length; ++j) m(i, j) = entry(i, j);
  return m;
}

ToeplitzCovariance build_covariance(double amplitude, double power, std::size_t length,
                                    CovMode mode) {
  if (!(amplitude > 0.0) || !(power > 0.0))
    throw numeric_error("build_covariance: amplitude and power must be positive");
  if (length < 2) throw numeric_error("build_covariance: length must be >= 2");
  ToeplitzCovariance cov;
  cov.amplitude = amplitude;
  cov.power = power;
  cov.length = length;
  cov.mode = mode;
  cov.offdiag.resize(length - 1);
  if (mode == CovMode::approx) {
    const double c1 = std::sqrt(amplitude / 2.0) * kPi;
    if (!(c1 < 1.0))
      throw numeric_error("build_covariance: approx mode needs sqrt(A/2)*pi < 1, got " +
                          std::to_string(c1));
    for (std::size_t d = 1; d < length; ++d)
      cov.offdiag[d - 1] = c1 / std::pow(static_cast<double>(d), power / 2.0);
  } else {
    for (std::size_t d = 1; d < length; ++d) {
      const double target =
          std::min(amplitude / std::pow(static_cast<double>(d), power), kMiCap);
      cov.offdiag[d - 1] = std::cos(theta_of_mi(target));
    }
  }
  return cov;
}

CovFactor factor_covariance(const ToeplitzCovariance& cov) {
  Eigen::MatrixXd sigma = cov.dense();
  CovFactor factor;
  {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() == Eigen::Success) {
      factor.lower = llt.matrixL();
      return factor;
    }
  }
  // PSD repair: clip eigenvalues, reconstruct, renormalize the diagonal.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  if (es.info() != Eigen::Success)
    throw numeric_error("factor_covariance: eigendecomposition failed");
  Eigen::VectorXd evals = es.eigenvalues();
  factor.min_eigenvalue = evals.minCoeff();
  double clipped = 0.0;
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    if (evals[i] < kEigClip) {
      clipped += kEigClip - evals[i];
      evals[i] = kEigClip;
    }
  }
  factor.repaired = true;
  factor.clipped_mass = clipped;
  Eigen::MatrixXd repaired =
      es.eigenvectors() * evals.asDiagonal() * es.eigenvectors().transpose();
  Eigen::VectorXd scale = repaired.diagonal().cwiseSqrt().cwiseInverse();
  repaired = scale.asDiagonal() * repaired * scale.asDiagonal();
  Eigen::LLT<Eigen::MatrixXd> llt(repaired);
  if (llt.info() != Eigen::Success)
    throw numeric_error("factor_covariance: factorization failed after repair; "
                        "most negative eigenvalue " +
                        std::to_string(factor.min_eigenvalue));
  factor.lower = llt.matrixL();
  return factor;
}

std::vector<double> sample_gaussian(const Eigen::MatrixXd& lower, std::uint64_t seed,
                                    std::uint64_t stream) {
  const Eigen::Index n = lower.rows();
  RandomStream rng(seed, stream);
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.gaussian();
  Eigen::VectorXd x = lower.triangularView<Eigen::Lower>() * z;
  return {x.data(), x.data() + n};
}

Corpus sample_binary(const CovFactor& factor, std::size_t n_seqs, std::uint64_t seed) {
  if (n_seqs == 0) throw numeric_error("sample_binary: need at least one sequence");
  const std::size_t n = static_cast<std::size_t>(factor.lower.rows());
  Corpus corpus;
  corpus.vocab_size = 2;
  corpus.sequences.resize(n_seqs);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(n_seqs); ++s) {
    const auto x = sample_gaussian(factor.lower, seed, static_cast<std::uint64_t>(s));
    SymbolSequence seq;
    seq.vocab_size = 2;
    seq.symbols.resize(n);
    for (std::size_t i = 0; i < n; ++i) seq.symbols[i] = x[i] > 0.0 ? 1u : 0u;
    corpus.sequences[static_cast<std::size_t>(s)] = std::move(seq);
  }
  return corpus;
}

Corpus sample_binary(const ToeplitzCovariance& cov, std::size_t n_seqs, std::uint64_t seed) {
  return sample_binary(factor_covariance(cov), n_seqs, seed);
}

}  // namespace miscale
