#pragma once

#include <iosfwd>
#include <string>

#include "miscale/mi.hpp"

namespace miscale {

enum class FitModel { exponential, powerlaw };

/// Result of a log-space OLS fit of an MI curve.
/// exponential: I(tau) = amplitude * exp(-tau / decay), decay = xi.
/// powerlaw:    I(tau) = amplitude * tau^-decay,        decay = gamma.
/// ci95_* are 95% half-widths (Student-t on the OLS standard errors; the
/// decay CI uses the delta method). decay_infinite marks a non-negative
/// slope, reported as xi = +inf.
struct FitResult {
  FitModel model = FitModel::exponential;
  double amplitude = 0.0;
  double decay = 0.0;
  double ci95_amplitude = 0.0;
  double ci95_decay = 0.0;
  int points_used = 0;
  double r_squared = 0.0;
  bool decay_infinite = false;
};

/// Only points with mi > threshold (and mi > 0) enter the fit; at least 3
/// are required.
FitResult fit_exponential(const MICurve& curve, double threshold);
FitResult fit_powerlaw(const MICurve& curve, double threshold);

constexpr double kDefaultFitThreshold = 1e-3;

enum class ModelChoice { exponential, powerlaw, indeterminate };
std::string to_string(ModelChoice c);

struct ModelComparison {
  FitResult exponential;
  FitResult powerlaw;
  ModelChoice selected = ModelChoice::indeterminate;
};

/// Picks the model with higher r^2 when the gap exceeds 0.05.
ModelComparison compare_models(const MICurve& curve, double threshold);

// Flat key-value record (model, parameters, ci95, points_used, r_squared).
void write_fit(std::ostream& out, const FitResult& fit);
std::string fit_to_string(const FitResult& fit);

}  // namespace miscale
