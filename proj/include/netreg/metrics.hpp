#pragma once

#include "netreg/common.hpp"

#include <optional>

namespace netreg {

/// Confusion counts over a set of selectable coefficients. "Selected" means
/// the estimate is nonzero beyond the zero threshold; truth is compared at
/// exact zero.
struct ConfusionCounts {
  long tp = 0;
  long tn = 0;
  long fp = 0;
  long fn = 0;

  long total() const { return tp + tn + fp + fn; }
};

/// Per-fit metric row. Metrics whose denominator vanishes are carried as
/// empty optionals, never as sentinel numbers.
struct MetricsReport {
  double rmse = 0.0;
  std::optional<double> csl;
  std::optional<double> f1;
  std::optional<double> mcc;
};

double rmse(const Vector& y_true, const Vector& y_pred);

/// Slope of the simple least-squares regression of observed on predicted,
/// cov(y_true, y_pred) / var(y_pred). Ideal calibration gives 1. Constant
/// predictions make the slope undefined.
std::optional<double> calibration_slope(const Vector& y_true, const Vector& y_pred);

ConfusionCounts selection_confusion(const Vector& beta_hat, const Vector& beta_true,
                                    double zero_threshold = kZeroThreshold);

/// 2*TP / (2*TP + FP + FN); undefined iff the denominator is zero.
std::optional<double> f1_score(const ConfusionCounts& c);

/// Matthews correlation coefficient; undefined iff any of the four marginal
/// factors is zero (e.g. a select-everything fit has TN = FN = 0).
std::optional<double> mcc(const ConfusionCounts& c);

}  // namespace netreg
