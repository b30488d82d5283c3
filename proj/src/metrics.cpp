#include "netreg/metrics.hpp"

#include <cmath>

namespace netreg {

double rmse(const Vector& y_true, const Vector& y_pred) {
  if (y_true.size() != y_pred.size())
    throw ValidationError("rmse: length mismatch");
  if (y_true.size() < 1) throw ValidationError("rmse: empty input");
  return std::sqrt((y_true - y_pred).squaredNorm() /
                   static_cast<double>(y_true.size()));
}

std::optional<double> calibration_slope(const Vector& y_true, const Vector& y_pred) {
  if (y_true.size() != y_pred.size())
    throw ValidationError("calibration_slope: length mismatch");
  const Index n = y_true.size();
  if (n < 3) throw ValidationError("calibration_slope: need at least 3 points");
  const double mean_pred = y_pred.mean();
  const double mean_true = y_true.mean();
  const double var_pred = (y_pred.array() - mean_pred).square().sum();
  if (var_pred <= 0.0) return std::nullopt;
  const double cov =
      ((y_true.array() - mean_true) * (y_pred.array() - mean_pred)).sum();
  return cov / var_pred;
}

ConfusionCounts selection_confusion(const Vector& beta_hat, const Vector& beta_true,
                                    double zero_threshold) {
  if (beta_hat.size() != beta_true.size())
    throw ValidationError("selection_confusion: length mismatch");
  ConfusionCounts c;
  for (Index j = 0; j < beta_hat.size(); ++j) {
    const bool est_zero = std::abs(beta_hat(j)) <= zero_threshold;
    const bool true_zero = beta_true(j) == 0.0;
    if (!est_zero && !true_zero)
      ++c.tp;
    else if (est_zero && true_zero)
      ++c.tn;
    else if (!est_zero && true_zero)
      ++c.fp;
    else
      ++c.fn;
  }
  return c;
}

std::optional<double> f1_score(const ConfusionCounts& c) {
  const double denom = 2.0 * c.tp + c.fp + c.fn;
  if (denom == 0.0) return std::nullopt;
  return 2.0 * c.tp / denom;
}

std::optional<double> mcc(const ConfusionCounts& c) {
  const double f1 = static_cast<double>(c.tp + c.fp);
  const double f2 = static_cast<double>(c.tp + c.fn);
  const double f3 = static_cast<double>(c.tn + c.fp);
  const double f4 = static_cast<double>(c.tn + c.fn);
  if (f1 == 0.0 || f2 == 0.0 || f3 == 0.0 || f4 == 0.0) return std::nullopt;
  const double num = static_cast<double>(c.tp) * c.tn - static_cast<double>(c.fp) * c.fn;
  return num / std::sqrt(f1 * f2 * f3 * f4);
}

}  // namespace netreg
