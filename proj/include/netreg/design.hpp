#pragma once

#include <string>
#include <vector>

#include "netreg/dataset.hpp"
#include "netreg/network.hpp"

namespace netreg {

/// Split design for the partially penalized model y = U*alpha + N*beta + e.
/// U = [1 | Z centered | hub predictors standardized] stays unpenalized;
/// N holds the standardized non-hub predictors. Column means and scales are
/// retained so fits can be mapped back to the original scale and applied to
/// new raw data.
struct DesignPartition {
  Matrix U;
  Matrix N;
  std::vector<std::string> u_names;
  std::vector<std::string> n_names;
  Vector u_mean, u_scale;
  Vector n_mean, n_scale;
  std::vector<Index> hub_cols;     // X column index per U column past 1 + c
  std::vector<Index> nonhub_cols;  // X column index per N column
  std::vector<Index> dropped_cols;  // constant non-hub X columns (warned, dropped)
  Index n_confounders = 0;
  Index x_count = 0;

  Index t() const { return U.cols(); }
  Index q() const { return N.cols(); }
};

/// Builds U and N from the dataset and hub partition. Constant non-hub
/// columns are dropped and recorded in dropped_cols; constant hub or
/// confounder columns are kept (they surface as a rank error at fit time).
DesignPartition build_design(const Dataset& dataset, const HubPartition& hubs);

/// Row subset sharing the parent's scaling records (for CV folds).
DesignPartition subset_rows(const DesignPartition& design,
                            const std::vector<Index>& rows);

struct OriginalScaleCoefficients {
  double intercept = 0.0;
  Vector confounders;  // length c
  Vector proteins;     // length x_count; dropped columns are 0
};

/// Undoes the centering/scaling so coefficients refer to the raw columns.
OriginalScaleCoefficients original_scale_coefficients(const DesignPartition& design,
                                                      const Vector& alpha,
                                                      const Vector& beta);

/// Applies a fit to raw (Z, X) data using the training-time scaling records.
Vector predict_response(const DesignPartition& design, const Vector& alpha,
                        const Vector& beta, const Matrix& Z, const Matrix& X);

}  // namespace netreg
