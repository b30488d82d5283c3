#pragma once

#include "netreg/common.hpp"

namespace netreg {

/// Maximum-likelihood covariance estimate (divisor n, not n-1), matching the
/// Gaussian log-likelihood used by the graphical-lasso objective.
struct CovarianceEstimate {
  Vector sample_mean;  // length p
  Matrix matrix;       // p x p, exactly symmetric
  Index n_samples = 0;
};

/// Rejects n < 2 and non-finite input.
CovarianceEstimate empirical_covariance(const Matrix& X);

/// Per-column affine transform, applied as (x - mean) / scale.
struct ColumnScaling {
  double mean = 0.0;
  double scale = 1.0;
};

/// Columns rescaled to mean zero, unit variance (divisor n).
struct StandardizedMatrix {
  Matrix values;
  std::vector<ColumnScaling> scaling;
};

/// Throws NumericalError on a constant column (names the column index).
StandardizedMatrix standardize_columns(const Matrix& X);

/// Eigenvalue-clipping repair for symmetric matrices meant to be correlation
/// matrices: if the smallest eigenvalue is <= floor, eigenvalues are clipped
/// at floor and the result rescaled back to a unit diagonal.
Matrix repair_correlation(const Matrix& S, double floor = 1e-8);

}  // namespace netreg
