#include "netreg/covariance.hpp"

#include <cmath>
#include <string>

namespace netreg {

CovarianceEstimate empirical_covariance(const Matrix& X) {
  const Index n = X.rows();
  const Index p = X.cols();
  if (n < 2) throw ValidationError("empirical_covariance: need at least 2 rows");
  if (p < 1) throw ValidationError("empirical_covariance: need at least 1 column");
  if (!X.allFinite())
    throw ValidationError("empirical_covariance: non-finite entries in input");

  CovarianceEstimate est;
  est.n_samples = n;
  est.sample_mean = X.colwise().mean();
  Matrix centered = X.rowwise() - est.sample_mean.transpose();
  est.matrix = Matrix::Zero(p, p);
  est.matrix.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose(),
                                                        1.0 / static_cast<double>(n));
  // Mirror the computed lower triangle so the matrix is exactly symmetric.
  est.matrix.triangularView<Eigen::StrictlyUpper>() =
      est.matrix.transpose().triangularView<Eigen::StrictlyUpper>();
  return est;
}

StandardizedMatrix standardize_columns(const Matrix& X) {
  const Index n = X.rows();
  const Index p = X.cols();
  if (n < 2) throw ValidationError("standardize_columns: need at least 2 rows");
  if (!X.allFinite())
    throw ValidationError("standardize_columns: non-finite entries in input");

  StandardizedMatrix out;
  out.values.resize(n, p);
  out.scaling.resize(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) {
    const double mean = X.col(j).mean();
    const double var = (X.col(j).array() - mean).square().sum() / static_cast<double>(n);
    if (var <= 0.0)
      throw NumericalError("standardize_columns: column " + std::to_string(j + 1) +
                           " is constant");
    const double sd = std::sqrt(var);
    out.values.col(j) = (X.col(j).array() - mean) / sd;
    out.scaling[static_cast<std::size_t>(j)] = {mean, sd};
  }
  return out;
}

Matrix repair_correlation(const Matrix& S, double floor) {
  if (S.rows() != S.cols())
    throw ValidationError("repair_correlation: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(S);
  if (eig.info() != Eigen::Success)
    throw NumericalError("repair_correlation: eigendecomposition failed");
  if (eig.eigenvalues().minCoeff() > floor) return S;

  Vector clipped = eig.eigenvalues().cwiseMax(floor);
  Matrix repaired =
      eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
  Vector d = repaired.diagonal().cwiseSqrt();
  for (Index j = 0; j < repaired.cols(); ++j)
    for (Index i = 0; i < repaired.rows(); ++i)
      repaired(i, j) /= d(i) * d(j);
  // Exact symmetry and unit diagonal after the rescale.
  repaired = ((repaired + repaired.transpose()) / 2.0).eval();
  repaired.diagonal().setOnes();
  return repaired;
}

}  // namespace netreg
