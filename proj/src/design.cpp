#include "netreg/design.hpp"

#include <algorithm>
#include <cmath>

namespace netreg {

namespace {

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

Moments column_moments(const Vector& x) {
  Moments m;
  m.mean = x.mean();
  m.sd = std::sqrt((x.array() - m.mean).square().mean());
  return m;
}

void check_partition(const HubPartition& hubs, Index p) {
  if (static_cast<Index>(hubs.hub_indices.size() + hubs.nonhub_indices.size()) != p) {
    throw ValidationError("hub partition does not cover the predictor columns");
  }
  for (Index idx : hubs.hub_indices) {
    if (idx < 0 || idx >= p) {
      throw ValidationError("hub index out of range");
    }
  }
  for (Index idx : hubs.nonhub_indices) {
    if (idx < 0 || idx >= p) {
      throw ValidationError("non-hub index out of range");
    }
  }
}

}  // namespace

DesignPartition build_design(const Dataset& dataset, const HubPartition& hubs) {
  validate_dataset(dataset);
  const Index n = dataset.n();
  const Index c = dataset.n_confounders();
  const Index p = dataset.n_predictors();
  check_partition(hubs, p);

  DesignPartition design;
  design.n_confounders = c;
  design.x_count = p;
  design.hub_cols = hubs.hub_indices;

  const Index t = 1 + c + static_cast<Index>(hubs.hub_indices.size());
  design.U.resize(n, t);
  design.u_mean = Vector::Zero(t);
  design.u_scale = Vector::Ones(t);
  design.u_names.reserve(t);

  design.U.col(0).setOnes();
  design.u_names.push_back("(intercept)");
  for (Index j = 0; j < c; ++j) {
    const Moments m = column_moments(dataset.Z.col(j));
    design.U.col(1 + j) = dataset.Z.col(j).array() - m.mean;  // centered only
    design.u_mean(1 + j) = m.mean;
    design.u_names.push_back(dataset.z_names[j]);
  }
  for (std::size_t k = 0; k < hubs.hub_indices.size(); ++k) {
    const Index col = hubs.hub_indices[k];
    const Index dst = 1 + c + static_cast<Index>(k);
    const Moments m = column_moments(dataset.X.col(col));
    design.u_mean(dst) = m.mean;
    if (m.sd > 0.0) {
      design.u_scale(dst) = m.sd;
      design.U.col(dst) = (dataset.X.col(col).array() - m.mean) / m.sd;
    } else {
      // keep it centered; the zero column is caught by the rank check later
      design.U.col(dst) = dataset.X.col(col).array() - m.mean;
    }
    design.u_names.push_back(dataset.x_names[col]);
  }

  std::vector<Index> kept;
  for (Index col : hubs.nonhub_indices) {
    const Moments m = column_moments(dataset.X.col(col));
    if (m.sd > 0.0) {
      kept.push_back(col);
    } else {
      design.dropped_cols.push_back(col);
    }
  }
  const Index q = static_cast<Index>(kept.size());
  design.N.resize(n, q);
  design.n_mean = Vector::Zero(q);
  design.n_scale = Vector::Ones(q);
  design.nonhub_cols = kept;
  design.n_names.reserve(q);
  for (Index j = 0; j < q; ++j) {
    const Index col = kept[j];
    const Moments m = column_moments(dataset.X.col(col));
    design.n_mean(j) = m.mean;
    design.n_scale(j) = m.sd;
    design.N.col(j) = (dataset.X.col(col).array() - m.mean) / m.sd;
    design.n_names.push_back(dataset.x_names[col]);
  }
  return design;
}

DesignPartition subset_rows(const DesignPartition& design,
                            const std::vector<Index>& rows) {
  const Index n = design.U.rows();
  DesignPartition sub = design;
  const Index m = static_cast<Index>(rows.size());
  sub.U.resize(m, design.U.cols());
  sub.N.resize(m, design.N.cols());
  for (Index i = 0; i < m; ++i) {
    if (rows[i] < 0 || rows[i] >= n) {
      throw ValidationError("row index out of range in subset_rows");
    }
    sub.U.row(i) = design.U.row(rows[i]);
    sub.N.row(i) = design.N.row(rows[i]);
  }
  return sub;
}

OriginalScaleCoefficients original_scale_coefficients(const DesignPartition& design,
                                                      const Vector& alpha,
                                                      const Vector& beta) {
  if (alpha.size() != design.t() || beta.size() != design.q()) {
    throw ValidationError("coefficient lengths do not match the design");
  }
  const Index c = design.n_confounders;
  OriginalScaleCoefficients out;
  out.confounders = Vector::Zero(c);
  out.proteins = Vector::Zero(design.x_count);

  double intercept = alpha(0);
  for (Index j = 0; j < c; ++j) {
    out.confounders(j) = alpha(1 + j);
    intercept -= alpha(1 + j) * design.u_mean(1 + j);
  }
  for (std::size_t k = 0; k < design.hub_cols.size(); ++k) {
    const Index src = 1 + c + static_cast<Index>(k);
    const double coef = alpha(src) / design.u_scale(src);
    out.proteins(design.hub_cols[k]) = coef;
    intercept -= coef * design.u_mean(src);
  }
  for (Index j = 0; j < design.q(); ++j) {
    const double coef = beta(j) / design.n_scale(j);
    out.proteins(design.nonhub_cols[j]) = coef;
    intercept -= coef * design.n_mean(j);
  }
  out.intercept = intercept;
  return out;
}

Vector predict_response(const DesignPartition& design, const Vector& alpha,
                        const Vector& beta, const Matrix& Z, const Matrix& X) {
  if (Z.cols() != design.n_confounders || X.cols() != design.x_count) {
    throw ValidationError("prediction data does not match the design layout");
  }
  const Index n = X.rows();
  if (design.n_confounders > 0 && Z.rows() != n) {
    throw ValidationError("prediction Z/X row counts differ");
  }
  if (alpha.size() != design.t() || beta.size() != design.q()) {
    throw ValidationError("coefficient lengths do not match the design");
  }
  const Index c = design.n_confounders;
  Vector yhat = Vector::Constant(n, alpha(0));
  for (Index j = 0; j < c; ++j) {
    yhat += alpha(1 + j) * (Z.col(j).array() - design.u_mean(1 + j)).matrix();
  }
  for (std::size_t k = 0; k < design.hub_cols.size(); ++k) {
    const Index src = 1 + c + static_cast<Index>(k);
    yhat += alpha(src) *
            ((X.col(design.hub_cols[k]).array() - design.u_mean(src)) /
             design.u_scale(src))
                .matrix();
  }
  for (Index j = 0; j < design.q(); ++j) {
    yhat += beta(j) *
            ((X.col(design.nonhub_cols[j]).array() - design.n_mean(j)) /
             design.n_scale(j))
                .matrix();
  }
  return yhat;
}

}  // namespace netreg
