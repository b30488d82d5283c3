#pragma once

#include <string>
#include <vector>

#include "netreg/common.hpp"

namespace netreg {

/// Outcome, confounders, and predictors with their column labels. Z may have
/// zero columns; X may not.
struct Dataset {
  Vector y;
  Matrix Z;
  Matrix X;
  std::vector<std::string> z_names;
  std::vector<std::string> x_names;

  Index n() const { return y.size(); }
  Index n_confounders() const { return Z.cols(); }
  Index n_predictors() const { return X.cols(); }
};

/// Rejects shape mismatches, empty predictor blocks, missing/duplicate names,
/// and non-finite entries.
void validate_dataset(const Dataset& dataset);

}  // namespace netreg
