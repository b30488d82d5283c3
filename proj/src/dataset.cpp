#include "netreg/dataset.hpp"

#include <unordered_set>

namespace netreg {

void validate_dataset(const Dataset& dataset) {
  const Index n = dataset.y.size();
  if (n < 1) {
    throw ValidationError("dataset has no rows");
  }
  if (dataset.X.cols() < 1) {
    throw ValidationError("dataset has no predictor columns");
  }
  if (dataset.X.rows() != n) {
    throw ValidationError("X row count does not match outcome length");
  }
  if (dataset.Z.cols() > 0 && dataset.Z.rows() != n) {
    throw ValidationError("Z row count does not match outcome length");
  }
  if (static_cast<Index>(dataset.z_names.size()) != dataset.Z.cols()) {
    throw ValidationError("confounder name count does not match Z columns");
  }
  if (static_cast<Index>(dataset.x_names.size()) != dataset.X.cols()) {
    throw ValidationError("predictor name count does not match X columns");
  }
  if (!dataset.y.allFinite() || !dataset.X.allFinite() ||
      (dataset.Z.size() > 0 && !dataset.Z.allFinite())) {
    throw ValidationError("dataset contains non-finite entries");
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : dataset.z_names) {
    if (!seen.insert(name).second) {
      throw ValidationError("duplicate column name: " + name);
    }
  }
  for (const auto& name : dataset.x_names) {
    if (!seen.insert(name).second) {
      throw ValidationError("duplicate column name: " + name);
    }
  }
}

}  // namespace netreg
