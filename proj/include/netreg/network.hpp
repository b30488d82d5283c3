#pragma once

#include "netreg/common.hpp"
#include "netreg/graphical_lasso.hpp"

namespace netreg {

struct CentralityVector {
  Vector phi;
};

/// Split of the predictor indices into hubs (kept unpenalized downstream) and
/// non-hubs, with the parameters that produced it.
struct HubPartition {
  double delta = 0.0;
  Index tau = 0;
  Index h = 0;
  std::vector<Index> hub_indices;     // sorted ascending
  std::vector<Index> nonhub_indices;  // sorted ascending
};

/// phi[k] = sum_{j != k} |rho_jk|. The diagonal is excluded: including it
/// would add the constant 1 to every entry and cannot change any ranking.
CentralityVector degree_centrality(const PartialCorrelationMatrix& rho);

/// floor((p + 20) / 16): keeps the unpenalized block small relative to p.
Index default_tau(Index p);

/// Chooses h = min(floor(p*delta), tau) hubs with the largest centralities,
/// ties broken toward the smaller index. delta = 0 (empty hub set) is legal.
HubPartition select_hubs(const CentralityVector& phi, double delta, Index tau);

}  // namespace netreg
