#include "netreg/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace netreg {

CentralityVector degree_centrality(const PartialCorrelationMatrix& rho) {
  const Matrix& m = rho.rho;
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw ValidationError("partial-correlation matrix must be square and non-empty");
  }
  if (!m.allFinite()) {
    throw ValidationError("partial-correlation matrix contains non-finite entries");
  }
  CentralityVector out;
  out.phi = m.cwiseAbs().colwise().sum().transpose() - m.diagonal().cwiseAbs();
  return out;
}

Index default_tau(Index p) {
  if (p < 1) {
    throw ValidationError("p must be at least 1");
  }
  return (p + 20) / 16;
}

HubPartition select_hubs(const CentralityVector& phi, double delta, Index tau) {
  const Index p = phi.phi.size();
  if (p < 1) {
    throw ValidationError("centrality vector must be non-empty");
  }
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw ValidationError("delta must lie in [0, 1)");
  }
  if (tau < 0) {
    throw ValidationError("tau must be non-negative");
  }

  HubPartition part;
  part.delta = delta;
  part.tau = tau;
  part.h = std::min(static_cast<Index>(std::floor(static_cast<double>(p) * delta)),
                    tau);

  std::vector<Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (phi.phi(a) != phi.phi(b)) return phi.phi(a) > phi.phi(b);
    return a < b;  // equal centralities: smaller index wins
  });

  part.hub_indices.assign(order.begin(), order.begin() + part.h);
  part.nonhub_indices.assign(order.begin() + part.h, order.end());
  std::sort(part.hub_indices.begin(), part.hub_indices.end());
  std::sort(part.nonhub_indices.begin(), part.nonhub_indices.end());
  return part;
}

}  // namespace netreg
