#pragma once

#include "netreg/solver.hpp"

namespace netreg {

/// Floor applied to |pilot| before the ^(-nu) power so weights stay finite.
inline constexpr double kWeightFloor = 1e-6;

/// Smallest lambda_n for which the weighted-l1 fit keeps every beta_j at
/// zero: max_j 2 |N_j' r0| / w_j with r0 the least-squares residual of y on
/// U. weights == nullptr means unit weights.
double lasso_lambda_max(const DesignPartition& design, const Vector& y,
                        const Vector* weights = nullptr);

/// Default ridge perturbation for the pilot: 1e-3 times the unit-weight
/// lambda_max (small enough to leave the fit essentially an l1 path, large
/// enough to keep q > n pilots unique).
double pilot_ridge_default(const DesignPartition& design, const Vector& y);

/// Elastic-net engine call: |y - Ua - Nb|^2 + lambda2 |b|^2 + lambda1 |b|_1.
PartialFitResult perturbed_elastic_net(const DesignPartition& design, const Vector& y,
                                       double lambda1, double lambda2,
                                       const SolverOptions& options = {},
                                       const Vector* warm_beta = nullptr);

/// Pilot coefficients for the adaptive weights: elastic net with the given
/// ridge perturbation, lambda1 tuned by an internal deterministic 5-fold CV
/// (rows striped by index) over 20 log-spaced values, then refit on all rows.
Vector pilot_estimator(const DesignPartition& design, const Vector& y,
                       double ridge_perturbation);

/// w_j = max(|pilot_j|, floor)^(-nu).
Vector adaptive_weights(const Vector& pilot, double nu, double floor = kWeightFloor);

}  // namespace netreg
