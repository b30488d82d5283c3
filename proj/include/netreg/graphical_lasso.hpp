#pragma once

#include "netreg/common.hpp"
#include "netreg/covariance.hpp"

namespace netreg {

/// Penalized precision-matrix estimate. The objective is the maximization
/// form log det(theta) - tr(S theta) - lambda * sum_{j != k} |theta_jk|
/// (the l1 penalty runs over off-diagonal entries only).
struct PrecisionEstimate {
  Matrix theta;
  double lambda = 0.0;
  double objective_value = 0.0;
  Index edge_count = 0;  // strict upper triangle, |theta_jk| > zero threshold
  bool converged = false;
  int iterations = 0;
  std::vector<double> objective_path;  // objective after each sweep
  // Stationarity residuals at exit (see stationarity_residuals).
  double kkt_active = 0.0;
  double kkt_inactive = 0.0;
  double kkt_diagonal = 0.0;
};

struct GlassoOptions {
  double tol = 1e-6;   // mean absolute entry change between sweeps
  int max_iter = 200;  // sweeps
};

/// Sparse precision estimation by block coordinate descent on the columns of
/// theta; each column subproblem is solved on its box-constrained lasso dual,
/// which keeps the iterate positive definite throughout. lambda == 0 requires
/// an invertible S. Non-convergence returns the last iterate flagged.
PrecisionEstimate graphical_lasso(const CovarianceEstimate& S, double lambda,
                                  const GlassoOptions& options = {});

double glasso_objective(const Matrix& theta, const Matrix& S, double lambda);

/// First-order residuals of the penalized log-likelihood at theta, with
/// W = theta^{-1}:
///   active    max over nonzero off-diagonals of |W_jk - S_jk - lambda sgn|
///   inactive  max over zero off-diagonals of |W_jk - S_jk| - lambda (can be < 0)
///   diagonal  max over |W_jj - S_jj|
struct StationarityResiduals {
  double active = 0.0;
  double inactive = 0.0;
  double diagonal = 0.0;
};

StationarityResiduals stationarity_residuals(const PrecisionEstimate& fit,
                                             const Matrix& S);

/// Partial correlations rho_jk = -theta_jk / sqrt(theta_jj theta_kk) with a
/// unit diagonal; zeros of theta map to exact zeros of rho.
struct PartialCorrelationMatrix {
  Matrix rho;
};

PartialCorrelationMatrix partial_correlations(const PrecisionEstimate& fit);

struct EbicConfig {
  double gamma = 0.5;               // 0 recovers ordinary BIC
  std::vector<double> lambda_grid;  // strictly decreasing, non-empty
};

/// -2 l(theta) + E log(n) + 4 gamma E log(p) with the unpenalized Gaussian
/// log-likelihood l(theta) = (n/2)[log det(theta) - tr(S theta)], recovered
/// from the stored objective value, and E the fit's edge count.
double ebic_score(const PrecisionEstimate& fit, Index n, Index p, double gamma);

/// Grid of `size` log-spaced values from max_{j != k} |S_jk| down to
/// min_ratio times that; the top value provably yields the fully sparse fit.
std::vector<double> default_glasso_grid(const Matrix& S, int size = 30,
                                        double min_ratio = 0.01);

struct PrecisionSelection {
  PrecisionEstimate fit;
  double chosen_lambda = 0.0;
  bool all_nonconverged = false;  // warning: every grid fit hit max_iter
  std::vector<double> lambdas;
  std::vector<double> scores;
  std::vector<Index> edge_counts;
};

/// Fits the full grid with warm starts along decreasing lambda and returns
/// the eBIC minimizer; ties break toward larger lambda (the sparser model).
PrecisionSelection select_precision_by_ebic(const Matrix& X, const EbicConfig& config,
                                            const GlassoOptions& options = {});

}  // namespace netreg
