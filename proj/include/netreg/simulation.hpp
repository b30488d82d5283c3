#pragma once

#include <optional>
#include <random>
#include <string>

#include "netreg/baselines.hpp"
#include "netreg/metrics.hpp"
#include "netreg/ng_fit.hpp"

namespace netreg {

/// Deterministic draw stream with pinned transforms (uniform from the top 53
/// bits, normal by Box-Muller) so generated data does not depend on the
/// standard library's distribution implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  double uniform();            // [0, 1)
  double normal();             // standard normal
  double bernoulli(double p);  // 0.0 or 1.0
 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

enum class SignalType { strong, weak };

std::string to_string(SignalType signal);
SignalType signal_from_string(const std::string& name);

struct Scenario {
  Index n = 0;
  Index p = 0;
  SignalType signal = SignalType::strong;
  double sigma = 1.0;
  double mu = 0.5;
  Vector zeta;       // (2.5, 2.5, 2.5)
  Vector eta;        // per signal pattern
  Matrix covariance; // equicorrelated head block + AR(1) tail, PD-repaired
  std::uint64_t seed = 0;

  static Scenario make(Index n, Index p, SignalType signal, std::uint64_t seed);
};

/// Sigma_jk = 1 on the diagonal, 0.9 when both indices are in the first
/// four, 0.9^|j-k| otherwise; eigenvalues clipped at 1e-8 and the matrix
/// rescaled to unit diagonal if that head block ever breaks definiteness.
Matrix build_covariance(Index p);

/// Strong: (3.5 x5, 0 x5, -1.5 x5, 0...); weak: (1, -0.8, 0.6, 0, 0, -1.5,
/// -0.5, 1.2, 0...).
Vector signal_eta(SignalType signal, Index p);

/// Train set of scenario.n rows from one seeded stream; generate_pair adds
/// the independent 1000-row test set from a second, disjoint stream.
Dataset generate_dataset(const Scenario& scenario);

/// test_signal carries the noiseless mean mu + Z*zeta + X*eta of the test
/// rows: benchmark RMSE/CSL measure recovery of the signal, not the
/// irreducible noise (the paper-scale RMSE values sit well below sigma).
struct ReplicatePair {
  Dataset train;
  Dataset test;
  Vector test_signal;
};
ReplicatePair generate_pair(const Scenario& scenario);
inline constexpr Index kTestSetSize = 1000;

struct ExperimentConfig {
  std::vector<double> delta_list;        // network-guided variants
  std::vector<BaselineMethod> methods;   // baselines to include
  int replicates = 100;
  int folds = 5;
  double gamma = 0.5;
  std::vector<double> nu_grid = {0.5, 1.0, 2.0};
  int lambda_grid_size = 50;
  double lambda_min_ratio = 1e-3;
  int glasso_grid_size = 30;
  double glasso_min_ratio = 0.01;
  GlassoOptions glasso;
  SolverOptions solver;
  int threads = 0;  // 0: NETREG_THREADS env var, else hardware concurrency
};

struct ReplicateRow {
  std::string method;
  int replicate = 0;  // 1-based
  MetricsReport metrics;
  bool failed = false;
  std::string failure_reason;
};

struct MetricAggregate {
  std::optional<double> mean;
  std::optional<double> sd;  // sample SD (n-1); zero when count == 1
  int count = 0;             // rows where the metric was defined
};

struct MethodSummary {
  std::string method;
  int attempted = 0;
  int failures = 0;
  MetricAggregate rmse, csl, f1, mcc;
};

struct ReplicateSummary {
  Index n = 0;
  Index p = 0;
  std::string signal;
  std::uint64_t seed = 0;
  int folds = 0;
  int replicates = 0;
  std::vector<ReplicateRow> rows;         // replicate-major, fixed method order
  std::vector<MethodSummary> methods;
};

/// Mean/SD per method over rows where each metric is defined; failed rows are
/// excluded and counted.
std::vector<MethodSummary> aggregate_rows(const std::vector<ReplicateRow>& rows);

/// Runs `replicates` independent train/test draws; each replicate estimates
/// the network once, fits NG at every delta in delta_list, fits each
/// baseline, and scores on the test set. Deterministic per-replicate seeds
/// come from (scenario.seed, replicate index); rows are ordered independent
/// of thread scheduling.
ReplicateSummary run_experiment(const Scenario& scenario, const ExperimentConfig& config);

/// Selection metrics compare original-scale protein coefficients against the
/// scenario's eta over all p columns (hub coefficients count as selected).
MetricsReport evaluate_predictions(const Vector& y_test, const Vector& y_pred,
                                   const Vector& protein_coefs, const Vector& eta);

void write_replicate_csv(const std::string& path, const ReplicateSummary& summary);
void write_summary_csv(const std::string& path, const ReplicateSummary& summary);
void write_manifest_json(const std::string& path, const Scenario& scenario,
                         const ExperimentConfig& config);

}  // namespace netreg
