#include "netreg/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <nlohmann/json.hpp>

namespace netreg {

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

double RandomStream::bernoulli(double p) { return uniform() < p ? 1.0 : 0.0; }

std::string to_string(SignalType signal) {
  return signal == SignalType::strong ? "strong" : "weak";
}

SignalType signal_from_string(const std::string& name) {
  if (name == "strong") return SignalType::strong;
  if (name == "weak") return SignalType::weak;
  throw ValidationError("unknown signal type: " + name);
}

Matrix build_covariance(Index p) {
  if (p < 5) {
    throw ValidationError("covariance rule requires p >= 5");
  }
  Matrix sigma(p, p);
  for (Index j = 0; j < p; ++j) {
    for (Index k = 0; k < p; ++k) {
      if (j == k) {
        sigma(j, k) = 1.0;
      } else if (j < 4 && k < 4) {
        sigma(j, k) = 0.9;
      } else {
        sigma(j, k) = std::pow(0.9, std::abs(static_cast<double>(j - k)));
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= 1e-8) {
    sigma = repair_correlation(sigma, 1e-8);
  }
  return sigma;
}

Vector signal_eta(SignalType signal, Index p) {
  if (signal == SignalType::strong) {
    if (p < 15) {
      throw ValidationError("strong signal requires p >= 15");
    }
    Vector eta = Vector::Zero(p);
    eta.segment(0, 5).setConstant(3.5);
    eta.segment(10, 5).setConstant(-1.5);
    return eta;
  }
  if (p < 8) {
    throw ValidationError("weak signal requires p >= 8");
  }
  Vector eta = Vector::Zero(p);
  eta(0) = 1.0;
  eta(1) = -0.8;
  eta(2) = 0.6;
  eta(5) = -1.5;
  eta(6) = -0.5;
  eta(7) = 1.2;
  return eta;
}

Scenario Scenario::make(Index n, Index p, SignalType signal, std::uint64_t seed) {
  if (n < 1) {
    throw ValidationError("scenario requires n >= 1");
  }
  Scenario sc;
  sc.n = n;
  sc.p = p;
  sc.signal = signal;
  sc.zeta = Vector::Constant(3, 2.5);
  sc.eta = signal_eta(signal, p);
  sc.covariance = build_covariance(p);
  sc.seed = seed;
  return sc;
}

namespace {

void validate_scenario(const Scenario& sc) {
  if (sc.n < 1 || sc.p < 1) {
    throw ValidationError("scenario dimensions must be positive");
  }
  if (sc.zeta.size() != 3) {
    throw ValidationError("scenario zeta must have length 3");
  }
  if (sc.eta.size() != sc.p) {
    throw ValidationError("scenario eta length must equal p");
  }
  if (sc.covariance.rows() != sc.p || sc.covariance.cols() != sc.p) {
    throw ValidationError("scenario covariance must be p x p");
  }
  if (!(sc.sigma >= 0.0)) {
    throw ValidationError("scenario sigma must be non-negative");
  }
}

// Fixed draw order: Z columns, then X rows, then the noise vector.
Dataset draw_dataset(const Scenario& sc, Index rows, const Matrix& chol_lower,
                     RandomStream& rng) {
  Dataset data;
  data.Z.resize(rows, 3);
  for (Index i = 0; i < rows; ++i) data.Z(i, 0) = rng.uniform();
  for (Index i = 0; i < rows; ++i) data.Z(i, 1) = rng.bernoulli(0.25);
  for (Index i = 0; i < rows; ++i) data.Z(i, 2) = rng.bernoulli(0.65);

  data.X.resize(rows, sc.p);
  Vector g(sc.p);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < sc.p; ++j) g(j) = rng.normal();
    data.X.row(i) = (chol_lower * g).transpose();
  }

  Vector eps(rows);
  for (Index i = 0; i < rows; ++i) eps(i) = rng.normal();

  data.y = Vector::Constant(rows, sc.mu) + data.Z * sc.zeta + data.X * sc.eta +
           sc.sigma * eps;
  data.z_names = {"Z1", "Z2", "Z3"};
  data.x_names.reserve(sc.p);
  for (Index j = 0; j < sc.p; ++j) {
    data.x_names.push_back("X" + std::to_string(j + 1));
  }
  return data;
}

Matrix covariance_factor(const Scenario& sc) {
  Eigen::LLT<Matrix> llt(sc.covariance);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("scenario covariance is not positive definite");
  }
  return llt.matrixL();
}

}  // namespace

Dataset generate_dataset(const Scenario& scenario) {
  validate_scenario(scenario);
  const Matrix L = covariance_factor(scenario);
  RandomStream rng(mix_seed(scenario.seed, 0));
  return draw_dataset(scenario, scenario.n, L, rng);
}

ReplicatePair generate_pair(const Scenario& scenario) {
  validate_scenario(scenario);
  const Matrix L = covariance_factor(scenario);
  ReplicatePair pair;
  {
    RandomStream rng(mix_seed(scenario.seed, 0));
    pair.train = draw_dataset(scenario, scenario.n, L, rng);
  }
  {
    RandomStream rng(mix_seed(scenario.seed, 1));
    pair.test = draw_dataset(scenario, kTestSetSize, L, rng);
  }
  pair.test_signal = Vector::Constant(kTestSetSize, scenario.mu) +
                     pair.test.Z * scenario.zeta + pair.test.X * scenario.eta;
  return pair;
}

MetricsReport evaluate_predictions(const Vector& y_test, const Vector& y_pred,
                                   const Vector& protein_coefs, const Vector& eta) {
  MetricsReport report;
  report.rmse = rmse(y_test, y_pred);
  report.csl = calibration_slope(y_test, y_pred);
  const ConfusionCounts counts = selection_confusion(protein_coefs, eta);
  report.f1 = f1_score(counts);
  report.mcc = mcc(counts);
  return report;
}

std::vector<MethodSummary> aggregate_rows(const std::vector<ReplicateRow>& rows) {
  std::vector<MethodSummary> out;
  auto find = [&](const std::string& method) -> MethodSummary& {
    for (auto& m : out) {
      if (m.method == method) return m;
    }
    out.push_back(MethodSummary{});
    out.back().method = method;
    return out.back();
  };

  struct Acc {
    std::vector<double> rmse, csl, f1, mcc;
  };
  std::vector<Acc> accs;

  for (const auto& row : rows) {
    MethodSummary& m = find(row.method);
    const std::size_t idx = static_cast<std::size_t>(&m - out.data());
    if (accs.size() < out.size()) accs.resize(out.size());
    ++m.attempted;
    if (row.failed) {
      ++m.failures;
      continue;
    }
    Acc& acc = accs[idx];
    acc.rmse.push_back(row.metrics.rmse);
    if (row.metrics.csl) acc.csl.push_back(*row.metrics.csl);
    if (row.metrics.f1) acc.f1.push_back(*row.metrics.f1);
    if (row.metrics.mcc) acc.mcc.push_back(*row.metrics.mcc);
  }

  auto summarize = [](const std::vector<double>& values) {
    MetricAggregate agg;
    agg.count = static_cast<int>(values.size());
    if (values.empty()) return agg;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= values.size();
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    agg.mean = mean;
    agg.sd = values.size() > 1 ? std::sqrt(ss / (values.size() - 1)) : 0.0;
    return agg;
  };

  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].rmse = summarize(accs[i].rmse);
    out[i].csl = summarize(accs[i].csl);
    out[i].f1 = summarize(accs[i].f1);
    out[i].mcc = summarize(accs[i].mcc);
  }
  return out;
}

namespace {

std::string ng_label(double delta) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "ng(delta=%g)", delta);
  return buf;
}

int resolve_threads(int requested, int replicates) {
  int threads = requested;
  if (threads <= 0) {
    if (const char* env = std::getenv("NETREG_THREADS")) {
      threads = std::atoi(env);
    }
  }
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
  }
  if (threads <= 0) threads = 1;
  return std::min(threads, std::max(1, replicates));
}

}  // namespace

ReplicateSummary run_experiment(const Scenario& scenario,
                                const ExperimentConfig& config) {
  validate_scenario(scenario);
  if (config.replicates < 1) {
    throw ValidationError("replicates must be at least 1");
  }
  if (config.folds != 5 && config.folds != 10) {
    throw ValidationError("folds must be 5 or 10");
  }
  for (double delta : config.delta_list) {
    if (!(delta >= 0.0 && delta < 1.0)) {
      throw ValidationError("delta values must lie in [0, 1)");
    }
  }
  if (config.delta_list.empty() && config.methods.empty()) {
    throw ValidationError("nothing to run: no deltas and no baseline methods");
  }

  std::vector<std::string> labels;
  for (double delta : config.delta_list) labels.push_back(ng_label(delta));
  for (BaselineMethod m : config.methods) labels.push_back(to_string(m));
  const std::size_t methods_per_rep = labels.size();

  std::vector<std::vector<ReplicateRow>> per_rep(config.replicates);

  auto run_replicate = [&](int rep) {
    std::vector<ReplicateRow>& rows = per_rep[rep];
    rows.resize(methods_per_rep);
    for (std::size_t m = 0; m < methods_per_rep; ++m) {
      rows[m].method = labels[m];
      rows[m].replicate = rep + 1;
    }

    const std::uint64_t rep_seed = mix_seed(scenario.seed, static_cast<std::uint64_t>(rep + 1));
    Scenario local = scenario;
    local.seed = rep_seed;

    ReplicatePair pair;
    try {
      pair = generate_pair(local);
    } catch (const std::exception& e) {
      for (auto& row : rows) {
        row.failed = true;
        row.failure_reason = std::string("data generation: ") + e.what();
      }
      return;
    }

    NetworkGuidedOptions base;
    base.gamma = config.gamma;
    base.glasso_grid_size = config.glasso_grid_size;
    base.glasso_min_ratio = config.glasso_min_ratio;
    base.lambda_grid_size = config.lambda_grid_size;
    base.lambda_min_ratio = config.lambda_min_ratio;
    base.nu_grid = config.nu_grid;
    base.folds = config.folds;
    base.glasso = config.glasso;
    base.solver = config.solver;

    NetworkEstimate network;
    bool network_ok = false;
    std::string network_error;
    if (!config.delta_list.empty()) {
      try {
        network = estimate_network(pair.train.X, base);
        network_ok = true;
        if (!network.selection.fit.converged) {
          network_ok = false;
          network_error = "graphical lasso did not converge at the chosen lambda";
        }
      } catch (const std::exception& e) {
        network_error = std::string("network estimation: ") + e.what();
      }
    }

    for (std::size_t d = 0; d < config.delta_list.size(); ++d) {
      ReplicateRow& row = rows[d];
      if (!network_ok) {
        row.failed = true;
        row.failure_reason = network_error;
        continue;
      }
      try {
        NetworkGuidedOptions opts = base;
        opts.delta = config.delta_list[d];
        opts.seed = mix_seed(rep_seed, 10 + static_cast<std::uint64_t>(d));
        const NetworkGuidedFit fit = fit_with_network(pair.train, network, opts);
        if (!fit.cv.refit.converged) {
          row.failed = true;
          row.failure_reason = "refit did not converge";
          continue;
        }
        const Vector pred = predict_response(fit.design, fit.cv.refit.alpha,
                                             fit.cv.refit.beta, pair.test.Z,
                                             pair.test.X);
        const OriginalScaleCoefficients coefs = original_scale_coefficients(
            fit.design, fit.cv.refit.alpha, fit.cv.refit.beta);
        row.metrics =
            evaluate_predictions(pair.test_signal, pred, coefs.proteins, local.eta);
      } catch (const std::exception& e) {
        row.failed = true;
        row.failure_reason = e.what();
      }
    }

    for (std::size_t m = 0; m < config.methods.size(); ++m) {
      ReplicateRow& row = rows[config.delta_list.size() + m];
      try {
        BaselineConfig bc;
        bc.lambda_grid_size = config.lambda_grid_size;
        bc.lambda_min_ratio = config.lambda_min_ratio;
        bc.nu_grid = config.nu_grid;
        bc.solver = config.solver;
        const BaselineFit bl = fit_baseline_detailed(
            config.methods[m], pair.train, config.folds,
            mix_seed(rep_seed, 1000 + static_cast<std::uint64_t>(m)), bc);
        if (!bl.fit.converged) {
          row.failed = true;
          row.failure_reason = "baseline fit did not converge";
          continue;
        }
        const Vector pred = predict_response(bl.design, bl.fit.alpha, bl.fit.beta,
                                             pair.test.Z, pair.test.X);
        const OriginalScaleCoefficients coefs =
            original_scale_coefficients(bl.design, bl.fit.alpha, bl.fit.beta);
        row.metrics =
            evaluate_predictions(pair.test_signal, pred, coefs.proteins, local.eta);
      } catch (const std::exception& e) {
        row.failed = true;
        row.failure_reason = e.what();
      }
    }
  };

  const int threads = resolve_threads(config.threads, config.replicates);
  if (threads <= 1) {
    for (int rep = 0; rep < config.replicates; ++rep) run_replicate(rep);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (int rep = next.fetch_add(1); rep < config.replicates;
             rep = next.fetch_add(1)) {
          run_replicate(rep);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  ReplicateSummary summary;
  summary.n = scenario.n;
  summary.p = scenario.p;
  summary.signal = to_string(scenario.signal);
  summary.seed = scenario.seed;
  summary.folds = config.folds;
  summary.replicates = config.replicates;
  for (const auto& rep_rows : per_rep) {
    summary.rows.insert(summary.rows.end(), rep_rows.begin(), rep_rows.end());
  }
  summary.methods = aggregate_rows(summary.rows);
  return summary;
}

namespace {

std::string format_g(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

std::string format_opt(const std::optional<double>& value) {
  return value ? format_g(*value) : "NA";
}

std::string setting_label(const ReplicateSummary& summary) {
  return "n=" + std::to_string(summary.n) + ";p=" + std::to_string(summary.p) +
         ";" + summary.signal;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot open output file: " + path);
  }
  return out;
}

}  // namespace

void write_replicate_csv(const std::string& path, const ReplicateSummary& summary) {
  std::ofstream out = open_output(path);
  out << "method,setting,replicate,rmse,csl,f1,mcc,failed,failure_reason\n";
  const std::string setting = setting_label(summary);
  for (const auto& row : summary.rows) {
    out << row.method << ',' << setting << ',' << row.replicate << ',';
    if (row.failed) {
      out << "NA,NA,NA,NA,1," << row.failure_reason << '\n';
    } else {
      out << format_g(row.metrics.rmse) << ',' << format_opt(row.metrics.csl) << ','
          << format_opt(row.metrics.f1) << ',' << format_opt(row.metrics.mcc)
          << ",0,\n";
    }
  }
}

void write_summary_csv(const std::string& path, const ReplicateSummary& summary) {
  std::ofstream out = open_output(path);
  out << "method,setting,replicates,failures,"
         "rmse_mean,rmse_sd,rmse_count,csl_mean,csl_sd,csl_count,"
         "f1_mean,f1_sd,f1_count,mcc_mean,mcc_sd,mcc_count\n";
  const std::string setting = setting_label(summary);
  for (const auto& m : summary.methods) {
    out << m.method << ',' << setting << ',' << m.attempted << ',' << m.failures;
    for (const MetricAggregate* agg : {&m.rmse, &m.csl, &m.f1, &m.mcc}) {
      out << ',' << format_opt(agg->mean) << ',' << format_opt(agg->sd) << ','
          << agg->count;
    }
    out << '\n';
  }
}

void write_manifest_json(const std::string& path, const Scenario& scenario,
                         const ExperimentConfig& config) {
  nlohmann::ordered_json doc;
  doc["tool"] = "netreg";
  doc["scenario"] = {
      {"n", scenario.n},
      {"p", scenario.p},
      {"signal", to_string(scenario.signal)},
      {"sigma", scenario.sigma},
      {"mu", scenario.mu},
      {"zeta", std::vector<double>(scenario.zeta.data(),
                                   scenario.zeta.data() + scenario.zeta.size())},
      {"eta", std::vector<double>(scenario.eta.data(),
                                  scenario.eta.data() + scenario.eta.size())},
      {"seed", scenario.seed},
      {"test_size", kTestSetSize},
  };
  std::vector<std::string> methods;
  for (BaselineMethod m : config.methods) methods.push_back(to_string(m));
  doc["config"] = {
      {"delta_list", config.delta_list},
      {"methods", methods},
      {"replicates", config.replicates},
      {"folds", config.folds},
      {"gamma", config.gamma},
      {"nu_grid", config.nu_grid},
      {"lambda_grid_size", config.lambda_grid_size},
      {"lambda_min_ratio", config.lambda_min_ratio},
      {"glasso_grid_size", config.glasso_grid_size},
      {"glasso_min_ratio", config.glasso_min_ratio},
      {"glasso_tol", config.glasso.tol},
      {"glasso_max_iter", config.glasso.max_iter},
      {"solver_tol", config.solver.tol},
      {"solver_max_iter", config.solver.max_iter},
  };
  std::ofstream out = open_output(path);
  out << doc.dump(2) << '\n';
}

}  // namespace netreg
