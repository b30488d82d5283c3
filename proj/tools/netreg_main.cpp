#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "netreg/baselines.hpp"
#include "netreg/csv.hpp"
#include "netreg/pipeline.hpp"
#include "netreg/simulation.hpp"

namespace {

using netreg::Index;

struct SimulateArgs {
  Index n = 100;
  Index p = 60;
  std::string signal = "strong";
  int replicates = 100;
  int folds = 5;
  std::vector<double> deltas = {0.06};
  std::vector<std::string> methods = {"lasso", "alasso", "enet", "ridge"};
  double gamma = 0.5;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out_dir = ".";
};

int run_simulate(const SimulateArgs& args) {
  netreg::Scenario scenario = netreg::Scenario::make(
      args.n, args.p, netreg::signal_from_string(args.signal), args.seed);
  netreg::ExperimentConfig config;
  config.delta_list = args.deltas;
  for (const auto& name : args.methods) {
    config.methods.push_back(netreg::baseline_from_string(name));
  }
  config.replicates = args.replicates;
  config.folds = args.folds;
  config.gamma = args.gamma;
  config.threads = args.threads;

  const netreg::ReplicateSummary summary = netreg::run_experiment(scenario, config);
  const std::string base = args.out_dir.empty() ? "." : args.out_dir;
  std::filesystem::create_directories(base);
  netreg::write_replicate_csv(base + "/replicates.csv", summary);
  netreg::write_summary_csv(base + "/summary.csv", summary);
  netreg::write_manifest_json(base + "/manifest.json", scenario, config);

  std::cout << "wrote " << base << "/replicates.csv, summary.csv, manifest.json\n";
  for (const auto& m : summary.methods) {
    std::printf("%-16s rmse=%s f1=%s mcc=%s failures=%d\n", m.method.c_str(),
                m.rmse.mean ? std::to_string(*m.rmse.mean).c_str() : "NA",
                m.f1.mean ? std::to_string(*m.f1.mean).c_str() : "NA",
                m.mcc.mean ? std::to_string(*m.mcc.mean).c_str() : "NA",
                m.failures);
  }
  return 0;
}

struct IoArgs {
  std::string input;
  std::string outcome;
  std::vector<std::string> confounders;
  std::vector<std::string> proteins;
};

netreg::Dataset load_dataset(const IoArgs& io) {
  return netreg::ingest_csv(io.input, io.outcome, io.confounders, io.proteins);
}

struct NetworkArgs {
  IoArgs io;
  double gamma = 0.5;
  int grid_size = 30;
  double min_ratio = 0.01;
  bool no_standardize = false;
  std::string out_prefix = "network_";
};

int run_network(const NetworkArgs& args) {
  const netreg::Dataset data = load_dataset(args.io);
  netreg::NetworkGuidedOptions options;
  options.gamma = args.gamma;
  options.glasso_grid_size = args.grid_size;
  options.glasso_min_ratio = args.min_ratio;
  options.standardize = !args.no_standardize;
  const netreg::NetworkEstimate net = netreg::estimate_network(data.X, options);

  netreg::write_matrix_csv(args.out_prefix + "precision.csv", net.selection.fit.theta,
                           data.x_names);
  netreg::write_matrix_csv(args.out_prefix + "partial_correlations.csv", net.rho.rho,
                           data.x_names);
  netreg::write_vector_csv(args.out_prefix + "centrality.csv", net.centrality.phi,
                           data.x_names, "protein", "centrality");

  nlohmann::ordered_json doc;
  doc["chosen_lambda"] = net.selection.chosen_lambda;
  doc["edge_count"] = net.selection.fit.edge_count;
  doc["converged"] = net.selection.fit.converged;
  doc["all_grid_points_nonconverged"] = net.selection.all_nonconverged;
  nlohmann::ordered_json path = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < net.selection.lambdas.size(); ++i) {
    path.push_back({{"lambda", net.selection.lambdas[i]},
                    {"ebic", net.selection.scores[i]},
                    {"edges", net.selection.edge_counts[i]}});
  }
  doc["ebic_path"] = std::move(path);
  std::ofstream out(args.out_prefix + "network.json");
  if (!out) {
    throw netreg::ValidationError("cannot open output file: " + args.out_prefix +
                                  "network.json");
  }
  out << doc.dump(2) << '\n';
  std::cout << "chosen lambda " << net.selection.chosen_lambda << ", "
            << net.selection.fit.edge_count << " edges\n";
  return 0;
}

struct FitArgs {
  IoArgs io;
  std::string config_path;
  std::string report_path = "report.json";
  // flag overrides; optional so the config file wins unless given
  std::optional<double> delta;
  std::optional<double> gamma;
  std::optional<int> folds;
  std::optional<std::uint64_t> seed;
  std::optional<Index> tau;
  std::optional<double> holdout;
};

int run_fit(const FitArgs& args) {
  netreg::RunConfig config;
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) {
      throw netreg::ValidationError("cannot open config file: " + args.config_path);
    }
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw netreg::ValidationError(std::string("malformed config JSON: ") + e.what());
    }
    config = netreg::run_config_from_json(doc);
  }
  if (args.delta) config.delta = *args.delta;
  if (args.gamma) config.gamma = *args.gamma;
  if (args.folds) config.folds = *args.folds;
  if (args.seed) config.seed = *args.seed;
  if (args.tau) config.tau_override = *args.tau;
  if (args.holdout) config.holdout_fraction = *args.holdout;

  const netreg::Dataset data = load_dataset(args.io);
  const nlohmann::ordered_json report = netreg::run_pipeline(data, config);

  std::ofstream out(args.report_path);
  if (!out) {
    throw netreg::ValidationError("cannot open output file: " + args.report_path);
  }
  out << report.dump(2) << '\n';

  std::cout << "hubs: " << report["hubs"]["h"] << " of " << report["data"]["proteins"]
            << " (tau " << report["hubs"]["tau"] << ")\n"
            << "tuning: nu=" << report["model"]["nu"]
            << " lambda_n=" << report["model"]["lambda_n"] << "\n"
            << "active non-hubs: " << report["model"]["active_nonhubs"].size() << "\n"
            << "report written to " << args.report_path << "\n";
  return 0;
}

struct ReportArgs {
  std::string input;
  std::string out = "summary.csv";
};

std::optional<double> parse_optional(const std::string& cell) {
  if (cell == "NA" || cell.empty()) return std::nullopt;
  return std::stod(cell);
}

int run_report(const ReportArgs& args) {
  const netreg::CsvTable table = netreg::read_csv(args.input);
  const std::vector<std::string> expected = {"method", "setting", "replicate",
                                             "rmse",   "csl",     "f1",
                                             "mcc",    "failed",  "failure_reason"};
  if (table.header != expected) {
    throw netreg::ValidationError("unexpected replicate CSV header in " + args.input);
  }

  // group rows by setting, preserving first-seen order
  std::vector<std::string> settings;
  std::map<std::string, std::vector<netreg::ReplicateRow>> grouped;
  for (const auto& row : table.rows) {
    const std::string& setting = row[1];
    if (grouped.find(setting) == grouped.end()) settings.push_back(setting);
    netreg::ReplicateRow r;
    r.method = row[0];
    r.replicate = std::stoi(row[2]);
    r.failed = row[7] == "1";
    if (!r.failed) {
      const auto rmse = parse_optional(row[3]);
      if (!rmse) {
        throw netreg::ValidationError("missing rmse in non-failed row of " +
                                      args.input);
      }
      r.metrics.rmse = *rmse;
      r.metrics.csl = parse_optional(row[4]);
      r.metrics.f1 = parse_optional(row[5]);
      r.metrics.mcc = parse_optional(row[6]);
    } else {
      r.failure_reason = row[8];
    }
    grouped[setting].push_back(std::move(r));
  }

  std::ofstream out(args.out);
  if (!out) {
    throw netreg::ValidationError("cannot open output file: " + args.out);
  }
  out << "method,setting,replicates,failures,"
         "rmse_mean,rmse_sd,rmse_count,csl_mean,csl_sd,csl_count,"
         "f1_mean,f1_sd,f1_count,mcc_mean,mcc_sd,mcc_count\n";
  const auto fmt = [](const std::optional<double>& v) {
    if (!v) return std::string("NA");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", *v);
    return std::string(buf);
  };
  for (const auto& setting : settings) {
    for (const auto& m : netreg::aggregate_rows(grouped[setting])) {
      out << m.method << ',' << setting << ',' << m.attempted << ',' << m.failures;
      for (const netreg::MetricAggregate* agg : {&m.rmse, &m.csl, &m.f1, &m.mcc}) {
        out << ',' << fmt(agg->mean) << ',' << fmt(agg->sd) << ',' << agg->count;
      }
      out << '\n';
    }
  }
  std::cout << "wrote " << args.out << "\n";
  return 0;
}

void add_io_options(CLI::App* cmd, IoArgs& io) {
  cmd->add_option("--input", io.input, "input CSV file")->required();
  cmd->add_option("--outcome", io.outcome, "outcome column name")->required();
  cmd->add_option("--confounders", io.confounders,
                  "confounder column names (comma separated)")
      ->delimiter(',');
  cmd->add_option("--proteins", io.proteins,
                  "protein column names (comma separated); default: all others")
      ->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"network-guided penalized regression"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "run the simulation benchmark");
  simulate->add_option("--n", sim.n, "training rows");
  simulate->add_option("--p", sim.p, "predictors");
  simulate->add_option("--signal", sim.signal, "strong|weak")
      ->check(CLI::IsMember({"strong", "weak"}));
  simulate->add_option("--replicates", sim.replicates, "replicate count");
  simulate->add_option("--folds", sim.folds, "CV folds (5 or 10)");
  simulate->add_option("--delta", sim.deltas, "hub fraction(s)")->delimiter(',');
  simulate->add_option("--methods", sim.methods,
                       "baselines: lasso,alasso,enet,ridge (comma separated)")
      ->delimiter(',');
  simulate->add_option("--gamma", sim.gamma, "eBIC gamma");
  simulate->add_option("--seed", sim.seed, "master seed");
  simulate->add_option("--threads", sim.threads,
                       "replicate pool size (0: NETREG_THREADS or hardware)");
  simulate->add_option("--out-dir", sim.out_dir, "output directory");

  NetworkArgs net;
  CLI::App* network = app.add_subcommand("network", "estimate the predictor network");
  add_io_options(network, net.io);
  network->add_option("--gamma", net.gamma, "eBIC gamma");
  network->add_option("--glasso-grid-size", net.grid_size, "lambda grid size");
  network->add_option("--glasso-min-ratio", net.min_ratio, "grid bottom ratio");
  network->add_flag("--no-standardize", net.no_standardize,
                    "use the raw covariance instead of correlations");
  network->add_option("--out-prefix", net.out_prefix, "output file prefix");

  FitArgs fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "run the full analysis pipeline");
  add_io_options(fit_cmd, fit.io);
  fit_cmd->add_option("--config", fit.config_path, "JSON config file");
  fit_cmd->add_option("--report", fit.report_path, "output report path");
  fit_cmd->add_option("--delta", fit.delta, "hub fraction");
  fit_cmd->add_option("--gamma", fit.gamma, "eBIC gamma");
  fit_cmd->add_option("--folds", fit.folds, "CV folds (5 or 10)");
  fit_cmd->add_option("--seed", fit.seed, "seed");
  fit_cmd->add_option("--tau", fit.tau, "hub cap override");
  fit_cmd->add_option("--holdout", fit.holdout, "held-out fraction in [0,1)");

  ReportArgs rep;
  CLI::App* report = app.add_subcommand("report", "aggregate a replicate CSV");
  report->add_option("--input", rep.input, "replicate-level CSV")->required();
  report->add_option("--out", rep.out, "output summary CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (network->parsed()) return run_network(net);
    if (fit_cmd->parsed()) return run_fit(fit);
    if (report->parsed()) return run_report(rep);
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const netreg::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const netreg::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 3;
  }
}
