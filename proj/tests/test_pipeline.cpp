#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>
#include <set>

#include "netreg/pipeline.hpp"
#include "netreg/simulation.hpp"
#include "oracles.hpp"

using namespace netreg;
using nlohmann::json;

namespace {

/// Small fixture: 3 confounders, 16 predictors, strong signal.
Dataset small_fixture(std::uint64_t seed = 60) {
  return generate_dataset(Scenario::make(60, 16, SignalType::strong, seed));
}

/// Fast single-point-grid config for composition/determinism checks.
RunConfig fast_config() {
  RunConfig config;
  config.glasso_grid_size = 3;
  config.lambda_grid_size = 10;
  config.nu_grid = {1.0};
  config.seed = 9;
  return config;
}

json strip_timestamp(json doc) {
  doc.erase("timestamp");
  return doc;
}

}  // namespace

TEST_CASE("config: defaults, round trip, and the unknown-key guard") {
  const RunConfig defaults = run_config_from_json(json::object());
  CHECK(defaults.delta == 0.02);
  CHECK_FALSE(defaults.tau_override.has_value());
  CHECK(defaults.gamma == 0.5);
  CHECK(defaults.folds == 5);
  CHECK(defaults.nu_grid == std::vector<double>{0.5, 1.0, 2.0});
  CHECK(defaults.lambda_grid.empty());
  CHECK(defaults.lambda_grid_size == 50);
  CHECK(defaults.lambda_min_ratio == 1e-3);
  CHECK(defaults.glasso_grid_size == 30);
  CHECK(defaults.glasso_min_ratio == 0.01);
  CHECK(defaults.seed == 1);
  CHECK(defaults.standardize);
  CHECK(defaults.holdout_fraction == 0.0);

  RunConfig custom;
  custom.delta = 0.06;
  custom.tau_override = 4;
  custom.gamma = 0.25;
  custom.folds = 10;
  custom.nu_grid = {1.0};
  custom.lambda_grid = {2.0, 1.0, 0.5};
  custom.glasso_lambda_grid = {0.3};
  custom.seed = 1234;
  custom.standardize = false;
  custom.holdout_fraction = 0.2;
  custom.glasso.tol = 1e-7;
  custom.solver.max_iter = 900;
  const RunConfig back = run_config_from_json(run_config_to_json(custom));
  CHECK(back.delta == custom.delta);
  CHECK(back.tau_override == custom.tau_override);
  CHECK(back.gamma == custom.gamma);
  CHECK(back.folds == custom.folds);
  CHECK(back.nu_grid == custom.nu_grid);
  CHECK(back.lambda_grid == custom.lambda_grid);
  CHECK(back.glasso_lambda_grid == custom.glasso_lambda_grid);
  CHECK(back.seed == custom.seed);
  CHECK(back.standardize == custom.standardize);
  CHECK(back.holdout_fraction == custom.holdout_fraction);
  CHECK(back.glasso.tol == custom.glasso.tol);
  CHECK(back.solver.max_iter == custom.solver.max_iter);

  CHECK_THROWS_AS(run_config_from_json(json{{"detla", 0.02}}), ValidationError);
  try {
    run_config_from_json(json{{"detla", 0.02}});
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()) == "unknown config key: detla");
  }
  CHECK_THROWS_AS(run_config_from_json(json{{"folds", 7}}), ValidationError);
  CHECK_THROWS_AS(run_config_from_json(json{{"gamma", 1.5}}), ValidationError);
  CHECK_THROWS_AS(run_config_from_json(json{{"delta", 1.0}}), ValidationError);
  CHECK_THROWS_AS(run_config_from_json(json{{"holdout_fraction", 1.0}}),
                  ValidationError);
}

TEST_CASE("report structure carries every documented section") {
  const Dataset data = small_fixture();
  const json report = run_pipeline(data, fast_config());

  REQUIRE(report.contains("timestamp"));
  REQUIRE(report.contains("config"));
  REQUIRE(report.contains("data"));
  REQUIRE(report.contains("network"));
  REQUIRE(report.contains("hubs"));
  REQUIRE(report.contains("model"));
  REQUIRE(report.contains("evaluation"));

  CHECK(report["data"]["rows_total"] == 60);
  CHECK(report["data"]["rows_fit"] == 60);
  CHECK(report["data"]["rows_holdout"] == 0);
  CHECK(report["data"]["proteins"] == 16);
  CHECK(report["data"]["confounders"] ==
        std::vector<std::string>{"Z1", "Z2", "Z3"});

  const auto& network = report["network"];
  CHECK(network["converged"].is_boolean());
  CHECK(network["chosen_lambda"].is_number());
  CHECK(network["edge_count"].is_number_integer());
  REQUIRE(network["ebic_path"].is_array());
  CHECK(network["ebic_path"].size() == 3);
  for (const auto& point : network["ebic_path"]) {
    CHECK(point.contains("lambda"));
    CHECK(point.contains("ebic"));
    CHECK(point.contains("edges"));
  }

  const auto& hubs = report["hubs"];
  CHECK(hubs["delta"] == 0.02);
  CHECK(hubs["tau"] == 2);        // floor((16 + 20) / 16)
  CHECK(hubs["h"] == 0);          // floor(16 * 0.02) = 0
  CHECK(hubs["members"].empty());
  CHECK(hubs["nonhub_count"] == 16);

  const auto& model = report["model"];
  CHECK(model["folds"] == 5);
  CHECK(model["converged"] == true);
  REQUIRE(model["coefficients"]["proteins"].size() == 16);
  const auto& first = model["coefficients"]["proteins"][0];
  CHECK(first.contains("name"));
  CHECK(first.contains("estimate"));
  CHECK(first.contains("hub"));
  CHECK(first.contains("active"));
  REQUIRE(model["coefficients"]["confounders"].size() == 3);
  CHECK(model["kkt"]["gradient_u"].is_number());
  CHECK(model["kkt"]["active"].is_number());
  CHECK(model["kkt"]["inactive"].is_number());
  CHECK(model["cv_curve"].size() == 10);  // one nu, ten lambdas

  CHECK(report["evaluation"]["train"]["rmse"].is_number());
  CHECK(report["evaluation"]["train"]["csl"].is_number());
  CHECK_FALSE(report["evaluation"].contains("holdout"));
}

TEST_CASE("reports are byte-identical apart from the timestamp") {
  const Dataset data = small_fixture();
  const json a = run_pipeline(data, fast_config());
  const json b = run_pipeline(data, fast_config());
  CHECK(strip_timestamp(a).dump() == strip_timestamp(b).dump());

  RunConfig other = fast_config();
  other.seed = 10;
  const json c = run_pipeline(data, other);
  CHECK(strip_timestamp(a).dump() != strip_timestamp(c).dump());
}

TEST_CASE("report agrees with composing the modules by hand") {
  // Single-point tuning grids pin every choice, so the report must coincide
  // with running the modules individually in sequence.
  const Dataset data = small_fixture();
  RunConfig config;
  config.glasso_lambda_grid = {0.5};
  config.lambda_grid = {0.8};
  config.nu_grid = {1.0};
  config.delta = 0.1;  // floor(16 * 0.1) = 1 hub
  config.seed = 21;
  const json report = run_pipeline(data, config);
  CHECK(report["hubs"]["h"] == 1);

  const NetworkGuidedFit manual = fit_network_guided(data, config.to_options());
  CHECK(report["network"]["edge_count"].get<Index>() ==
        manual.network_edges);
  CHECK(report["network"]["chosen_lambda"].get<double>() ==
        doctest::Approx(manual.network_lambda).epsilon(1e-15));
  CHECK(report["model"]["nu"].get<double>() == manual.cv.chosen.nu);
  CHECK(report["model"]["lambda_n"].get<double>() == manual.cv.chosen.lambda_n);

  const OriginalScaleCoefficients coefs = original_scale_coefficients(
      manual.design, manual.cv.refit.alpha, manual.cv.refit.beta);
  const auto& proteins = report["model"]["coefficients"]["proteins"];
  for (Index j = 0; j < 16; ++j) {
    CHECK(proteins[static_cast<std::size_t>(j)]["estimate"].get<double>() ==
          doctest::Approx(coefs.proteins(j)).epsilon(1e-15));
  }
  CHECK(report["model"]["coefficients"]["intercept"].get<double>() ==
        doctest::Approx(coefs.intercept).epsilon(1e-15));
}

TEST_CASE("hub counts at p = 337 follow the delta rule") {
  // 108 rows, 337 predictors; a fixed one-point network grid keeps the GGM
  // stage to a single fit. h = min(floor(337 delta), tau = 22).
  std::mt19937_64 rng(337);
  const Matrix X = oracles::random_matrix(108, 337, rng);
  const Matrix Z = oracles::random_matrix(108, 0, rng);
  Vector y = X.col(0) - X.col(5) + oracles::random_vector(108, rng);
  const Dataset data = oracles::make_dataset(y, Z, X);

  RunConfig config;
  config.glasso_lambda_grid = {0.4};
  config.lambda_grid = {50.0, 5.0};
  config.nu_grid = {1.0};
  config.seed = 44;

  config.delta = 0.03;
  const json at_3pct = run_pipeline(data, config);
  CHECK(at_3pct["hubs"]["tau"] == 22);
  CHECK(at_3pct["hubs"]["h"] == 10);
  REQUIRE(at_3pct["hubs"]["members"].size() == 10);

  config.delta = 0.01;
  const json at_1pct = run_pipeline(data, config);
  CHECK(at_1pct["hubs"]["h"] == 3);
  REQUIRE(at_1pct["hubs"]["members"].size() == 3);

  // Same data, same network: the smaller budget is a prefix of the larger.
  std::set<int> big, small;
  for (const auto& m : at_3pct["hubs"]["members"]) big.insert(m["index"].get<int>());
  for (const auto& m : at_1pct["hubs"]["members"]) small.insert(m["index"].get<int>());
  for (int idx : small) CHECK(big.count(idx) == 1);

  // Member indexes are 1-based protein positions with matching names.
  for (const auto& m : at_3pct["hubs"]["members"]) {
    const int idx = m["index"].get<int>();
    CHECK(idx >= 1);
    CHECK(idx <= 337);
    CHECK(m["name"].get<std::string>() == "X" + std::to_string(idx));
    CHECK(m["centrality"].is_number());
  }
}

TEST_CASE("holdout splits are sized, seeded, and scored") {
  const Dataset data = small_fixture();
  RunConfig config = fast_config();
  config.holdout_fraction = 0.25;
  const json report = run_pipeline(data, config);
  CHECK(report["data"]["rows_fit"] == 45);
  CHECK(report["data"]["rows_holdout"] == 15);
  REQUIRE(report["evaluation"].contains("holdout"));
  CHECK(report["evaluation"]["holdout"]["rmse"].is_number());
  CHECK(report["evaluation"]["holdout"]["rmse"].get<double>() >= 0.0);

  const json again = run_pipeline(data, config);
  CHECK(strip_timestamp(report).dump() == strip_timestamp(again).dump());

  // Too little data on either side of the split is rejected outright:
  // floor(0.97 * 60) = 58 held out leaves only two fitting rows.
  RunConfig tiny = fast_config();
  tiny.holdout_fraction = 0.97;
  try {
    run_pipeline(data, tiny);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()) == "holdout split leaves too few rows");
  }
}

TEST_CASE("errors carry their stage label") {
  RunConfig config = fast_config();

  Dataset bad_input = small_fixture();
  bad_input.X(0, 0) = std::numeric_limits<double>::quiet_NaN();
  try {
    run_pipeline(bad_input, config);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).rfind("stage input: ", 0) == 0);
  }

  Dataset constant_protein = small_fixture();
  constant_protein.X.col(3).setConstant(1.0);
  try {
    run_pipeline(constant_protein, config);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    const std::string message = e.what();
    CHECK(message.rfind("stage network estimation: ", 0) == 0);
    CHECK(message.find("column 4") != std::string::npos);
  }

  Dataset duplicate_confounder = small_fixture();
  duplicate_confounder.Z.col(1) = duplicate_confounder.Z.col(0);
  try {
    run_pipeline(duplicate_confounder, config);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    const std::string message = e.what();
    CHECK(message.rfind("stage network-guided fit: ", 0) == 0);
    CHECK(message.find("rank-deficient") != std::string::npos);
  }
}
