#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "netreg/solver.hpp"
#include "oracles.hpp"

using namespace netreg;

namespace {

Matrix with_intercept(const Matrix& body) {
  Matrix U(body.rows(), body.cols() + 1);
  U.col(0).setOnes();
  U.rightCols(body.cols()) = body;
  return U;
}

/// Columns centered then orthonormalized; the span excludes the constant
/// vector, so the intercept decouples exactly.
Matrix centered_orthonormal(Index n, Index q, std::mt19937_64& rng) {
  Matrix raw = oracles::random_matrix(n, q, rng);
  for (Index j = 0; j < q; ++j) raw.col(j).array() -= raw.col(j).mean();
  Eigen::HouseholderQR<Matrix> qr(raw);
  Matrix Q = qr.householderQ();
  return Q.leftCols(q);
}

}  // namespace

TEST_CASE("zero penalty reproduces ordinary least squares") {
  std::mt19937_64 rng(71);
  const Index n = 40, t = 3, q = 4;
  const Matrix U = with_intercept(oracles::random_matrix(n, t - 1, rng));
  const Matrix N = oracles::random_matrix(n, q, rng);
  const Vector y = oracles::random_vector(n, rng);

  PenaltySpec penalty;
  penalty.lambda_n = 0.0;
  penalty.weights = Vector::Ones(q);
  const auto design = oracles::make_raw_design(U, N);
  const PartialFitResult fit = solve_partial_lasso(design, y, penalty);
  REQUIRE(fit.converged);

  Matrix full(n, t + q);
  full.leftCols(t) = U;
  full.rightCols(q) = N;
  const Vector ols = oracles::ols_solve(full, y);
  for (Index j = 0; j < t; ++j) CHECK(fit.alpha(j) == doctest::Approx(ols(j)).epsilon(1e-8));
  for (Index j = 0; j < q; ++j) {
    CHECK(fit.beta(j) == doctest::Approx(ols(t + j)).epsilon(1e-8));
  }
}

TEST_CASE("orthonormal design reduces to the soft-threshold closed form") {
  std::mt19937_64 rng(72);
  const Index n = 60, q = 5;
  const Matrix N = centered_orthonormal(n, q, rng);
  Vector y = oracles::random_vector(n, rng);
  y.array() -= y.mean();

  const double lambda = 0.8;
  PenaltySpec penalty;
  penalty.lambda_n = lambda;
  penalty.weights = Vector::Ones(q);
  const auto design = oracles::make_raw_design(Matrix::Ones(n, 1), N);
  const PartialFitResult fit = solve_partial_lasso(design, y, penalty);
  REQUIRE(fit.converged);
  CHECK(std::abs(fit.alpha(0)) < 1e-9);

  for (Index j = 0; j < q; ++j) {
    const double z = N.col(j).dot(y);
    const double expected =
        (std::abs(z) <= lambda / 2.0) ? 0.0
                                      : (z > 0 ? z - lambda / 2.0 : z + lambda / 2.0);
    CHECK(fit.beta(j) == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("weighted thresholds scale per coordinate under orthonormality") {
  std::mt19937_64 rng(73);
  const Index n = 50, q = 3;
  const Matrix N = centered_orthonormal(n, q, rng);
  Vector y = oracles::random_vector(n, rng);
  y.array() -= y.mean();

  PenaltySpec penalty;
  penalty.lambda_n = 1.0;
  penalty.weights = Vector(q);
  penalty.weights << 0.5, 1.0, 3.0;
  const auto design = oracles::make_raw_design(Matrix::Ones(n, 1), N);
  const PartialFitResult fit = solve_partial_lasso(design, y, penalty);
  REQUIRE(fit.converged);
  for (Index j = 0; j < q; ++j) {
    const double z = N.col(j).dot(y);
    const double th = penalty.lambda_n * penalty.weights(j) / 2.0;
    const double expected = (std::abs(z) <= th) ? 0.0 : (z > 0 ? z - th : z + th);
    CHECK(fit.beta(j) == doctest::Approx(expected).epsilon(1e-7));
  }
}

TEST_CASE("q=2 objective matches the dense grid-search oracle within 1e-4") {
  std::mt19937_64 rng(74);
  std::uniform_real_distribution<double> lam(0.3, 3.0);
  for (int rep = 0; rep < 10; ++rep) {
    const Index n = 25;
    const Matrix U = with_intercept(oracles::random_matrix(n, 1, rng));
    const Matrix N = oracles::random_matrix(n, 2, rng);
    Vector y = oracles::random_vector(n, rng);
    y += N.col(0) * 1.5 - N.col(1) * 0.7;

    PenaltySpec penalty;
    penalty.lambda_n = lam(rng);
    penalty.weights = Vector(2);
    penalty.weights << 1.0, 2.0;
    const auto design = oracles::make_raw_design(U, N);
    const PartialFitResult fit = solve_partial_lasso(design, y, penalty);
    REQUIRE(fit.converged);
    const double value = partial_lasso_objective(design, y, fit.alpha, fit.beta, penalty);

    const auto oracle = oracles::partial_lasso_grid_oracle(U, N, y, penalty.weights,
                                                           penalty.lambda_n);
    REQUIRE(oracle.interior);
    // The solver cannot beat the continuous optimum, and the 1e-3 lattice
    // cannot beat the solver by more than its resolution allows.
    CHECK(value <= oracle.objective + 1e-8);
    CHECK(std::abs(value - oracle.objective) < 1e-4);
  }
}

TEST_CASE("KKT residuals hold at convergence on random instances") {
  std::mt19937_64 rng(75);
  std::uniform_int_distribution<int> n_dist(15, 40);
  std::uniform_int_distribution<int> t_dist(1, 5);
  std::uniform_int_distribution<int> q_dist(1, 8);
  std::uniform_real_distribution<double> lam(0.0, 4.0);
  std::uniform_real_distribution<double> wdist(0.2, 3.0);
  SolverOptions opt;

  for (int rep = 0; rep < 100; ++rep) {
    const Index n = n_dist(rng);
    const Index t = t_dist(rng);
    const Index q = q_dist(rng);
    Matrix U(n, t);
    U.col(0).setOnes();
    if (t > 1) U.rightCols(t - 1) = oracles::random_matrix(n, t - 1, rng);
    const Matrix N = oracles::random_matrix(n, q, rng);
    const Vector y = oracles::random_vector(n, rng);

    PenaltySpec penalty;
    penalty.lambda_n = lam(rng);
    penalty.weights = Vector(q);
    for (Index j = 0; j < q; ++j) penalty.weights(j) = wdist(rng);

    const auto design = oracles::make_raw_design(U, N);
    const PartialFitResult fit = solve_partial_lasso(design, y, penalty);
    REQUIRE(fit.converged);
    const KktResiduals kkt = kkt_residuals(design, y, fit);
    CHECK(kkt.gradient_u <= 10.0 * opt.tol * y.norm());
    CHECK(kkt.active <= 10.0 * opt.tol);
    CHECK(kkt.inactive <= 10.0 * opt.tol);
  }
}

TEST_CASE("objective path is non-increasing") {
  std::mt19937_64 rng(76);
  const Index n = 30, q = 6;
  const Matrix U = Matrix::Ones(n, 1);
  const Matrix N = oracles::random_matrix(n, q, rng);
  const Vector y = oracles::random_vector(n, rng);
  PenaltySpec penalty;
  penalty.lambda_n = 1.0;
  penalty.weights = Vector::Ones(q);
  const auto design = oracles::make_raw_design(U, N);
  const PartialFitResult fit = solve_partial_lasso(design, y, penalty);
  REQUIRE(fit.objective_path.size() >= 1);
  for (std::size_t i = 1; i < fit.objective_path.size(); ++i) {
    CHECK(fit.objective_path[i] <=
          fit.objective_path[i - 1] + 1e-10 * std::max(1.0, fit.objective_path[i - 1]));
  }
}

TEST_CASE("rank-deficient unpenalized block is rejected with guidance") {
  std::mt19937_64 rng(77);
  const Index n = 20;
  Matrix U(n, 3);
  U.col(0).setOnes();
  U.col(1) = oracles::random_vector(n, rng);
  U.col(2) = 2.0 * U.col(1);  // exact collinearity
  const Matrix N = oracles::random_matrix(n, 2, rng);
  const Vector y = oracles::random_vector(n, rng);
  PenaltySpec penalty;
  penalty.lambda_n = 0.5;
  penalty.weights = Vector::Ones(2);
  const auto design = oracles::make_raw_design(U, N);
  try {
    solve_partial_lasso(design, y, penalty);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("hubs") != std::string::npos);
    CHECK(msg.find("confounders") != std::string::npos);
  }
}

TEST_CASE("active set matches the beta support at the zero threshold") {
  std::mt19937_64 rng(78);
  const Index n = 40, q = 8;
  const Matrix U = Matrix::Ones(n, 1);
  const Matrix N = oracles::random_matrix(n, q, rng);
  Vector y = N.col(1) * 2.0 - N.col(4) * 1.2;
  y += 0.1 * oracles::random_vector(n, rng);
  PenaltySpec penalty;
  penalty.lambda_n = 2.0;
  penalty.weights = Vector::Ones(q);
  const auto design = oracles::make_raw_design(U, N);
  const PartialFitResult fit = solve_partial_lasso(design, y, penalty);
  REQUIRE(fit.converged);

  std::vector<Index> expected;
  for (Index j = 0; j < q; ++j) {
    if (std::abs(fit.beta(j)) > kZeroThreshold) expected.push_back(j);
  }
  CHECK(fit.active_set == expected);
  CHECK(fit.alpha.size() == design.t());

  const Vector r = y - design.U * fit.alpha - design.N * fit.beta;
  CHECK(fit.residual_variance ==
        doctest::Approx(r.squaredNorm() / static_cast<double>(n)).epsilon(1e-10));
}

TEST_CASE("warm starts do not change the solution") {
  std::mt19937_64 rng(79);
  const Index n = 35, q = 6;
  const Matrix U = Matrix::Ones(n, 1);
  const Matrix N = oracles::random_matrix(n, q, rng);
  const Vector y = oracles::random_vector(n, rng);
  PenaltySpec penalty;
  penalty.lambda_n = 0.7;
  penalty.weights = Vector::Ones(q);
  const auto design = oracles::make_raw_design(U, N);

  const PartialFitResult cold = solve_partial_lasso(design, y, penalty);
  Vector warm = Vector::Constant(q, 0.37);
  const PartialFitResult warm_fit = solve_partial_lasso(design, y, penalty, {}, &warm);
  REQUIRE(cold.converged);
  REQUIRE(warm_fit.converged);
  CHECK((cold.beta - warm_fit.beta).cwiseAbs().maxCoeff() < 1e-6);
  const double o1 = partial_lasso_objective(design, y, cold.alpha, cold.beta, penalty);
  const double o2 =
      partial_lasso_objective(design, y, warm_fit.alpha, warm_fit.beta, penalty);
  CHECK(std::abs(o1 - o2) < 1e-8 * std::max(1.0, std::abs(o1)));
}

TEST_CASE("ridge term enters the objective and the optimality conditions") {
  std::mt19937_64 rng(80);
  const Index n = 45, q = 4;
  const Matrix U = Matrix::Ones(n, 1);
  const Matrix N = oracles::random_matrix(n, q, rng);
  Vector y = N * Vector::Constant(q, 1.0);
  y += 0.2 * oracles::random_vector(n, rng);

  PenaltySpec penalty;
  penalty.lambda_n = 0.6;
  penalty.weights = Vector::Ones(q);
  penalty.l2 = 2.0;
  const auto design = oracles::make_raw_design(U, N);
  const PartialFitResult fit = solve_partial_lasso(design, y, penalty);
  REQUIRE(fit.converged);

  const KktResiduals kkt = kkt_residuals(design, y, fit);
  CHECK(kkt.active <= 1e-5);
  CHECK(kkt.gradient_u <= 1e-5);

  // Grid oracle with the same l2 on a q=2 slice cross-checks the objective.
  const Matrix N2 = N.leftCols(2);
  PenaltySpec p2 = penalty;
  p2.weights = Vector::Ones(2);
  const auto design2 = oracles::make_raw_design(U, N2);
  const PartialFitResult fit2 = solve_partial_lasso(design2, y, p2);
  REQUIRE(fit2.converged);
  const double value =
      partial_lasso_objective(design2, y, fit2.alpha, fit2.beta, p2);
  const auto oracle = oracles::partial_lasso_grid_oracle(U, N2, y, p2.weights,
                                                         p2.lambda_n, p2.l2);
  REQUIRE(oracle.interior);
  CHECK(std::abs(value - oracle.objective) < 1e-4);
}

TEST_CASE("validation rejects malformed penalties and shapes") {
  std::mt19937_64 rng(81);
  const Matrix U = Matrix::Ones(10, 1);
  const Matrix N = oracles::random_matrix(10, 3, rng);
  const Vector y = oracles::random_vector(10, rng);
  const auto design = oracles::make_raw_design(U, N);

  PenaltySpec penalty;
  penalty.lambda_n = 1.0;
  penalty.weights = Vector::Ones(2);  // wrong length
  CHECK_THROWS_AS(solve_partial_lasso(design, y, penalty), ValidationError);

  penalty.weights = Vector::Ones(3);
  penalty.lambda_n = -1.0;
  CHECK_THROWS_AS(solve_partial_lasso(design, y, penalty), ValidationError);

  penalty.lambda_n = 1.0;
  Vector short_y = Vector::Ones(5);
  CHECK_THROWS_AS(solve_partial_lasso(design, short_y, penalty), ValidationError);
}

TEST_CASE("non-convergence under a starved iteration budget is flagged") {
  std::mt19937_64 rng(82);
  const Index n = 30, q = 10;
  const Matrix U = Matrix::Ones(n, 1);
  Matrix N = oracles::random_matrix(n, q, rng);
  for (Index j = 1; j < q; ++j) N.col(j) = 0.95 * N.col(0) + 0.05 * N.col(j);
  const Vector y = oracles::random_vector(n, rng);
  PenaltySpec penalty;
  penalty.lambda_n = 0.01;
  penalty.weights = Vector::Ones(q);
  SolverOptions opt;
  opt.max_iter = 1;
  opt.tol = 1e-14;
  const auto design = oracles::make_raw_design(U, N);
  const PartialFitResult fit = solve_partial_lasso(design, y, penalty, opt);
  CHECK_FALSE(fit.converged);
  CHECK(fit.beta.size() == q);  // last iterate returned
}
