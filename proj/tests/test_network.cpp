#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "netreg/network.hpp"
#include "oracles.hpp"

using namespace netreg;

namespace {

PartialCorrelationMatrix wrap(const Matrix& rho) {
  PartialCorrelationMatrix out;
  out.rho = rho;
  return out;
}

}  // namespace

TEST_CASE("degree centrality of the identity is all zeros") {
  const CentralityVector phi = degree_centrality(wrap(Matrix::Identity(4, 4)));
  REQUIRE(phi.phi.size() == 4);
  CHECK(phi.phi.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("degree centrality with all off-diagonals 0.5 at p=3 is (1,1,1)") {
  Matrix rho = Matrix::Constant(3, 3, 0.5);
  rho.diagonal().setOnes();
  const CentralityVector phi = degree_centrality(wrap(rho));
  for (Index k = 0; k < 3; ++k) CHECK(phi.phi(k) == doctest::Approx(1.0));
}

TEST_CASE("degree centrality matches hand summation on a sparse p=6 graph") {
  // Star-plus-edge layout: node 1 connects to 2, 3, 4; node 5 connects to 6.
  Matrix rho = Matrix::Identity(6, 6);
  const auto set = [&](Index a, Index b, double v) {
    rho(a, b) = v;
    rho(b, a) = v;
  };
  set(0, 1, 0.4);
  set(0, 2, -0.3);
  set(0, 3, 0.2);
  set(4, 5, -0.7);
  const CentralityVector phi = degree_centrality(wrap(rho));
  CHECK(phi.phi(0) == doctest::Approx(0.4 + 0.3 + 0.2).epsilon(1e-12));
  CHECK(phi.phi(1) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(phi.phi(2) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(phi.phi(3) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(phi.phi(4) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(phi.phi(5) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("degree centrality is bounded by p - 1 for correlation-bounded input") {
  std::mt19937_64 rng(7);
  const Matrix theta = oracles::random_pd_matrix(5, rng);
  Matrix rho = Matrix::Identity(5, 5);
  for (Index j = 0; j < 5; ++j) {
    for (Index k = 0; k < 5; ++k) {
      if (j != k) rho(j, k) = -theta(j, k) / std::sqrt(theta(j, j) * theta(k, k));
    }
  }
  const CentralityVector phi = degree_centrality(wrap(rho));
  for (Index k = 0; k < 5; ++k) {
    CHECK(phi.phi(k) >= 0.0);
    CHECK(phi.phi(k) <= 4.0);
  }
}

TEST_CASE("degree centrality is permutation equivariant") {
  std::mt19937_64 rng(8);
  Matrix rho = oracles::random_correlation_matrix(6, rng);
  const CentralityVector phi = degree_centrality(wrap(rho));

  std::vector<Index> perm(6);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix permuted(6, 6);
  for (Index j = 0; j < 6; ++j) {
    for (Index k = 0; k < 6; ++k) {
      permuted(j, k) = rho(perm[static_cast<std::size_t>(j)],
                           perm[static_cast<std::size_t>(k)]);
    }
  }
  const CentralityVector phi_perm = degree_centrality(wrap(permuted));
  for (Index k = 0; k < 6; ++k) {
    CHECK(phi_perm.phi(k) ==
          doctest::Approx(phi.phi(perm[static_cast<std::size_t>(k)])).epsilon(1e-12));
  }
}

TEST_CASE("default tau values at the benchmark dimensions") {
  CHECK(default_tau(60) == 5);
  CHECK(default_tau(300) == 20);
  CHECK(default_tau(337) == 22);
  CHECK(default_tau(1) == 1);
  CHECK(default_tau(16) == 2);
}

TEST_CASE("select_hubs applies h = min(floor(p delta), tau)") {
  Vector phi(60);
  for (Index k = 0; k < 60; ++k) phi(k) = static_cast<double>(60 - k);
  const HubPartition part = select_hubs({phi}, 0.06, 5);
  CHECK(part.h == 3);  // min(floor(3.6), 5)
  CHECK(part.delta == doctest::Approx(0.06));
  CHECK(part.tau == 5);
  REQUIRE(part.hub_indices.size() == 3);
  CHECK(part.hub_indices[0] == 0);
  CHECK(part.hub_indices[1] == 1);
  CHECK(part.hub_indices[2] == 2);
  CHECK(part.nonhub_indices.size() == 57);
}

TEST_CASE("select_hubs at p=337 delta=0.03 tau=22 returns 10 hubs") {
  Vector phi(337);
  for (Index k = 0; k < 337; ++k) phi(k) = 1.0 / (1.0 + static_cast<double>(k));
  const HubPartition part = select_hubs({phi}, 0.03, 22);
  CHECK(part.h == 10);
  CHECK(part.hub_indices.size() == 10);
  CHECK(part.nonhub_indices.size() == 327);
}

TEST_CASE("select_hubs breaks centrality ties toward the smaller index") {
  Vector phi(4);
  phi << 0.2, 0.9, 0.9, 0.1;
  const HubPartition part = select_hubs({phi}, 0.5, 10);
  REQUIRE(part.h == 2);
  CHECK(part.hub_indices[0] == 1);
  CHECK(part.hub_indices[1] == 2);

  Vector tied(4);
  tied << 0.9, 0.5, 0.9, 0.9;  // three-way tie for two slots
  const HubPartition tie_part = select_hubs({tied}, 0.5, 10);
  REQUIRE(tie_part.h == 2);
  CHECK(tie_part.hub_indices[0] == 0);
  CHECK(tie_part.hub_indices[1] == 2);
}

TEST_CASE("hub partition separates centralities and covers all indices") {
  std::mt19937_64 rng(9);
  Vector phi(20);
  for (Index k = 0; k < 20; ++k) {
    phi(k) = std::uniform_real_distribution<double>(0.0, 5.0)(rng);
  }
  const HubPartition part = select_hubs({phi}, 0.25, 4);
  CHECK(part.h == 4);  // min(floor(5), 4)
  CHECK(part.hub_indices.size() + part.nonhub_indices.size() == 20);
  CHECK(std::is_sorted(part.hub_indices.begin(), part.hub_indices.end()));
  CHECK(std::is_sorted(part.nonhub_indices.begin(), part.nonhub_indices.end()));

  double min_hub = 1e300;
  for (Index k : part.hub_indices) min_hub = std::min(min_hub, phi(k));
  double max_nonhub = -1e300;
  for (Index k : part.nonhub_indices) max_nonhub = std::max(max_nonhub, phi(k));
  CHECK(min_hub >= max_nonhub);

  // No index appears twice.
  std::vector<Index> all = part.hub_indices;
  all.insert(all.end(), part.nonhub_indices.begin(), part.nonhub_indices.end());
  std::sort(all.begin(), all.end());
  for (Index k = 0; k < 20; ++k) CHECK(all[static_cast<std::size_t>(k)] == k);
}

TEST_CASE("h is monotone in delta and in tau") {
  Vector phi(50);
  for (Index k = 0; k < 50; ++k) phi(k) = static_cast<double>(k);

  Index prev = 0;
  for (double delta : {0.0, 0.02, 0.06, 0.1, 0.3, 0.6, 0.9}) {
    const HubPartition part = select_hubs({phi}, delta, 12);
    CHECK(part.h >= prev);
    prev = part.h;
  }

  prev = 0;
  for (Index tau : {0, 1, 2, 5, 9, 30}) {
    const HubPartition part = select_hubs({phi}, 0.5, tau);
    CHECK(part.h >= prev);
    prev = part.h;
  }
}

TEST_CASE("delta = 0 yields an empty hub set") {
  Vector phi(10);
  phi.setOnes();
  const HubPartition part = select_hubs({phi}, 0.0, 5);
  CHECK(part.h == 0);
  CHECK(part.hub_indices.empty());
  CHECK(part.nonhub_indices.size() == 10);
}

TEST_CASE("select_hubs is permutation equivariant") {
  std::mt19937_64 rng(10);
  Vector phi(12);
  for (Index k = 0; k < 12; ++k) {
    phi(k) = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  }
  const HubPartition base = select_hubs({phi}, 0.3, 6);

  std::vector<Index> perm(12);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Vector permuted(12);
  for (Index k = 0; k < 12; ++k) permuted(k) = phi(perm[static_cast<std::size_t>(k)]);
  const HubPartition moved = select_hubs({permuted}, 0.3, 6);

  // Map the permuted hub selection back to original labels and compare.
  std::vector<Index> mapped;
  for (Index k : moved.hub_indices) mapped.push_back(perm[static_cast<std::size_t>(k)]);
  std::sort(mapped.begin(), mapped.end());
  CHECK(mapped == base.hub_indices);
}

TEST_CASE("select_hubs validates its inputs") {
  Vector phi(5);
  phi.setOnes();
  CHECK_THROWS_AS(select_hubs({phi}, -0.1, 3), ValidationError);
  CHECK_THROWS_AS(select_hubs({phi}, 1.0, 3), ValidationError);
  CHECK_THROWS_AS(select_hubs({phi}, 0.5, -1), ValidationError);
}
