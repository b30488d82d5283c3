#include "netreg/common.hpp"

#include <cmath>
#include <random>

namespace netreg {

std::vector<Index> random_permutation(Index n, std::uint64_t seed) {
  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  std::mt19937_64 eng(seed);
  // Hand-rolled Fisher-Yates: std::shuffle's draw sequence is
  // implementation-defined, this one is pinned by the engine stream.
  for (Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Index>(eng() % static_cast<std::uint64_t>(i + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  return perm;
}

std::vector<double> log_spaced_grid(double top, double bottom, int size) {
  if (size < 1) throw ValidationError("log_spaced_grid: size must be >= 1");
  if (!(top > 0.0) || !(bottom > 0.0))
    throw ValidationError("log_spaced_grid: endpoints must be positive");
  if (size == 1) return {top};
  if (!(top > bottom))
    throw ValidationError("log_spaced_grid: top must exceed bottom");
  std::vector<double> grid(static_cast<std::size_t>(size));
  const double lt = std::log(top);
  const double lb = std::log(bottom);
  for (int i = 0; i < size; ++i)
    grid[static_cast<std::size_t>(i)] =
        std::exp(lt + (lb - lt) * static_cast<double>(i) / (size - 1));
  grid.front() = top;
  grid.back() = bottom;
  return grid;
}

}  // namespace netreg
