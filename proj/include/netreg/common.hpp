#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace netreg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Malformed input or broken contract; the CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric routine cannot proceed (singularity, loss of positive
/// definiteness, rank deficiency); the CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coefficients and precision-matrix entries at or below this magnitude are
/// treated as exact zeros when counting edges and active sets.
inline constexpr double kZeroThreshold = 1e-8;

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Derives an independent 64-bit seed for a numbered stream (replicate,
/// train/test split, fold shuffle, ...) from a master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return detail::splitmix64(seed ^ detail::splitmix64(stream + 1));
}

/// Fisher-Yates permutation of {0..n-1} driven by a caller-owned engine
/// stream, so fold assignments are reproducible from a seed alone.
std::vector<Index> random_permutation(Index n, std::uint64_t seed);

/// `size` log-spaced values from `top` down to `bottom` (inclusive),
/// strictly decreasing. Requires top >= bottom > 0 (or size == 1).
std::vector<double> log_spaced_grid(double top, double bottom, int size);

}  // namespace netreg
