#pragma once

// Independent reference computations and seeded generators shared by the unit tests and
// the acceptance suite. Nothing here calls into the code under test except for types.

#include "vocalsep/common.hpp"
#include "vocalsep/saliency.hpp"
#include "vocalsep/spectrogram.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace vocalsep::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  bool chance(double p) { return uniform() < p; }
  Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo = 0.0, double hi = 1.0);
  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols);
  std::vector<double> normal_vector(std::size_t n);
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

struct PlantedRpca {
  Matrix low_rank;
  Matrix sparse;
  Matrix observed;
};

/// Gaussian rank-r factors plus +/-spike entries on a `density` fraction of cells.
PlantedRpca planted_rpca(Eigen::Index rows, Eigen::Index cols, int rank, double density, std::uint64_t seed);

/// Exhaustive maximisation of the tracking objective over every bin path inside the
/// [f0_min, f0_max] bins. Ties keep the lexicographically smallest path.
std::vector<Eigen::Index> brute_force_path(const SaliencySpectrogram& s, double f0_min, double f0_max, double b,
                                           double floor = 1e-12);

/// Score of a path under the same objective, evaluated directly.
double brute_force_score(const SaliencySpectrogram& s, double f0_min, double f0_max, double b,
                         const std::vector<Eigen::Index>& path, double floor = 1e-12);

/// |sum_f x[f] exp(-2 pi i k f / N)| by direct summation.
double dft_magnitude(const std::vector<double>& x, std::size_t k);

/// Saliency on a tiny grid whose centres are h_low * 2^(c p / 1200).
SaliencySpectrogram saliency_on_grid(const Matrix& values, double h_low, double cents_per_bin);

/// Relative L2 error ||a - b|| / ||b||.
double relative_error(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace vocalsep::testing
