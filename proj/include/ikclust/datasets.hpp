#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ikclust/kernels.hpp"

namespace ikclust {

struct Dataset {
  Matrix points;                             // n x d
  std::optional<std::vector<int>> labels;    // ground truth, when known
  std::string name;

  int n() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
  void validate() const;
};

// CSV ingestion. A non-numeric first row is treated as a header. The label
// column may be given by name (requires a header) or as a 0-based index.
Dataset load_csv(const std::string& path,
                 const std::optional<std::string>& label_column = std::nullopt);

void save_csv(const Dataset& data, const std::string& path, bool with_labels = true);

// Per-coordinate rescaling to zero minimum and unit range. Constant
// coordinates are left at zero.
Dataset normalize_unit_range(const Dataset& data);

// Two interleaved half-circles of unit radius, second one offset by (1, 0.5),
// with isotropic gaussian noise.
Dataset gen_halfmoons(int n, double noise_sd, std::uint64_t seed);

// One-dimensional set of three clusters centered at -1, 0, 1, each with
// per_side points at c - eps and per_side points at c + eps (n = 6*per_side).
// The optimal 3-means cost is n*eps^2; verified at construction.
Dataset gen_exkmc_counterexample(double eps, int per_side);

// The four points (0,1), (0,-1), (1,0), (-1,0) labeled {0,0,1,1}. Under the
// quadratic kernel the within-cluster Gram entries are 1 and the
// cross-cluster entries 0; verified at construction.
Dataset gen_quadratic_counterexample();

// Eight points in 36 dimensions: one cluster in {0,1}^36, one in {0,-1}^36,
// with squared distances 24 within clusters and 54 across; intended for the
// epsilon-neighborhood kernel with epsilon = sqrt(24). Verified at
// construction.
Dataset gen_epsilon_counterexample();

// Two small witness sets: the 2-dim three-point set {(0,0),(1,0),(1,1)} with
// a gamma for which K12 + K23 < 1, and a 1-dim three-point set {0,3,6} with
// K12 + K23 < K13 + 1. Both inequalities verified at construction.
std::pair<Dataset, Dataset> gen_featuremap_witnesses();

// Bin probabilities of the four discrete distributions behind the chi2
// mixture (rows: distributions, columns: bins). Fixed constants of this
// implementation; override via the chi2_probs_* config keys of the CLI.
inline constexpr std::array<std::array<double, 4>, 4> kChi2MixtureProbs = {{
    {0.55, 0.25, 0.15, 0.05},
    {0.45, 0.30, 0.05, 0.20},
    {0.20, 0.50, 0.15, 0.15},
    {0.10, 0.15, 0.30, 0.45},
}};

// Draws 5 instances of 100 samples from each of the four distributions and
// records the empirical bin frequencies (n = 20 rows, d = 4 bins, rows sum
// to 1). An all-zero bin frequency is nudged to keep the data inside the
// chi2 kernel's open domain.
Dataset gen_chi2_mixture(std::uint64_t seed,
                         const std::array<std::array<double, 4>, 4>& probs = kChi2MixtureProbs);

}  // namespace ikclust
