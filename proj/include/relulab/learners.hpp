#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "relulab/dataset.hpp"

namespace relulab::learners {

enum class ReluLearnerKind { kGradientDescent, kSubsetScan };

struct ReluLearnerSpec {
  ReluLearnerKind kind = ReluLearnerKind::kGradientDescent;
  // gradient-descent budget
  unsigned restarts = 5;
  unsigned steps = 400;
  double step_size = 0.4;
  // subset-scan budget
  unsigned k_max = 2;
  std::vector<double> norm_grid;  // empty -> default_norm_grid()
  // target excess error, carried along for reporting
  double epsilon = 0.05;

  static std::vector<double> default_norm_grid();
};

struct ReluFit {
  WeightVector w;
  double train_loss = 0.0;
  // Enumeration size of the subset-scan (directions x norms + zero); 1 for
  // gradient descent runs. This is the d^{O(k)} quantity the reduction logs.
  std::uint64_t candidates_evaluated = 1;
};

// Empirical square-loss minimization over {ReLU_w : |w| <= 1}.
//
// kGradientDescent: projected full-batch descent from the zero vector plus
// `restarts` random unit starts; best final empirical loss wins.
//
// kSubsetScan: evaluates w = c * (1/sqrt|T|) sum_{i in T} e_i over every
// support T with 1 <= |T| <= k_max and every norm c in the grid, plus the
// zero vector, returning the empirical argmin (first enumerated wins ties).
ReluFit fit_relu(const LabeledDataset& ds, const ReluLearnerSpec& spec,
                 std::uint64_t seed);

enum class HalfspaceLearnerKind { kAveraging, kBandLocalized };

struct HalfspaceLearnerSpec {
  HalfspaceLearnerKind kind = HalfspaceLearnerKind::kAveraging;
  double initial_band = 1.0;
  unsigned band_iterations = 6;
  unsigned hinge_steps = 200;
  double hinge_step_factor = 0.1;
  std::size_t min_band_count = 50;
};

// normalize(mean of y x). Returns nullopt when the mean is statistically
// indistinguishable from zero (|mean| <= 4 sqrt(d/m)); callers fall back to
// a random unit vector with a logged warning.
std::optional<WeightVector> fit_halfspace_averaging(const LabeledDataset& ds);

struct LocalizedFit {
  WeightVector w;
  bool band_exhausted = false;  // band emptied before the iteration floor
};

// Iteratively re-fits with hinge subgradient steps over samples in the
// shrinking band |w_t . x| <= b_0 2^{-t}. Never returns a vector with larger
// held-out 0/1 error than w0.
LocalizedFit fit_halfspace_localized(const LabeledDataset& ds,
                                     const WeightVector& w0,
                                     const HalfspaceLearnerSpec& spec);

// Deterministic random unit vector (the averaging fallback).
WeightVector random_unit_vector(std::size_t dim, std::uint64_t seed);

}  // namespace relulab::learners
