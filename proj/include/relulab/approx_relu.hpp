#pragma once

#include <cstdint>
#include <vector>

#include "relulab/dataset.hpp"
#include "relulab/learners.hpp"

namespace relulab::approx {

struct ApproxConfig {
  std::vector<double> alpha_grid;  // ascending, each in (0, 1)
  learners::HalfspaceLearnerSpec halfspace;
  bool use_localization = true;
  double holdout_fraction = 0.2;

  // 8 log-spaced thresholds in [1e-2, 0.5].
  static std::vector<double> default_alpha_grid();
};

// label' = sign(y - alpha) with sign(0) = +1.
LabeledDataset threshold_labels(const LabeledDataset& ds, double alpha);

struct HalfspaceRelu {
  WeightVector w;  // unit norm, the returned hypothesis is ReLU_w
  bool direction_recovered = true;  // false when averaging saw zero mean and
                                    // a random unit fallback was used
  bool band_exhausted = false;
};

// Algorithm 2 at a fixed threshold: hard-threshold the labels, learn a
// halfspace (averaging, then optional band localization), return the unit
// vector.
HalfspaceRelu fit_relu_via_halfspace(const LabeledDataset& ds, double alpha,
                                     const ApproxConfig& cfg,
                                     std::uint64_t seed);

// Mean of (ReLU(w.x) - y)^2 over the dataset.
double empirical_square_loss(const LabeledDataset& ds, const WeightVector& w);

struct AlphaEntry {
  double alpha = 0.0;
  double holdout_loss = 0.0;       // loss of the unit-norm ReLU
  bool direction_recovered = true;
  double rescale = 1.0;            // diagnostic loss-optimal norm in [0, 1]
  double rescaled_loss = 0.0;      // diagnostic holdout loss at that norm
};

struct AlphaSelection {
  WeightVector w;  // unit
  double alpha_star = 0.0;
  double holdout_loss = 0.0;
  bool direction_recovered = true;
  double rescale = 1.0;
  double rescaled_loss = 0.0;
  std::vector<AlphaEntry> table;
};

// Fits one hypothesis per grid alpha on a training split and returns the
// holdout square-loss argmin; equal losses break toward the smaller alpha.
// The returned hypothesis stays unit norm; the loss-optimal rescaling is
// reported as a diagnostic only.
AlphaSelection select_alpha(const LabeledDataset& ds, const ApproxConfig& cfg,
                            std::uint64_t seed);

}  // namespace relulab::approx
