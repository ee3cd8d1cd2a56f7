#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relulab/dataset.hpp"
#include "relulab/learners.hpp"

namespace relulab::reduction {

struct ReductionConfig {
  std::size_t m1 = 0;  // training samples per coordinate
  std::size_t m2 = 0;  // validation samples per coordinate
  double epsilon = 0.0;
  learners::ReluLearnerSpec learner;
  unsigned repetitions = 1;  // majority-vote confidence amplification

  void validate() const;
};

// The detection gap 0.8 (1 - 2 eta) <ReLU_{w_S}, chi_S> with the series
// truncated at degree k + 40.
double auto_epsilon(unsigned k, double eta);

// ceil(100 / epsilon^2), the prescribed validation count.
std::size_t default_validation_count(double epsilon);

// 1/2 - 1/(4 pi) - epsilon/4. The constant comes from gaussian_stats.
double detection_threshold(double epsilon);

struct DroppedPair {
  LabeledDataset train;
  LabeledDataset validation;
};

// Lift each of the m1 + m2 raw cube samples once (one half-normal draw per
// coordinate per sample, shared across all j), remap labels to {0,1}, then
// for each coordinate j emit the dropped train/validation pair.
std::vector<DroppedPair> build_dropped_datasets(const LabeledDataset& raw,
                                                const ReductionConfig& cfg,
                                                std::uint64_t seed);

struct DetectResult {
  bool is_relevant = false;
  double val_err = 0.0;
};

// Fits h_j on train, measures empirical square loss on validation, and flags
// the coordinate when val_err >= 1/2 - 1/(4 pi) - epsilon/4. Dropping a
// RELEVANT coordinate destroys the parity signal, so high error means
// relevant.
DetectResult detect_relevant(const LabeledDataset& train,
                             const LabeledDataset& validation,
                             const ReductionConfig& cfg, std::uint64_t seed);

struct ReductionReport {
  double epsilon = 0.0;
  double threshold = 0.0;
  std::vector<double> val_errors;          // per coordinate (last repetition)
  std::vector<unsigned> relevant_votes;    // per coordinate
  std::vector<std::size_t> recovered;      // V_rel (0-based)
  std::vector<std::string> failures;       // per-coordinate failure markers
  std::uint64_t candidates_per_fit = 0;
  double lift_ms = 0.0;
  double fit_ms = 0.0;
  double validate_ms = 0.0;
};

// Algorithm 1 end to end over all d coordinates: d learner invocations plus
// validation passes. Per-coordinate learner seeds come from independent
// substreams of the master seed.
ReductionReport recover_parity(const LabeledDataset& raw,
                               const ReductionConfig& cfg,
                               std::uint64_t seed);

}  // namespace relulab::reduction
