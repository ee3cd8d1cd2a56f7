#pragma once

#include <cstdint>
#include <vector>

#include "relulab/dataset.hpp"
#include "relulab/rng.hpp"

namespace relulab::datagen {

// Hidden ground truth of a sparse-parity problem: dimension d, relevant
// index set S (0-based), label flip rate eta in [0, 1/2).
struct SlpnInstance {
  std::size_t d = 0;
  std::vector<std::size_t> relevant;  // S, strictly increasing
  double eta = 0.0;

  void validate() const;  // throws std::invalid_argument
};

// m i.i.d. uniform hypercube points labeled by the parity over S, each
// label independently negated with probability eta.
LabeledDataset sample_slpn(const SlpnInstance& inst, std::size_t m,
                           std::uint64_t seed);

// One half-normal lift draw per coordinate: x'_j = g_j x_j with g_j >= 0,
// so sign(x'_j) = x_j and the marginal of x' over uniform x is N(0, I_d).
// sample_index selects the lift substream counter so a sample's lift is
// shared wherever it is reused.
std::vector<double> gaussian_lift_sample(std::span<const double> x,
                                         const CounterRng& rng,
                                         std::uint64_t sample_index);

// Lifts every point of a cube dataset (labels untouched, marginal becomes
// kLifted). Deterministic per seed and independent of thread count.
LabeledDataset lift_dataset(const LabeledDataset& cube, std::uint64_t seed);

// {-1,+1} -> {0,1} via (y + 1)/2.
double remap_label(double y);

// Dataset with boolean labels remapped to real {0,1} labels.
LabeledDataset remap_labels(const LabeledDataset& ds);

// Removes coordinate j (0-based) from every point.
LabeledDataset drop_coordinate(const LabeledDataset& ds, std::size_t j);

enum class CorruptionKind {
  kNone,            // realizable up to clamping
  kFlipFraction,    // y -> 1 - y on a `magnitude` fraction of samples
  kAdditiveBounded, // y -> clamp01(y + magnitude * uniform(-1,1))
  kClampShift,      // y -> clamp01(y + magnitude)
};

struct CorruptionModel {
  CorruptionKind kind = CorruptionKind::kNone;
  double magnitude = 0.0;

  // Analytic upper bound on the corruption's contribution to the population
  // square loss of the generating ReLU (1 per corrupted point for flips,
  // magnitude^2 for the bounded kinds).
  double opt_upper_bound() const;
};

struct OptEstimate {
  double value = 0.0;         // loss of ReLU_{w*} on the emitted labels
  double stderr_ = 0.0;
  double upper_bound = 0.0;   // analytic bound incl. clamp contribution
  double clamp_contrib = 0.0; // measured squared error introduced by clamping
  bool exact = false;         // true when value is exact, not an MC estimate
};

struct AgnosticDataset {
  LabeledDataset data;
  OptEstimate opt;
};

// x ~ N(0, I_d); clean label clamp01(ReLU(w*.x)); corruption applied.
// Requires |w*| <= 1 and a corruption that keeps labels in [0,1].
AgnosticDataset make_agnostic_relu_dataset(const WeightVector& w_star,
                                           const CorruptionModel& corruption,
                                           std::size_t m, std::uint64_t seed);

}  // namespace relulab::datagen
