#pragma once

#include <span>

namespace relulab::gstats {

// 1/sqrt(2 pi): the norm minimizing the random-label loss.
inline constexpr double kOptimalNorm = 0.39894228040143267794;

// 1/2 - 1/(4 pi): the random-label loss at the minimizer, and the
// detection threshold constant of the parity reduction.
inline constexpr double kOptimalRandomLabelLoss = 0.42042252845405230101;

// E[ReLU(w.x)] = |w|/sqrt(2 pi) and E[ReLU(w.x)^2] = |w|^2/2 under N(0, I).
struct ReluMoments {
  double first = 0.0;
  double second = 0.0;
};
ReluMoments relu_moments(double w_norm);

// Population square loss of ReLU_w against Bernoulli(1/2) labels in {0,1}:
// |w|^2/2 - |w|/sqrt(2 pi) + 1/2.
double random_label_loss(double w_norm);

// Loss against lifted noisy-parity labels:
// random_label_loss(|w|) - (1 - 2 eta) * correlation, where correlation is
// <ReLU_w, chi_S^gamma>. Throws std::invalid_argument for eta >= 1/2.
double parity_label_loss(double w_norm, double correlation, double eta);

// Pr_{g~N(0,1)}[0 < g < 2 alpha]; always <= min(2 alpha, 1/2).
double gaussian_band_mass(double alpha);

struct LossProfile {
  double w_norm = 0.0;
  double random_label_loss = 0.0;
  double optimal_norm = kOptimalNorm;
  double optimal_loss = kOptimalRandomLabelLoss;
};
LossProfile loss_profile(double w_norm);

// Angle between two nonzero vectors and the exact Gaussian halfspace
// disagreement probability theta/pi. Also carries the unit-difference chord
// |a/|a| - b/|b||, which never exceeds the angle.
struct AngleDisagreement {
  double angle = 0.0;         // radians
  double disagreement = 0.0;  // probability
  double unit_chord = 0.0;
};
AngleDisagreement angle_disagreement(std::span<const double> a,
                                     std::span<const double> b);

}  // namespace relulab::gstats
