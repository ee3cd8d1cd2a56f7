#include "relulab/gaussian_stats.hpp"

#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace relulab::gstats {

ReluMoments relu_moments(double w_norm) {
  if (w_norm < 0.0 || !std::isfinite(w_norm))
    throw std::invalid_argument("relu_moments: norm must be non-negative");
  return {w_norm * kOptimalNorm, 0.5 * w_norm * w_norm};
}

double random_label_loss(double w_norm) {
  const ReluMoments m = relu_moments(w_norm);
  return m.second - m.first + 0.5;
}

double parity_label_loss(double w_norm, double correlation, double eta) {
  if (eta < 0.0 || eta >= 0.5)
    throw std::invalid_argument(
        "parity_label_loss: eta must lie in [0, 1/2), labels carry no "
        "signal at eta >= 1/2");
  return random_label_loss(w_norm) - (1.0 - 2.0 * eta) * correlation;
}

double gaussian_band_mass(double alpha) {
  if (alpha < 0.0 || !std::isfinite(alpha))
    throw std::invalid_argument("gaussian_band_mass: alpha must be >= 0");
  // Phi(2 alpha) - Phi(0) = erf(alpha sqrt(2)) / 2.
  return 0.5 * std::erf(alpha * std::numbers::sqrt2);
}

LossProfile loss_profile(double w_norm) {
  LossProfile p;
  p.w_norm = w_norm;
  p.random_label_loss = random_label_loss(w_norm);
  return p;
}

AngleDisagreement angle_disagreement(std::span<const double> a,
                                     std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("angle_disagreement: dimension mismatch");
  double aa = 0.0, bb = 0.0, ab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    aa += a[i] * a[i];
    bb += b[i] * b[i];
    ab += a[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0)
    throw std::invalid_argument("angle_disagreement: zero vector");
  const double na = std::sqrt(aa), nb = std::sqrt(bb);
  double cosine = ab / (na * nb);
  cosine = std::max(-1.0, std::min(1.0, cosine));
  AngleDisagreement out;
  out.angle = std::acos(cosine);
  out.disagreement = out.angle / std::numbers::pi;
  // |a_hat - b_hat| = sqrt(2 - 2 cos theta) = 2 sin(theta/2) <= theta.
  out.unit_chord = std::sqrt(std::max(0.0, 2.0 - 2.0 * cosine));
  assert(out.unit_chord <= out.angle + 1e-12);
  return out;
}

}  // namespace relulab::gstats
