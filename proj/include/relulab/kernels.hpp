#pragma once

#include <cstddef>
#include <vector>

#include "relulab/dataset.hpp"

namespace relulab::kernels {

// Data-parallel inner loops of the learners and evaluators. Every kernel has
// an OpenMP implementation and a serial reference twin; both accumulate in
// the same fixed block order, so they agree bit-for-bit for any thread
// count (see parallel.hpp).

// Mean of (ReLU(w.x) - y)^2.
double relu_square_loss(const LabeledDataset& ds, const WeightVector& w);
double relu_square_loss_serial(const LabeledDataset& ds,
                               const WeightVector& w);

// Gradient of the mean square loss at w, using the 1_+(0) = 1 convention
// for the ReLU subgradient at the kink. Returns the loss.
double relu_loss_gradient(const LabeledDataset& ds, const WeightVector& w,
                          WeightVector* grad);
double relu_loss_gradient_serial(const LabeledDataset& ds,
                                 const WeightVector& w, WeightVector* grad);

// Mean of y * x over a boolean-labeled dataset.
WeightVector label_weighted_mean(const LabeledDataset& ds);
WeightVector label_weighted_mean_serial(const LabeledDataset& ds);

// Fraction of samples with sign(w.x) != y (boolean labels, sign(0) = +1).
double sign_error(const LabeledDataset& ds, const WeightVector& w);
double sign_error_serial(const LabeledDataset& ds, const WeightVector& w);

// Mean of (ReLU(w.x_{-skip}) - y)^2 over rows [row_begin, row_end) with
// coordinate `skip` removed; w has dimension ds.dim - 1. Lets the parity
// reduction validate each per-coordinate hypothesis against the shared
// lifted matrix without materializing a dropped copy.
double relu_square_loss_rows_skip(const LabeledDataset& ds,
                                  const WeightVector& w, std::size_t row_begin,
                                  std::size_t row_end, std::size_t skip);
double relu_square_loss_rows_skip_serial(const LabeledDataset& ds,
                                         const WeightVector& w,
                                         std::size_t row_begin,
                                         std::size_t row_end,
                                         std::size_t skip);

// Fused subset-scan statistics for the direction u = (1/sqrt|T|) sum_{j in T}
// e_j: a = mean ReLU(u.x)^2, b = mean ReLU(u.x) y. The loss of c*u is then
// c^2 a - 2 c b + mean y^2 for any norm c >= 0.
struct DirectionMoments {
  double a = 0.0;
  double b = 0.0;
};
DirectionMoments direction_moments(const std::vector<const double*>& columns,
                                   std::size_t m,
                                   const std::vector<std::size_t>& support,
                                   const double* ys);
DirectionMoments direction_moments_serial(
    const std::vector<const double*>& columns, std::size_t m,
    const std::vector<std::size_t>& support, const double* ys);

// Hinge subgradient restricted to the band |w.x| <= band: accumulates -y x
// over band samples with margin y (w.x) < band. Returns the number of
// samples inside the band.
std::size_t banded_hinge_subgradient(const LabeledDataset& ds,
                                     const WeightVector& w, double band,
                                     WeightVector* grad);
std::size_t banded_hinge_subgradient_serial(const LabeledDataset& ds,
                                            const WeightVector& w, double band,
                                            WeightVector* grad);

double mean_label_square(const LabeledDataset& ds);

}  // namespace relulab::kernels
