#include "relulab/learners.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relulab/gaussian_stats.hpp"
#include "relulab/kernels.hpp"
#include "relulab/rng.hpp"

namespace relulab::learners {

std::vector<double> ReluLearnerSpec::default_norm_grid() {
  return {0.15, 0.25, gstats::kOptimalNorm, 0.55, 0.8, 1.0};
}

WeightVector random_unit_vector(std::size_t dim, std::uint64_t seed) {
  const CounterRng rng(seed, stream::kRestart);
  WeightVector w(dim);
  double norm = 0.0;
  std::uint64_t offset = 0;
  while (norm == 0.0) {
    for (std::size_t j = 0; j < dim; ++j) {
      w.v[j] = rng.gaussian(offset + j);
      norm += w.v[j] * w.v[j];
    }
    norm = std::sqrt(norm);
    offset += dim;
  }
  w.scale(1.0 / norm);
  return w;
}

namespace {

void project_to_unit_ball(WeightVector* w) {
  const double n = w->norm();
  if (n > 1.0) w->scale(1.0 / n);
}

ReluFit fit_gradient_descent(const LabeledDataset& ds,
                             const ReluLearnerSpec& spec, std::uint64_t seed) {
  ReluFit best;
  best.w = WeightVector(ds.dim);
  best.train_loss = kernels::relu_square_loss(ds, best.w);
  WeightVector grad(ds.dim);
  for (unsigned r = 0; r <= spec.restarts; ++r) {
    WeightVector w = r == 0 ? WeightVector(ds.dim)
                            : random_unit_vector(ds.dim, seed + 0x9E37 * r);
    for (unsigned step = 0; step < spec.steps; ++step) {
      kernels::relu_loss_gradient(ds, w, &grad);
      for (std::size_t j = 0; j < ds.dim; ++j)
        w.v[j] -= spec.step_size * grad.v[j];
      project_to_unit_ball(&w);
    }
    const double loss = kernels::relu_square_loss(ds, w);
    if (loss < best.train_loss) {
      best.train_loss = loss;
      best.w = w;
    }
  }
  best.candidates_evaluated = 1;
  return best;
}

// Enumerates supports of size 1..k_max in lexicographic order within a size.
template <class Visitor>
void for_each_support(std::size_t dim, unsigned k_max, Visitor&& visit) {
  std::vector<std::size_t> support;
  for (unsigned t = 1; t <= k_max && t <= dim; ++t) {
    support.resize(t);
    for (std::size_t i = 0; i < t; ++i) support[i] = i;
    for (;;) {
      visit(support);
      // next t-combination of [0, dim)
      std::size_t i = t;
      while (i > 0 && support[i - 1] == dim - t + (i - 1)) --i;
      if (i == 0) break;
      ++support[i - 1];
      for (std::size_t j = i; j < t; ++j) support[j] = support[j - 1] + 1;
    }
  }
}

ReluFit fit_subset_scan(const LabeledDataset& ds,
                        const ReluLearnerSpec& spec) {
  const std::size_t m = ds.size();
  const std::size_t d = ds.dim;
  const std::vector<double> grid =
      spec.norm_grid.empty() ? ReluLearnerSpec::default_norm_grid()
                             : spec.norm_grid;
  for (double c : grid)
    if (!(c > 0.0 && c <= 1.0))
      throw std::invalid_argument("subset-scan: norm grid must lie in (0, 1]");

  // Column-major copy so a direction pass touches contiguous memory.
  std::vector<double> colstore(d * m);
  std::vector<const double*> columns(d);
  for (std::size_t j = 0; j < d; ++j) {
    double* col = colstore.data() + j * m;
    for (std::size_t i = 0; i < m; ++i) col[i] = ds.xs[i * d + j];
    columns[j] = col;
  }

  const double y2 = kernels::mean_label_square(ds);

  ReluFit best;
  best.w = WeightVector(d);
  best.train_loss = y2;  // the zero vector, enumerated first
  std::vector<std::size_t> best_support;
  double best_norm = 0.0;
  std::uint64_t count = 1;

  for_each_support(d, spec.k_max, [&](const std::vector<std::size_t>& T) {
    const kernels::DirectionMoments dm =
        kernels::direction_moments(columns, m, T, ds.ys.data());
    for (double c : grid) {
      ++count;
      const double loss = c * c * dm.a - 2.0 * c * dm.b + y2;
      if (loss < best.train_loss) {
        best.train_loss = loss;
        best_support = T;
        best_norm = c;
      }
    }
  });

  if (!best_support.empty()) {
    const double coef =
        best_norm / std::sqrt(static_cast<double>(best_support.size()));
    for (std::size_t j : best_support) best.w.v[j] = coef;
  }
  best.candidates_evaluated = count;
  return best;
}

}  // namespace

ReluFit fit_relu(const LabeledDataset& ds, const ReluLearnerSpec& spec,
                 std::uint64_t seed) {
  if (ds.size() == 0) throw std::invalid_argument("fit_relu: empty dataset");
  if (ds.label_kind != LabelKind::kReal)
    throw std::invalid_argument("fit_relu: expected real labels in [0,1]");
  ReluFit fit = spec.kind == ReluLearnerKind::kGradientDescent
                    ? fit_gradient_descent(ds, spec, seed)
                    : fit_subset_scan(ds, spec);
  if (fit.w.norm() > 1.0 + 1e-9)
    throw std::logic_error("fit_relu: emitted hypothesis outside the class");
  return fit;
}

std::optional<WeightVector> fit_halfspace_averaging(const LabeledDataset& ds) {
  if (ds.size() == 0)
    throw std::invalid_argument("fit_halfspace_averaging: empty dataset");
  if (ds.label_kind != LabelKind::kBoolean)
    throw std::invalid_argument("fit_halfspace_averaging: need +-1 labels");
  const WeightVector mean = kernels::label_weighted_mean(ds);
  const double threshold =
      4.0 * std::sqrt(static_cast<double>(ds.dim) /
                      static_cast<double>(ds.size()));
  if (mean.norm() <= threshold) return std::nullopt;
  return mean.normalized();
}

LocalizedFit fit_halfspace_localized(const LabeledDataset& ds,
                                     const WeightVector& w0,
                                     const HalfspaceLearnerSpec& spec) {
  if (std::abs(w0.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("fit_halfspace_localized: w0 must be unit");
  if (ds.label_kind != LabelKind::kBoolean)
    throw std::invalid_argument("fit_halfspace_localized: need +-1 labels");

  // Deterministic strided split: every 5th sample is held out for the
  // fallback guard.
  LabeledDataset fit_part, val_part;
  fit_part.dim = val_part.dim = ds.dim;
  fit_part.label_kind = val_part.label_kind = LabelKind::kBoolean;
  fit_part.marginal = val_part.marginal = ds.marginal;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    LabeledDataset& dst = (i % 5 == 4) ? val_part : fit_part;
    const auto row = ds.row(i);
    dst.xs.insert(dst.xs.end(), row.begin(), row.end());
    dst.ys.push_back(ds.ys[i]);
  }
  if (val_part.size() == 0 || fit_part.size() == 0)
    return {w0, true};

  LocalizedFit out;
  out.w = w0;
  WeightVector w = w0;
  WeightVector grad(ds.dim);
  for (unsigned t = 0; t < spec.band_iterations; ++t) {
    const double band = spec.initial_band * std::pow(0.5, t);
    bool emptied = false;
    for (unsigned step = 0; step < spec.hinge_steps; ++step) {
      const std::size_t in_band =
          kernels::banded_hinge_subgradient(fit_part, w, band, &grad);
      if (in_band < spec.min_band_count) {
        emptied = true;
        break;
      }
      const double lr = spec.hinge_step_factor * band;
      for (std::size_t j = 0; j < ds.dim; ++j) w.v[j] -= lr * grad.v[j];
      const double n = w.norm();
      if (n == 0.0) {
        emptied = true;
        break;
      }
      w.scale(1.0 / n);
    }
    if (emptied) {
      out.band_exhausted = true;
      break;
    }
  }

  // Fallback guard: keep w0 unless the localized vector is at least as good
  // on the held-out split.
  const double err_new = kernels::sign_error(val_part, w);
  const double err_old = kernels::sign_error(val_part, w0);
  out.w = err_new <= err_old ? w : w0;
  return out;
}

}  // namespace relulab::learners
