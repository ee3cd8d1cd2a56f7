#include "relulab/approx_relu.hpp"

#include <cmath>
#include <stdexcept>

#include "relulab/kernels.hpp"
#include "relulab/parallel.hpp"
#include "relulab/rng.hpp"

namespace relulab::approx {

std::vector<double> ApproxConfig::default_alpha_grid() {
  std::vector<double> grid(8);
  const double lo = std::log(1e-2), hi = std::log(0.5);
  for (std::size_t i = 0; i < grid.size(); ++i)
    grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) /
                                static_cast<double>(grid.size() - 1));
  return grid;
}

LabeledDataset threshold_labels(const LabeledDataset& ds, double alpha) {
  if (ds.label_kind != LabelKind::kReal)
    throw std::invalid_argument("threshold_labels: expected real labels");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("threshold_labels: alpha must lie in (0, 1)");
  LabeledDataset out = ds;
  out.label_kind = LabelKind::kBoolean;
  for (std::size_t i = 0; i < out.size(); ++i)
    out.ys[i] = out.ys[i] - alpha >= 0.0 ? 1.0 : -1.0;
  return out;
}

HalfspaceRelu fit_relu_via_halfspace(const LabeledDataset& ds, double alpha,
                                     const ApproxConfig& cfg,
                                     std::uint64_t seed) {
  const LabeledDataset thresholded = threshold_labels(ds, alpha);
  HalfspaceRelu out;
  const auto averaged = learners::fit_halfspace_averaging(thresholded);
  if (averaged.has_value()) {
    out.w = *averaged;
  } else {
    out.direction_recovered = false;
    out.w = learners::random_unit_vector(ds.dim, seed);
  }
  if (cfg.use_localization) {
    const learners::LocalizedFit localized =
        learners::fit_halfspace_localized(thresholded, out.w, cfg.halfspace);
    out.w = localized.w;
    out.band_exhausted = localized.band_exhausted;
  }
  return out;
}

double empirical_square_loss(const LabeledDataset& ds, const WeightVector& w) {
  return kernels::relu_square_loss(ds, w);
}

AlphaSelection select_alpha(const LabeledDataset& ds, const ApproxConfig& cfg,
                            std::uint64_t seed) {
  if (cfg.alpha_grid.empty())
    throw std::invalid_argument("select_alpha: empty alpha grid");
  for (std::size_t i = 1; i < cfg.alpha_grid.size(); ++i)
    if (cfg.alpha_grid[i] <= cfg.alpha_grid[i - 1])
      throw std::invalid_argument("select_alpha: grid must be ascending");

  // Seeded holdout assignment.
  const CounterRng rng(seed, stream::kSplit);
  LabeledDataset train, holdout;
  train.dim = holdout.dim = ds.dim;
  train.label_kind = holdout.label_kind = ds.label_kind;
  train.marginal = holdout.marginal = ds.marginal;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    LabeledDataset& dst =
        rng.uniform01(i) < cfg.holdout_fraction ? holdout : train;
    const auto row = ds.row(i);
    dst.xs.insert(dst.xs.end(), row.begin(), row.end());
    dst.ys.push_back(ds.ys[i]);
  }
  if (train.size() == 0 || holdout.size() == 0)
    throw std::invalid_argument("select_alpha: split produced an empty part");

  AlphaSelection sel;
  bool have_best = false;
  for (double alpha : cfg.alpha_grid) {
    const HalfspaceRelu fit = fit_relu_via_halfspace(train, alpha, cfg, seed);
    AlphaEntry entry;
    entry.alpha = alpha;
    entry.direction_recovered = fit.direction_recovered;
    entry.holdout_loss = empirical_square_loss(holdout, fit.w);

    // Diagnostic rescaling: loss(c w) = c^2 a - 2 c b + mean y^2 on the
    // holdout, minimized over c in [0, 1].
    kernels::DirectionMoments dm;
    {
      const double* xs = holdout.xs.data();
      const double* ys = holdout.ys.data();
      const std::size_t d = holdout.dim;
      const double* wv = fit.w.v.data();
      double acc[2];
      par::block_sum_vec(
          holdout.size(), 2,
          [=](std::size_t i, double* part) {
            const double* row = xs + i * d;
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) s += wv[j] * row[j];
            const double relu = s > 0.0 ? s : 0.0;
            part[0] += relu * relu;
            part[1] += relu * ys[i];
          },
          acc);
      dm.a = acc[0] / static_cast<double>(holdout.size());
      dm.b = acc[1] / static_cast<double>(holdout.size());
    }
    const double y2 = kernels::mean_label_square(holdout);
    double c = dm.a > 0.0 ? dm.b / dm.a : 0.0;
    c = std::max(0.0, std::min(1.0, c));
    entry.rescale = c;
    entry.rescaled_loss = c * c * dm.a - 2.0 * c * dm.b + y2;
    sel.table.push_back(entry);

    if (!have_best || entry.holdout_loss < sel.holdout_loss) {
      have_best = true;
      sel.w = fit.w;
      sel.alpha_star = alpha;
      sel.holdout_loss = entry.holdout_loss;
      sel.direction_recovered = entry.direction_recovered;
      sel.rescale = entry.rescale;
      sel.rescaled_loss = entry.rescaled_loss;
    }
  }
  return sel;
}

}  // namespace relulab::approx
