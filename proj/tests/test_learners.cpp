#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "relulab/datagen.hpp"
#include "relulab/gaussian_stats.hpp"
#include "relulab/kernels.hpp"
#include "relulab/learners.hpp"
#include "relulab/rng.hpp"

using namespace relulab;
using namespace relulab::learners;

namespace {

LabeledDataset realizable_dataset(const WeightVector& w_star, std::size_t m,
                                  std::uint64_t seed) {
  return datagen::make_agnostic_relu_dataset(w_star, {}, m, seed).data;
}

LabeledDataset lifted_parity(std::size_t d, std::vector<std::size_t> S,
                             double eta, std::size_t m, std::uint64_t seed) {
  datagen::SlpnInstance inst;
  inst.d = d;
  inst.relevant = std::move(S);
  inst.eta = eta;
  return datagen::remap_labels(
      datagen::lift_dataset(datagen::sample_slpn(inst, m, seed), seed));
}

double distance(const WeightVector& a, const WeightVector& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.dim(); ++j)
    s += (a.v[j] - b.v[j]) * (a.v[j] - b.v[j]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("gradient descent recovers a realizable relu") {
  WeightVector w_star(8);
  w_star.v[1] = 0.6 * gstats::kOptimalNorm;
  w_star.v[4] = -0.8 * gstats::kOptimalNorm;
  ReluLearnerSpec spec;
  spec.kind = ReluLearnerKind::kGradientDescent;
  for (std::uint64_t seed : {3u, 4u}) {
    const LabeledDataset ds = realizable_dataset(w_star, 10000, seed);
    const ReluFit fit = fit_relu(ds, spec, seed);
    CHECK(distance(fit.w, w_star) <= 0.05);
    CHECK(fit.w.norm() <= 1.0 + 1e-9);
  }
}

TEST_CASE("gradient descent is deterministic under a fixed seed") {
  WeightVector w_star(5);
  w_star.v[0] = 0.3;
  const LabeledDataset ds = realizable_dataset(w_star, 4000, 9);
  ReluLearnerSpec spec;
  spec.kind = ReluLearnerKind::kGradientDescent;
  const ReluFit a = fit_relu(ds, spec, 123);
  const ReluFit b = fit_relu(ds, spec, 123);
  CHECK(a.w.v == b.w.v);
  CHECK(a.train_loss == b.train_loss);
}

TEST_CASE("analytic gradient matches central finite differences") {
  const CounterRng rng(55, 0);
  std::uint64_t ctr = 0;
  for (int probe = 0; probe < 20; ++probe) {
    const std::size_t d = 3 + probe % 4;
    LabeledDataset ds;
    ds.dim = d;
    const std::size_t m = 400;
    ds.xs.resize(m * d);
    ds.ys.resize(m);
    for (std::size_t i = 0; i < m * d; ++i) ds.xs[i] = rng.gaussian(ctr++);
    for (std::size_t i = 0; i < m; ++i) ds.ys[i] = rng.uniform01(ctr++);
    WeightVector w(d);
    for (std::size_t j = 0; j < d; ++j) w.v[j] = 0.4 * rng.gaussian(ctr++);

    WeightVector grad(d);
    kernels::relu_loss_gradient(ds, w, &grad);
    const double h = 1e-6;
    for (std::size_t j = 0; j < d; ++j) {
      WeightVector lo = w, hi = w;
      lo.v[j] -= h;
      hi.v[j] += h;
      const double fd = (kernels::relu_square_loss(ds, hi) -
                         kernels::relu_square_loss(ds, lo)) /
                        (2.0 * h);
      const double scale = std::max(1.0, std::abs(fd));
      CHECK(std::abs(grad.v[j] - fd) <= 1e-5 * scale);
    }
  }
}

TEST_CASE("subset scan finds the parity support") {
  // eta = 0.4 keeps the loss-optimal norm near 1/sqrt(2 pi), so with the
  // canonical single-point grid the argmin is exactly w_S.
  const LabeledDataset ds = lifted_parity(5, {1, 3}, 0.4, 100000, 14);
  ReluLearnerSpec spec;
  spec.kind = ReluLearnerKind::kSubsetScan;
  spec.k_max = 2;
  spec.norm_grid = {gstats::kOptimalNorm};
  const ReluFit fit = fit_relu(ds, spec, 1);
  const double coef = gstats::kOptimalNorm / std::numbers::sqrt2;
  CHECK(fit.w.v[1] == doctest::Approx(coef));
  CHECK(fit.w.v[3] == doctest::Approx(coef));
  CHECK(fit.w.v[0] == 0.0);
  CHECK(fit.w.v[2] == 0.0);
  CHECK(fit.w.v[4] == 0.0);
  // directions: 5 + C(5,2) = 15, one norm each, plus the zero vector
  CHECK(fit.candidates_evaluated == 16);
}

TEST_CASE("subset scan with the default grid still selects the support") {
  const LabeledDataset ds = lifted_parity(6, {0, 4}, 0.1, 100000, 15);
  ReluLearnerSpec spec;
  spec.kind = ReluLearnerKind::kSubsetScan;
  spec.k_max = 2;
  const ReluFit fit = fit_relu(ds, spec, 1);
  for (std::size_t j : {0u, 4u}) CHECK(fit.w.v[j] > 0.0);
  for (std::size_t j : {1u, 2u, 3u, 5u}) CHECK(fit.w.v[j] == 0.0);
  CHECK(fit.candidates_evaluated ==
        1 + (6 + 15) * ReluLearnerSpec::default_norm_grid().size());
}

TEST_CASE("subset scan on all-zero labels returns the zero vector") {
  LabeledDataset ds;
  ds.dim = 4;
  const CounterRng rng(2, 0);
  ds.xs.resize(4 * 1000);
  for (std::size_t i = 0; i < ds.xs.size(); ++i) ds.xs[i] = rng.gaussian(i);
  ds.ys.assign(1000, 0.0);
  ReluLearnerSpec spec;
  spec.kind = ReluLearnerKind::kSubsetScan;
  const ReluFit fit = fit_relu(ds, spec, 1);
  CHECK(fit.train_loss == 0.0);
  for (double v : fit.w.v) CHECK(v == 0.0);
}

TEST_CASE("subset scan is permutation-equivariant") {
  const LabeledDataset ds = lifted_parity(5, {0, 2}, 0.1, 50000, 16);
  // permute coordinates with sigma = (4 0 3 1 2): new column j = old sigma[j]
  const std::vector<std::size_t> sigma = {4, 0, 3, 1, 2};
  LabeledDataset permuted = ds;
  for (std::size_t i = 0; i < ds.size(); ++i)
    for (std::size_t j = 0; j < 5; ++j)
      permuted.xs[i * 5 + j] = ds.xs[i * 5 + sigma[j]];
  ReluLearnerSpec spec;
  spec.kind = ReluLearnerKind::kSubsetScan;
  spec.k_max = 2;
  const ReluFit base = fit_relu(ds, spec, 1);
  const ReluFit perm = fit_relu(permuted, spec, 1);
  for (std::size_t j = 0; j < 5; ++j)
    CHECK(perm.w.v[j] == base.w.v[sigma[j]]);
  CHECK(perm.train_loss == doctest::Approx(base.train_loss).epsilon(1e-12));
}

TEST_CASE("fit_relu rejects bad inputs") {
  ReluLearnerSpec spec;
  LabeledDataset empty;
  empty.dim = 2;
  CHECK_THROWS_AS(fit_relu(empty, spec, 1), std::invalid_argument);
  LabeledDataset boolean;
  boolean.dim = 1;
  boolean.xs = {1.0};
  boolean.ys = {1.0};
  boolean.label_kind = LabelKind::kBoolean;
  CHECK_THROWS_AS(fit_relu(boolean, spec, 1), std::invalid_argument);
  ReluLearnerSpec bad_grid;
  bad_grid.kind = ReluLearnerKind::kSubsetScan;
  bad_grid.norm_grid = {2.0};
  LabeledDataset ok;
  ok.dim = 1;
  ok.xs = {0.5};
  ok.ys = {0.5};
  CHECK_THROWS_AS(fit_relu(ok, bad_grid, 1), std::invalid_argument);
}

TEST_CASE("averaging recovers a clean halfspace direction") {
  datagen::SlpnInstance inst;
  inst.d = 10;
  inst.relevant = {0};
  inst.eta = 0.0;
  // labels sign(x_0) over the lifted gaussian marginal
  const LabeledDataset ds =
      datagen::lift_dataset(datagen::sample_slpn(inst, 100000, 8), 8);
  const auto fit = fit_halfspace_averaging(ds);
  REQUIRE(fit.has_value());
  CHECK(std::abs(fit->norm() - 1.0) <= 1e-9);
  WeightVector e1(10);
  e1.v[0] = 1.0;
  CHECK(gstats::angle_disagreement(fit->v, e1.v).angle <= 0.02);
}

TEST_CASE("averaging flags a zero mean on constant labels") {
  const CounterRng rng(77, 0);
  LabeledDataset ds;
  ds.dim = 10;
  ds.label_kind = LabelKind::kBoolean;
  const std::size_t m = 100000;
  ds.xs.resize(m * 10);
  for (std::size_t i = 0; i < ds.xs.size(); ++i) ds.xs[i] = rng.gaussian(i);
  ds.ys.assign(m, 1.0);
  CHECK_FALSE(fit_halfspace_averaging(ds).has_value());
}

TEST_CASE("averaging in one dimension is the exact sign direction") {
  const CounterRng rng(78, 0);
  LabeledDataset ds;
  ds.dim = 1;
  const std::size_t m = 10000;
  ds.label_kind = LabelKind::kBoolean;
  ds.xs.resize(m);
  ds.ys.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    ds.xs[i] = rng.gaussian(i);
    ds.ys[i] = ds.xs[i] >= 0.0 ? 1.0 : -1.0;
  }
  const auto fit = fit_halfspace_averaging(ds);
  REQUIRE(fit.has_value());
  CHECK(fit->v[0] == 1.0);
}

namespace {

LabeledDataset halfspace_data(const WeightVector& v, double flip_eta,
                              std::size_t m, std::uint64_t seed) {
  const CounterRng rng(seed, stream::kGaussian);
  const CounterRng noise(seed, stream::kLabelNoise);
  LabeledDataset ds;
  ds.dim = v.dim();
  ds.label_kind = LabelKind::kBoolean;
  ds.xs.resize(m * v.dim());
  ds.ys.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < v.dim(); ++j) {
      const double g = rng.gaussian(i * v.dim() + j);
      ds.xs[i * v.dim() + j] = g;
      s += v.v[j] * g;
    }
    double y = s >= 0.0 ? 1.0 : -1.0;
    if (flip_eta > 0.0 && noise.bernoulli(i, flip_eta)) y = -y;
    ds.ys[i] = y;
  }
  return ds;
}

WeightVector tilted(const WeightVector& truth, double angle,
                    std::size_t other) {
  WeightVector w = truth;
  w.v[other] += std::tan(angle) * truth.norm();
  return w.normalized();
}

}  // namespace

TEST_CASE("localized fitting never loses to its start") {
  WeightVector truth(6);
  truth.v[0] = 1.0;
  const LabeledDataset ds = halfspace_data(truth, 0.0, 50000, 31);
  HalfspaceLearnerSpec spec;
  const LocalizedFit fit = fit_halfspace_localized(ds, truth, spec);
  CHECK(std::abs(fit.w.norm() - 1.0) <= 1e-9);
  // guard contract: held-out 0/1 error no worse than w0 = truth
  LabeledDataset val;
  val.dim = 6;
  val.label_kind = LabelKind::kBoolean;
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (i % 5 == 4) {
      const auto row = ds.row(i);
      val.xs.insert(val.xs.end(), row.begin(), row.end());
      val.ys.push_back(ds.ys[i]);
    }
  CHECK(kernels::sign_error(val, fit.w) <=
        kernels::sign_error(val, truth) + 1e-12);
}

TEST_CASE("localization improves a tilted start on most seeds") {
  WeightVector truth(10);
  truth.v[0] = 1.0;
  int improved = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const LabeledDataset ds = halfspace_data(truth, 0.0, 100000, 1000 + seed);
    const WeightVector w0 = tilted(truth, 0.3, 1 + seed % 9);
    const LocalizedFit fit = fit_halfspace_localized(ds, w0, {});
    const double before = gstats::angle_disagreement(w0.v, truth.v).angle;
    const double after = gstats::angle_disagreement(fit.w.v, truth.v).angle;
    if (after <= before) ++improved;
  }
  CHECK(improved >= 9);
}

TEST_CASE("localization beats plain averaging under flip noise on most seeds") {
  WeightVector truth(8);
  truth.v[2] = 0.6;
  truth.v[5] = -0.8;
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const LabeledDataset ds = halfspace_data(truth.normalized(), 0.05, 100000,
                                             2000 + seed);
    const auto avg = fit_halfspace_averaging(ds);
    REQUIRE(avg.has_value());
    const LocalizedFit loc = fit_halfspace_localized(ds, *avg, {});
    const LabeledDataset probe =
        halfspace_data(truth.normalized(), 0.0, 50000, 5000 + seed);
    if (kernels::sign_error(probe, loc.w) <=
        kernels::sign_error(probe, *avg) + 1e-12)
      ++wins;
  }
  CHECK(wins >= 7);
}

TEST_CASE("localized fit validates inputs") {
  WeightVector not_unit(3);
  not_unit.v[0] = 0.5;
  LabeledDataset ds;
  ds.dim = 3;
  ds.label_kind = LabelKind::kBoolean;
  ds.xs = {1, 0, 0};
  ds.ys = {1};
  CHECK_THROWS_AS(fit_halfspace_localized(ds, not_unit, {}),
                  std::invalid_argument);
}
