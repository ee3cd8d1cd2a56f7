#include "relulab/slpn_reduction.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "relulab/datagen.hpp"
#include "relulab/gaussian_stats.hpp"
#include "relulab/hermite.hpp"
#include "relulab/kernels.hpp"

namespace relulab::reduction {

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t j, std::uint64_t rep) {
  std::uint64_t x = seed ^ (0xA24BAED4963EE407ull + j) ^
                    ((rep + 1) * 0x9FB21C651E98DF25ull);
  x ^= x >> 28;
  x *= 0x2545F4914F6CDD1Dull;
  x ^= x >> 29;
  return x;
}

LabeledDataset take_rows(const LabeledDataset& ds, std::size_t begin,
                         std::size_t end) {
  LabeledDataset out;
  out.dim = ds.dim;
  out.label_kind = ds.label_kind;
  out.marginal = ds.marginal;
  out.xs.assign(ds.xs.begin() + begin * ds.dim, ds.xs.begin() + end * ds.dim);
  out.ys.assign(ds.ys.begin() + begin, ds.ys.begin() + end);
  return out;
}

// Rows [begin, end) with coordinate j removed; the reduction drops only the
// training slice this way and validates against the shared lifted matrix.
LabeledDataset dropped_rows(const LabeledDataset& ds, std::size_t j,
                            std::size_t begin, std::size_t end) {
  LabeledDataset out;
  out.dim = ds.dim - 1;
  out.label_kind = ds.label_kind;
  out.marginal = ds.marginal;
  out.xs.resize(out.dim * (end - begin));
  out.ys.assign(ds.ys.begin() + begin, ds.ys.begin() + end);
  for (std::size_t i = begin; i < end; ++i) {
    const double* src = ds.xs.data() + i * ds.dim;
    double* dst = out.xs.data() + (i - begin) * out.dim;
    for (std::size_t c = 0; c < j; ++c) dst[c] = src[c];
    for (std::size_t c = j + 1; c < ds.dim; ++c) dst[c - 1] = src[c];
  }
  return out;
}

}  // namespace

void ReductionConfig::validate() const {
  if (m1 < 1 || m2 < 1)
    throw std::invalid_argument("ReductionConfig: M1 and M2 must be >= 1");
  if (!(epsilon > 0.0))
    throw std::invalid_argument("ReductionConfig: epsilon must be positive");
}

double auto_epsilon(unsigned k, double eta) {
  if (eta < 0.0 || eta >= 0.5)
    throw std::invalid_argument("auto_epsilon: eta must lie in [0, 1/2)");
  return 0.8 * (1.0 - 2.0 * eta) *
         hermite::relu_parity_inner_product(k, k + 40);
}

std::size_t default_validation_count(double epsilon) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("default_validation_count: epsilon <= 0");
  return static_cast<std::size_t>(std::ceil(100.0 / (epsilon * epsilon)));
}

double detection_threshold(double epsilon) {
  return gstats::kOptimalRandomLabelLoss - epsilon / 4.0;
}

std::vector<DroppedPair> build_dropped_datasets(const LabeledDataset& raw,
                                                const ReductionConfig& cfg,
                                                std::uint64_t seed) {
  cfg.validate();
  if (raw.size() != cfg.m1 + cfg.m2)
    throw std::invalid_argument(
        "build_dropped_datasets: raw sample count != M1 + M2");
  const LabeledDataset lifted =
      datagen::remap_labels(datagen::lift_dataset(raw, seed));
  std::vector<DroppedPair> pairs;
  pairs.reserve(raw.dim);
  for (std::size_t j = 0; j < raw.dim; ++j) {
    const LabeledDataset dropped = datagen::drop_coordinate(lifted, j);
    DroppedPair pair;
    pair.train = take_rows(dropped, 0, cfg.m1);
    pair.validation = take_rows(dropped, cfg.m1, raw.size());
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

DetectResult detect_relevant(const LabeledDataset& train,
                             const LabeledDataset& validation,
                             const ReductionConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (train.size() != cfg.m1 || validation.size() != cfg.m2)
    throw std::invalid_argument("detect_relevant: dataset sizes != config");
  const learners::ReluFit fit = learners::fit_relu(train, cfg.learner, seed);
  const double val_err = kernels::relu_square_loss(validation, fit.w);
  return {val_err >= detection_threshold(cfg.epsilon), val_err};
}

ReductionReport recover_parity(const LabeledDataset& raw,
                               const ReductionConfig& cfg,
                               std::uint64_t seed) {
  cfg.validate();
  if (raw.size() != cfg.m1 + cfg.m2)
    throw std::invalid_argument("recover_parity: raw sample count != M1 + M2");

  const std::size_t d = raw.dim;
  ReductionReport report;
  report.epsilon = cfg.epsilon;
  report.threshold = detection_threshold(cfg.epsilon);
  report.val_errors.assign(d, std::nan(""));
  report.relevant_votes.assign(d, 0);

  for (unsigned rep = 0; rep < cfg.repetitions; ++rep) {
    const double t0 = now_ms();
    const LabeledDataset lifted = datagen::remap_labels(
        datagen::lift_dataset(raw, mix_seed(seed, 0x11F7, rep)));
    report.lift_ms += now_ms() - t0;

    for (std::size_t j = 0; j < d; ++j) {
      try {
        const double t1 = now_ms();
        const LabeledDataset train = dropped_rows(lifted, j, 0, cfg.m1);
        const learners::ReluFit fit =
            learners::fit_relu(train, cfg.learner, mix_seed(seed, j, rep));
        report.candidates_per_fit = fit.candidates_evaluated;
        const double t2 = now_ms();
        report.fit_ms += t2 - t1;
        const double val_err = kernels::relu_square_loss_rows_skip(
            lifted, fit.w, cfg.m1, raw.size(), j);
        report.validate_ms += now_ms() - t2;
        report.val_errors[j] = val_err;
        if (val_err >= report.threshold) ++report.relevant_votes[j];
      } catch (const std::exception& e) {
        report.failures.push_back("coordinate " + std::to_string(j) + ": " +
                                  e.what());
      }
    }
  }

  for (std::size_t j = 0; j < d; ++j)
    if (2 * report.relevant_votes[j] > cfg.repetitions)
      report.recovered.push_back(j);
  return report;
}

}  // namespace relulab::reduction
