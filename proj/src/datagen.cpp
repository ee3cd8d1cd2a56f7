#include "relulab/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relulab/parallel.hpp"

namespace relulab::datagen {

void SlpnInstance::validate() const {
  if (d == 0) throw std::invalid_argument("SlpnInstance: d must be >= 1");
  if (relevant.empty())
    throw std::invalid_argument("SlpnInstance: S must be non-empty");
  if (!std::is_sorted(relevant.begin(), relevant.end()) ||
      std::adjacent_find(relevant.begin(), relevant.end()) != relevant.end())
    throw std::invalid_argument("SlpnInstance: S must be strictly increasing");
  if (relevant.back() >= d)
    throw std::invalid_argument("SlpnInstance: S not contained in [0, d)");
  if (eta < 0.0 || eta >= 0.5)
    throw std::invalid_argument("SlpnInstance: eta must lie in [0, 1/2)");
}

LabeledDataset sample_slpn(const SlpnInstance& inst, std::size_t m,
                           std::uint64_t seed) {
  inst.validate();
  if (m == 0) throw std::invalid_argument("sample_slpn: m must be >= 1");
  const CounterRng cube(seed, stream::kCube);
  const CounterRng noise(seed, stream::kLabelNoise);
  LabeledDataset ds;
  ds.dim = inst.d;
  ds.label_kind = LabelKind::kBoolean;
  ds.marginal = MarginalTag::kBooleanCube;
  ds.xs.resize(m * inst.d);
  ds.ys.resize(m);
  par::parallel_for(m, [&](std::size_t i) {
    double* row = ds.xs.data() + i * inst.d;
    for (std::size_t j = 0; j < inst.d; ++j)
      row[j] = cube.rademacher(i * inst.d + j);
    double y = 1.0;
    for (std::size_t j : inst.relevant) y *= row[j];
    if (inst.eta > 0.0 && noise.bernoulli(i, inst.eta)) y = -y;
    ds.ys[i] = y;
  });
  return ds;
}

std::vector<double> gaussian_lift_sample(std::span<const double> x,
                                         const CounterRng& rng,
                                         std::uint64_t sample_index) {
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] != 1.0 && x[j] != -1.0)
      throw std::invalid_argument("gaussian_lift_sample: point not in {-1,+1}^d");
    out[j] = rng.half_normal(sample_index * x.size() + j) * x[j];
  }
  return out;
}

LabeledDataset lift_dataset(const LabeledDataset& cube, std::uint64_t seed) {
  if (cube.marginal != MarginalTag::kBooleanCube)
    throw std::invalid_argument("lift_dataset: expected a hypercube dataset");
  const CounterRng lift(seed, stream::kLift);
  LabeledDataset out = cube;
  out.marginal = MarginalTag::kLifted;
  const std::size_t d = cube.dim;
  par::parallel_for(cube.size(), [&](std::size_t i) {
    double* row = out.xs.data() + i * d;
    for (std::size_t j = 0; j < d; ++j)
      row[j] *= lift.half_normal(i * d + j);
  });
  return out;
}

double remap_label(double y) {
  if (y != 1.0 && y != -1.0)
    throw std::invalid_argument("remap_label: label must be +-1");
  return (y + 1.0) / 2.0;
}

LabeledDataset remap_labels(const LabeledDataset& ds) {
  if (ds.label_kind != LabelKind::kBoolean)
    throw std::invalid_argument("remap_labels: expected boolean labels");
  LabeledDataset out = ds;
  out.label_kind = LabelKind::kReal;
  for (double& y : out.ys) y = remap_label(y);
  return out;
}

LabeledDataset drop_coordinate(const LabeledDataset& ds, std::size_t j) {
  if (j >= ds.dim)
    throw std::out_of_range("drop_coordinate: index out of range");
  LabeledDataset out;
  out.dim = ds.dim - 1;
  out.label_kind = ds.label_kind;
  out.marginal = ds.marginal;
  out.ys = ds.ys;
  out.xs.resize(out.dim * ds.size());
  par::parallel_for(ds.size(), [&](std::size_t i) {
    const double* src = ds.xs.data() + i * ds.dim;
    double* dst = out.xs.data() + i * out.dim;
    for (std::size_t c = 0; c < j; ++c) dst[c] = src[c];
    for (std::size_t c = j + 1; c < ds.dim; ++c) dst[c - 1] = src[c];
  });
  return out;
}

double CorruptionModel::opt_upper_bound() const {
  switch (kind) {
    case CorruptionKind::kNone:
      return 0.0;
    case CorruptionKind::kFlipFraction:
      return magnitude;  // each corrupted point contributes <= 1
    case CorruptionKind::kAdditiveBounded:
    case CorruptionKind::kClampShift:
      return magnitude * magnitude;
  }
  return 0.0;
}

namespace {
double clamp01(double y) { return std::max(0.0, std::min(1.0, y)); }
}  // namespace

AgnosticDataset make_agnostic_relu_dataset(const WeightVector& w_star,
                                           const CorruptionModel& corruption,
                                           std::size_t m, std::uint64_t seed) {
  if (w_star.norm() > 1.0 + 1e-12)
    throw std::invalid_argument(
        "make_agnostic_relu_dataset: |w*| must be <= 1");
  if (corruption.magnitude < 0.0 ||
      (corruption.kind == CorruptionKind::kFlipFraction &&
       corruption.magnitude > 1.0))
    throw std::invalid_argument(
        "make_agnostic_relu_dataset: invalid corruption magnitude");
  if (m < 2)
    throw std::invalid_argument("make_agnostic_relu_dataset: m must be >= 2");

  const std::size_t d = w_star.dim();
  const CounterRng gauss(seed, stream::kGaussian);
  const CounterRng corrupt(seed, stream::kCorruption);

  AgnosticDataset out;
  out.data.dim = d;
  out.data.label_kind = LabelKind::kReal;
  out.data.marginal = MarginalTag::kGaussian;
  out.data.xs.resize(m * d);
  out.data.ys.resize(m);

  double acc[3];
  par::block_sum_vec(
      m, 3,
      [&](std::size_t i, double* part) {
        double* row = out.data.xs.data() + i * d;
        double dotp = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          row[j] = gauss.gaussian(i * d + j);
          dotp += w_star.v[j] * row[j];
        }
        const double raw = std::max(0.0, dotp);
        const double clean = clamp01(raw);
        double y = clean;
        switch (corruption.kind) {
          case CorruptionKind::kNone:
            break;
          case CorruptionKind::kFlipFraction:
            if (corrupt.bernoulli(i, corruption.magnitude)) y = 1.0 - y;
            break;
          case CorruptionKind::kAdditiveBounded:
            y = clamp01(y + corruption.magnitude *
                                (2.0 * corrupt.uniform01(i) - 1.0));
            break;
          case CorruptionKind::kClampShift:
            y = clamp01(y + corruption.magnitude);
            break;
        }
        out.data.ys[i] = y;
        const double clamp_err = raw - clean;
        const double resid = raw - y;
        part[0] += resid * resid;
        part[1] += resid * resid * resid * resid;
        part[2] += clamp_err * clamp_err;
      },
      acc);

  const double n = static_cast<double>(m);
  out.opt.value = acc[0] / n;
  const double var = std::max(0.0, acc[1] / n - out.opt.value * out.opt.value);
  out.opt.stderr_ = std::sqrt(var / n);
  out.opt.clamp_contrib = acc[2] / n;
  out.opt.upper_bound = corruption.opt_upper_bound() + out.opt.clamp_contrib;
  out.opt.exact = corruption.kind == CorruptionKind::kNone &&
                  out.opt.clamp_contrib == 0.0;
  return out;
}

}  // namespace relulab::datagen
