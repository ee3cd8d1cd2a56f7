#include "relulab/sq_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relulab/gaussian_stats.hpp"
#include "relulab/kernels.hpp"
#include "relulab/parallel.hpp"
#include "relulab/rng.hpp"

namespace relulab::sq {

DistHandle DistHandle::from_dataset(LabeledDataset ds) {
  if (ds.size() == 0)
    throw std::invalid_argument("DistHandle: empty dataset");
  DistHandle h;
  h.dim_ = ds.dim;
  h.data_ = std::make_shared<const LabeledDataset>(std::move(ds));
  return h;
}

DistHandle DistHandle::generative(std::size_t dim, Generator gen) {
  if (!gen) throw std::invalid_argument("DistHandle: null generator");
  DistHandle h;
  h.dim_ = dim;
  h.gen_ = std::move(gen);
  return h;
}

DistHandle DistHandle::lifted_parity(const datagen::SlpnInstance& inst,
                                     std::uint64_t seed) {
  inst.validate();
  const CounterRng cube(seed, stream::kCube);
  const CounterRng lift(seed, stream::kLift);
  const CounterRng noise(seed, stream::kLabelNoise);
  const datagen::SlpnInstance copy = inst;
  return generative(inst.d, [=](std::uint64_t i, double* x, double* y) {
    double parity = 1.0;
    for (std::size_t j = 0; j < copy.d; ++j) {
      const double cube_bit = cube.rademacher(i * copy.d + j);
      x[j] = lift.half_normal(i * copy.d + j) * cube_bit;
      if (std::find(copy.relevant.begin(), copy.relevant.end(), j) !=
          copy.relevant.end())
        parity *= cube_bit;
    }
    if (copy.eta > 0.0 && noise.bernoulli(i, copy.eta)) parity = -parity;
    *y = (parity + 1.0) / 2.0;  // remapped label in {0, 1}
  });
}

void DistHandle::integrand_moments(const SqQuery& q, std::size_t n,
                                   double* mean, double* second_moment) const {
  if (!q.fn) throw std::invalid_argument("SqQuery: null function");
  double acc[2];
  if (data_) {
    const LabeledDataset& ds = *data_;
    par::block_sum_vec(
        ds.size(), 2,
        [&](std::size_t i, double* part) {
          const double* row = ds.xs.data() + i * ds.dim;
          double v = q.fn(row);
          if (q.kind == QueryKind::kCorrelation) v *= ds.ys[i];
          part[0] += v;
          part[1] += v * v;
        },
        acc);
    *mean = acc[0] / static_cast<double>(ds.size());
    *second_moment = acc[1] / static_cast<double>(ds.size());
    return;
  }
  if (n < 2) throw std::invalid_argument("integrand_moments: need n >= 2");
  par::block_sum_vec(
      n, 2,
      [&](std::size_t i, double* part) {
        thread_local std::vector<double> x;
        if (x.size() < dim_) x.resize(dim_);
        double y = 0.0;
        gen_(i, x.data(), &y);
        double v = q.fn(x.data());
        if (q.kind == QueryKind::kCorrelation) v *= y;
        part[0] += v;
        part[1] += v * v;
      },
      acc);
  *mean = acc[0] / static_cast<double>(n);
  *second_moment = acc[1] / static_cast<double>(n);
}

double DistHandle::square_loss(const WeightVector& w, std::size_t n_mc) const {
  if (data_) return kernels::relu_square_loss(*data_, w);
  double acc[2];
  par::block_sum_vec(
      n_mc, 2,
      [&](std::size_t i, double* part) {
        thread_local std::vector<double> x;
        if (x.size() < dim_) x.resize(dim_);
        double y = 0.0;
        gen_(i, x.data(), &y);
        double s = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) s += w.v[j] * x[j];
        const double r = (s > 0.0 ? s : 0.0) - y;
        part[0] += r * r;
        part[1] += 1.0;
      },
      acc);
  return acc[0] / acc[1];
}

std::vector<AdversaryRule> all_adversary_rules() {
  return {AdversaryRule::kPlusTau,       AdversaryRule::kMinusTau,
          AdversaryRule::kTowardZero,    AdversaryRule::kTowardOptConst,
          AdversaryRule::kQuantize,      AdversaryRule::kQuantizeFloor,
          AdversaryRule::kClipSmall,     AdversaryRule::kHashSign,
          AdversaryRule::kCorrTowardZero, AdversaryRule::kCorrMinusOnly};
}

std::string adversary_rule_name(AdversaryRule rule) {
  switch (rule) {
    case AdversaryRule::kPlusTau: return "plus-tau";
    case AdversaryRule::kMinusTau: return "minus-tau";
    case AdversaryRule::kTowardZero: return "toward-zero";
    case AdversaryRule::kTowardOptConst: return "toward-opt-const";
    case AdversaryRule::kQuantize: return "quantize";
    case AdversaryRule::kQuantizeFloor: return "quantize-floor";
    case AdversaryRule::kClipSmall: return "clip-small";
    case AdversaryRule::kHashSign: return "hash-sign";
    case AdversaryRule::kCorrTowardZero: return "corr-toward-zero";
    case AdversaryRule::kCorrMinusOnly: return "corr-minus-only";
  }
  return "unknown";
}

namespace {

// Moves `value` toward `target` by at most `step`, never overshooting.
double move_toward(double value, double target, double step) {
  if (value < target) return std::min(target, value + step);
  return std::max(target, value - step);
}

double apply_adversary(AdversaryRule rule, QueryKind kind, double truth,
                       double tau, std::uint64_t query_index) {
  switch (rule) {
    case AdversaryRule::kPlusTau:
      return truth + tau;
    case AdversaryRule::kMinusTau:
      return truth - tau;
    case AdversaryRule::kTowardZero:
      return move_toward(truth, 0.0, tau);
    case AdversaryRule::kTowardOptConst:
      return move_toward(truth, gstats::kOptimalRandomLabelLoss, tau);
    case AdversaryRule::kQuantize:
      return std::round(truth / tau) * tau;
    case AdversaryRule::kQuantizeFloor:
      return std::floor(truth / tau) * tau;
    case AdversaryRule::kClipSmall:
      return std::abs(truth) < tau ? 0.0 : truth;
    case AdversaryRule::kHashSign: {
      std::uint64_t h = query_index * 0x9E3779B97F4A7C15ull;
      h ^= h >> 32;
      return (h & 1) ? truth + tau : truth - tau;
    }
    case AdversaryRule::kCorrTowardZero:
      return kind == QueryKind::kCorrelation ? move_toward(truth, 0.0, tau)
                                             : truth;
    case AdversaryRule::kCorrMinusOnly:
      return kind == QueryKind::kCorrelation ? truth - tau : truth;
  }
  return truth;
}

}  // namespace

double sq_answer(SqOracle& oracle, const SqQuery& q, const DistHandle& dist) {
  if (!(q.tau > 0.0)) throw std::invalid_argument("sq_answer: tau must be > 0");
  const std::uint64_t index = oracle.query_count++;

  double mean = 0.0, second = 0.0;
  std::size_t used = 0;
  if (dist.materialized() || oracle.fixed_samples > 0) {
    used = dist.materialized() ? dist.data()->size() : oracle.fixed_samples;
    dist.integrand_moments(q, used, &mean, &second);
  } else {
    // Escalate until 3 stderr <= tau * norm (both sides re-measured).
    std::size_t n = oracle.initial_samples;
    for (;;) {
      dist.integrand_moments(q, n, &mean, &second);
      used = n;
      const double var = std::max(0.0, second - mean * mean);
      const double se = std::sqrt(var / static_cast<double>(n));
      const double norm = std::sqrt(std::max(second, 1e-300));
      if (3.0 * se <= q.tau * norm) break;
      if (n >= oracle.max_samples)
        throw std::runtime_error(
            "sq_answer: sampling escalation cap reached before meeting the "
            "tolerance");
      n = std::min(oracle.max_samples, n * 2);
    }
  }

  const double norm = second > 0.0 ? std::sqrt(second) : 1.0;
  double answer = mean;
  if (oracle.mode == OracleMode::kAdversarialRounding) {
    // Perturb the normalized answer, then restore scale.
    const double normalized =
        apply_adversary(oracle.rule, q.kind, mean / norm, q.tau, index);
    answer = normalized * norm;
  }

  if (oracle.keep_log)
    oracle.log.push_back({q.kind, norm, q.tau, answer, used});
  return answer;
}

double gradient_via_sq(const WeightVector& w, std::size_t i, SqOracle& oracle,
                       const DistHandle& dist, double tau) {
  if (i >= w.dim())
    throw std::out_of_range("gradient_via_sq: coordinate out of range");
  const std::vector<double> wv = w.v;
  const std::size_t d = w.dim();

  SqQuery correlation;
  correlation.kind = QueryKind::kCorrelation;
  correlation.tau = tau;
  correlation.fn = [wv, d, i](const double* x) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += wv[j] * x[j];
    return s >= 0.0 ? -2.0 * x[i] : 0.0;  // 1_+(0) = 1
  };

  SqQuery independent;
  independent.kind = QueryKind::kTargetIndependent;
  independent.tau = tau;
  independent.fn = [wv, d, i](const double* x) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += wv[j] * x[j];
    return s >= 0.0 ? 2.0 * s * x[i] : 0.0;  // ReLU_w(x) = s on this event
  };

  return sq_answer(oracle, independent, dist) +
         sq_answer(oracle, correlation, dist);
}

SqTrajectory gd_via_sq(const WeightVector& w0, unsigned steps, double lr,
                       SqOracle& oracle, const DistHandle& dist, double tau) {
  if (steps < 1) throw std::invalid_argument("gd_via_sq: steps must be >= 1");
  if (lr < 0.0) throw std::invalid_argument("gd_via_sq: negative step size");
  SqTrajectory traj;
  WeightVector w = w0;
  traj.ws.push_back(w);
  traj.losses.push_back(dist.square_loss(w));
  const std::uint64_t start_count = oracle.query_count;
  WeightVector grad(w.dim());
  for (unsigned step = 0; step < steps; ++step) {
    for (std::size_t i = 0; i < w.dim(); ++i)
      grad.v[i] = gradient_via_sq(w, i, oracle, dist, tau);
    for (std::size_t i = 0; i < w.dim(); ++i) w.v[i] -= lr * grad.v[i];
    const double norm = w.norm();
    if (norm > 1.0) w.scale(1.0 / norm);
    traj.ws.push_back(w);
    traj.losses.push_back(dist.square_loss(w));
  }
  traj.queries = oracle.query_count - start_count;
  return traj;
}

double restricted_parity_query_truth(const std::vector<std::size_t>& S,
                                     std::size_t d, const SqQuery& query,
                                     std::size_t n, std::uint64_t seed) {
  if (S.empty())
    throw std::invalid_argument("restricted_parity_query_truth: empty S");
  for (std::size_t j : S)
    if (j >= d)
      throw std::invalid_argument("restricted_parity_query_truth: S not in [0,d)");
  const CounterRng cube(seed, stream::kCube);
  const CounterRng lift(seed, stream::kLift);

  // E over (x, g): evaluate q at nu(x, g), with chi_S(x) alongside.
  double acc[2];
  par::block_sum_vec(
      n, 2,
      [&](std::size_t i, double* part) {
        thread_local std::vector<double> lifted;
        if (lifted.size() < d) lifted.resize(d);
        double parity = 1.0;
        for (std::size_t j = 0; j < d; ++j) {
          const double bit = cube.rademacher(i * d + j);
          lifted[j] = lift.half_normal(i * d + j) * bit;
          for (std::size_t s : S)
            if (s == j) parity *= bit;
        }
        const double v = query.fn(lifted.data());
        part[0] += v;
        part[1] += parity * v;
      },
      acc);
  const double e_q = acc[0] / static_cast<double>(n);
  const double e_chi_q = acc[1] / static_cast<double>(n);
  if (query.kind == QueryKind::kCorrelation)
    return 0.5 * e_chi_q + 0.5 * e_q;  // y' = (chi + 1)/2
  return e_q;
}

}  // namespace relulab::sq
