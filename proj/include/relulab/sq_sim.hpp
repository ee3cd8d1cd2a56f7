#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "relulab/datagen.hpp"
#include "relulab/dataset.hpp"

namespace relulab::sq {

enum class QueryKind { kCorrelation, kTargetIndependent };

// A statistical query: E[y g(x)] for correlation queries, E[h(x)] for
// target-independent ones, answered to tolerance tau per unit of measured
// query norm (second moment of the integrand).
struct SqQuery {
  QueryKind kind = QueryKind::kTargetIndependent;
  std::function<double(const double*)> fn;
  double tau = 1e-3;
};

// Either a materialized dataset (whose empirical distribution is the
// distribution: answers are exact means over it) or a seeded generator
// sampled with escalating precision.
class DistHandle {
 public:
  using Generator =
      std::function<void(std::uint64_t index, double* x, double* y)>;

  static DistHandle from_dataset(LabeledDataset ds);
  static DistHandle generative(std::size_t dim, Generator gen);
  // The lifted noisy-parity distribution of the reduction.
  static DistHandle lifted_parity(const datagen::SlpnInstance& inst,
                                  std::uint64_t seed);

  std::size_t dim() const { return dim_; }
  bool materialized() const { return data_ != nullptr; }
  const LabeledDataset* data() const { return data_.get(); }

  // mean and mean-square of the query integrand over n samples (generative)
  // or over the whole dataset (materialized; n ignored).
  void integrand_moments(const SqQuery& q, std::size_t n, double* mean,
                         double* second_moment) const;

  // Square loss of ReLU_w: exact over a materialized dataset, MC otherwise.
  double square_loss(const WeightVector& w, std::size_t n_mc = 200'000) const;

 private:
  std::size_t dim_ = 0;
  std::shared_ptr<const LabeledDataset> data_;
  Generator gen_;
};

enum class OracleMode { kSampling, kAdversarialRounding };

// Deterministic adversary rules; every rule keeps the (normalized) answer
// within tau of the truth. Rules whose perturbations would cancel between
// the paired h and g queries of a gradient coordinate make weak adversaries;
// this set sticks to ones that do not.
enum class AdversaryRule {
  kPlusTau,
  kMinusTau,
  kTowardZero,
  kTowardOptConst,  // rounds toward 1/2 - 1/(4 pi)
  kQuantize,        // round to the nearest multiple of tau
  kQuantizeFloor,   // round down to a multiple of tau
  kClipSmall,       // zero out answers below tau in magnitude
  kHashSign,        // +-tau by a hash of the query counter
  kCorrTowardZero,  // suppress correlation answers toward zero
  kCorrMinusOnly,   // -tau on correlation queries, exact otherwise
};

std::vector<AdversaryRule> all_adversary_rules();
std::string adversary_rule_name(AdversaryRule rule);

struct QueryLog {
  QueryKind kind = QueryKind::kTargetIndependent;
  double norm = 1.0;  // measured second-moment normalization constant
  double tau = 0.0;
  double answer = 0.0;
  std::size_t samples_used = 0;
};

struct SqOracle {
  OracleMode mode = OracleMode::kSampling;
  AdversaryRule rule = AdversaryRule::kPlusTau;
  std::uint64_t seed = 1;

  // Sampling schedule: fixed_samples > 0 pins the sample count (no
  // escalation); otherwise sampling starts at initial_samples and doubles
  // until 3 stderr <= tau * norm, erroring past max_samples.
  std::size_t fixed_samples = 0;
  std::size_t initial_samples = 1 << 16;
  std::size_t max_samples = std::size_t{1} << 26;

  std::uint64_t query_count = 0;
  bool keep_log = false;
  std::vector<QueryLog> log;
};

// One oracle answer; increments the query counter. Sampling mode may throw
// std::runtime_error when the escalation cap cannot meet the tolerance.
double sq_answer(SqOracle& oracle, const SqQuery& q, const DistHandle& dist);

// i-th coordinate of grad_w E[(ReLU_w(x) - y)^2], reconstructed from exactly
// two oracle answers: the correlation query g(x) = -2 1_+(w.x) x_i and the
// target-independent query h(x) = 2 1_+(w.x) ReLU_w(x) x_i.
double gradient_via_sq(const WeightVector& w, std::size_t i, SqOracle& oracle,
                       const DistHandle& dist, double tau);

struct SqTrajectory {
  std::vector<WeightVector> ws;  // steps + 1 entries, w0 first
  std::vector<double> losses;    // loss at each trajectory point
  std::uint64_t queries = 0;     // 2 d steps in total
};

// Projected gradient descent driven purely by oracle answers.
SqTrajectory gd_via_sq(const WeightVector& w0, unsigned steps, double lr,
                       SqOracle& oracle, const DistHandle& dist, double tau);

// Ground truth of a query under the lifted (noiseless) parity distribution,
// through the coordinate mapping nu(x, g) = (x_1 g_1, ..., x_d g_d) and the
// half-scaling of the {0,1} label remap:
// E[y' q(x')] = (1/2) E[chi_S(x) q(nu)] + (1/2) E[q(nu)].
double restricted_parity_query_truth(const std::vector<std::size_t>& S,
                                     std::size_t d, const SqQuery& query,
                                     std::size_t n, std::uint64_t seed);

}  // namespace relulab::sq
