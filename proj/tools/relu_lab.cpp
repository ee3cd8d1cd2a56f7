// relu-lab: experiment harness for the ReLU regression lab.
//
// Subcommands
//   verify-hermite   coefficient closed forms vs quadrature, orthonormality,
//                    series positivity
//   verify-gap       series / 2-d quadrature / monte-carlo agreement on the
//                    k=2 correlation, plus the detection-gap constants
//   run-reduction    parity recovery through per-coordinate relu fits
//   run-approx       threshold-and-learn approximation with alpha selection
//   sq-demo          gradient descent driven by a statistical-query oracle
//
// Every subcommand runs once per seed, emits one JSON-lines record per
// trial plus a CSV summary, and exits 0 only if every verdict passed.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <thread>

#include <omp.h>

#include "relulab/approx_relu.hpp"
#include "relulab/datagen.hpp"
#include "relulab/gaussian_stats.hpp"
#include "relulab/hermite.hpp"
#include "relulab/kernels.hpp"
#include "relulab/learners.hpp"
#include "relulab/numeric_oracle.hpp"
#include "relulab/run_record.hpp"
#include "relulab/slpn_reduction.hpp"
#include "relulab/sq_sim.hpp"

using namespace relulab;
using nlohmann::json;

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct TrialResult {
  records::RunRecord record;
  json detail;
};

struct Harness {
  std::vector<std::uint64_t> seeds = {1};
  std::string out = "report.jsonl";
  unsigned parallelism = 1;

  // Runs `trial` once per seed (work queue of `parallelism` workers), writes
  // JSONL records + CSV summary, returns the process exit code.
  int run(const std::string& subcommand,
          const std::map<std::string, std::string>& config,
          const std::function<TrialResult(std::uint64_t seed)>& trial) const {
    const char* env_threads = std::getenv("RELU_LAB_THREADS");
    unsigned degree = parallelism;
    if (env_threads != nullptr) {
      const unsigned cap = static_cast<unsigned>(std::atoi(env_threads));
      if (cap >= 1) {
        degree = std::min(degree == 0 ? cap : degree, cap);
        omp_set_num_threads(static_cast<int>(cap));
      }
    }
    if (degree == 0) degree = 1;

    const std::uint64_t hash = records::config_hash(config);
    const std::string version = records::version_string();

    std::ofstream jsonl(out);
    std::ofstream csv(out + ".summary.csv");
    if (!jsonl || !csv) {
      std::cerr << "cannot open output files at " << out << "\n";
      return 1;
    }
    csv << records::summary_csv_header() << "\n";

    std::mutex write_mutex;
    std::size_t next = 0;
    bool any_failed_verdict = false;
    bool any_exception = false;

    auto worker = [&]() {
      for (;;) {
        std::size_t index;
        {
          std::lock_guard<std::mutex> lock(write_mutex);
          if (next >= seeds.size()) return;
          index = next++;
        }
        const std::uint64_t seed = seeds[index];
        try {
          const double t0 = now_ms();
          TrialResult result = trial(seed);
          result.record.subcommand = subcommand;
          result.record.config_hash = hash;
          result.record.seed = seed;
          result.record.wall_ms = now_ms() - t0;
          result.record.version = version;
          json line = json::parse(result.record.to_json());
          if (!result.detail.is_null()) line["detail"] = result.detail;
          std::lock_guard<std::mutex> lock(write_mutex);
          jsonl << line.dump() << "\n";
          jsonl.flush();
          csv << records::summary_csv_row(result.record) << "\n";
          csv.flush();
          if (!result.record.all_pass()) any_failed_verdict = true;
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(write_mutex);
          std::cerr << subcommand << " seed " << seed << " failed: " << e.what()
                    << "\n";
          any_exception = true;
        }
      }
    };

    if (degree <= 1 || seeds.size() <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < std::min<std::size_t>(degree, seeds.size()); ++t)
        pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    if (any_exception) return 1;
    return any_failed_verdict ? 1 : 0;
  }
};

std::map<std::string, std::string> config_map(
    std::initializer_list<std::pair<const std::string, std::string>> items) {
  return {items.begin(), items.end()};
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------------------
// verify-hermite
// ---------------------------------------------------------------------------

TrialResult run_verify_hermite(unsigned max_degree, double tol) {
  TrialResult out;
  auto& measured = out.record.measured;
  auto& verdicts = out.record.verdicts;

  bool recurrence = true;
  for (unsigned n = 1; n <= 50 && recurrence; ++n)
    for (double x = -5.0; x <= 5.0; x += 0.25) {
      const double lhs = hermite::hermite_eval(n + 1, x);
      const double rhs = x * hermite::hermite_eval(n, x) -
                         n * hermite::hermite_eval(n - 1, x);
      if (std::abs(lhs - rhs) >
          1e-12 * std::max({1.0, std::abs(lhs), std::abs(rhs)})) {
        recurrence = false;
        break;
      }
    }
  verdicts["recurrence_consistency"] = recurrence;

  const auto rule = oracle::gauss_hermite_rule(128);
  double max_ortho = 0.0;
  for (unsigned i = 0; i <= max_degree; ++i)
    for (unsigned j = i; j <= max_degree; ++j) {
      const double inner = oracle::quad_expectation(
          [i, j](double x) {
            return hermite::hermite_normalized_eval(i, x) *
                   hermite::hermite_normalized_eval(j, x);
          },
          rule);
      max_ortho = std::max(max_ortho, std::abs(inner - (i == j ? 1.0 : 0.0)));
    }
  measured["orthonormality_max_deviation"] = max_ortho;
  verdicts["orthonormality_identity"] = max_ortho < tol;

  double max_sign = 0.0, max_relu = 0.0;
  bool vanishing = true;
  for (unsigned i = 0; i <= max_degree; ++i) {
    const double sq = oracle::quad_expectation_split([i](double x) {
      return (x >= 0.0 ? 1.0 : -1.0) * hermite::hermite_normalized_eval(i, x);
    });
    const double rq = oracle::quad_expectation_split([i](double x) {
      return (x > 0.0 ? x : 0.0) * hermite::hermite_normalized_eval(i, x);
    });
    max_sign = std::max(max_sign, std::abs(sq - hermite::sign_coefficient(i)));
    max_relu = std::max(max_relu, std::abs(rq - hermite::relu_coefficient(i)));
    if (i % 2 == 0 && hermite::sign_coefficient(i) != 0.0) vanishing = false;
    if (i >= 3 && i % 2 == 1 && hermite::relu_coefficient(i) != 0.0)
      vanishing = false;
  }
  measured["sign_coeff_max_deviation"] = max_sign;
  measured["relu_coeff_max_deviation"] = max_relu;
  verdicts["sign_coeff_quadrature"] = max_sign < tol;
  verdicts["relu_coeff_quadrature"] = max_relu < tol;
  verdicts["vanishing_patterns"] = vanishing;

  double parseval = 0.0;
  for (unsigned i = 0; i <= 40; ++i)
    parseval += hermite::relu_coefficient(i) * hermite::relu_coefficient(i);
  measured["parseval_sum_40"] = parseval;
  verdicts["parseval_bounded"] = parseval <= 0.5;
  verdicts["parseval_tail_small"] = 0.5 - parseval <= 2e-4;

  bool positivity = true;
  for (unsigned k : {2u, 6u})
    for (unsigned n = k; n <= k + 12; ++n) {
      const double t = hermite::correlation_term(k, n);
      if ((n % 2 == 0 && t <= 0.0) || (n % 2 == 1 && t != 0.0))
        positivity = false;
    }
  verdicts["series_positivity"] = positivity;

  bool tk_match = true, exact_match = true;
  for (unsigned k : {2u, 6u}) {
    const double lb = hermite::correlation_lower_bound(k);
    if (std::abs(hermite::correlation_term(k, k) - lb) > 1e-12 * lb)
      tk_match = false;
    for (unsigned n = k; n <= 30; n += 2) {
      const double a = hermite::correlation_term(k, n);
      const double b = hermite::correlation_term_exact(k, n);
      if (std::abs(a - b) > 1e-12 * std::max(a, b)) exact_match = false;
    }
  }
  verdicts["tk_matches_lower_bound"] = tk_match;
  verdicts["exact_mode_agreement"] = exact_match;

  measured["c2_truncated_42"] = hermite::relu_parity_inner_product(2, 42);
  measured["t2"] = hermite::correlation_term(2, 2);
  measured["lower_bound_k2"] = hermite::correlation_lower_bound(2);
  measured["lower_bound_k6"] = hermite::correlation_lower_bound(6);
  return out;
}

// ---------------------------------------------------------------------------
// verify-gap
// ---------------------------------------------------------------------------

TrialResult run_verify_gap(std::uint64_t seed, std::size_t mc_samples,
                           unsigned n_max) {
  TrialResult out;
  auto& measured = out.record.measured;
  auto& verdicts = out.record.verdicts;
  const double inv = 1.0 / std::sqrt(2.0 * std::numbers::pi);

  const double series = hermite::relu_parity_inner_product(2, n_max);
  const double quad = oracle::correlation_2d_quadrature() * inv;
  const auto mc = oracle::mc_expectation(
      [](const double* x) {
        const double s = (x[0] + x[1]) / std::numbers::sqrt2;
        return (s > 0.0 ? s : 0.0) * (x[0] >= 0.0 ? 1.0 : -1.0) *
               (x[1] >= 0.0 ? 1.0 : -1.0);
      },
      2, mc_samples, seed);
  const double mc_scaled = mc.mean * inv;
  const double mc_sigma = mc.stderr_ * inv;

  measured["series"] = series;
  measured["quadrature"] = quad;
  measured["mc"] = mc_scaled;
  measured["mc_stderr"] = mc_sigma;
  measured["series_quadrature_gap"] = quad - series;

  verdicts["series_below_quadrature"] = series < quad;
  verdicts["mc_within_3sigma_of_quadrature"] =
      std::abs(mc_scaled - quad) <= 3.0 * mc_sigma;
  const double floor = hermite::correlation_lower_bound(2) * inv;
  measured["lower_bound_scaled"] = floor;
  verdicts["all_routes_above_lower_bound"] =
      series >= floor && quad >= floor && mc_scaled >= floor - 3.0 * mc_sigma;

  // detection-gap constants
  measured["loss_floor"] = gstats::kOptimalRandomLabelLoss;
  measured["optimal_norm"] = gstats::kOptimalNorm;
  verdicts["loss_minimized_at_optimal_norm"] =
      gstats::random_label_loss(gstats::kOptimalNorm) <
          gstats::random_label_loss(gstats::kOptimalNorm * 0.9) &&
      gstats::random_label_loss(gstats::kOptimalNorm) <
          gstats::random_label_loss(gstats::kOptimalNorm * 1.1);
  bool band_ok = true;
  for (double alpha = 1e-6; alpha <= 10.0; alpha *= 2.0)
    if (gstats::gaussian_band_mass(alpha) > std::min(2.0 * alpha, 0.5) + 1e-15)
      band_ok = false;
  verdicts["band_mass_bound"] = band_ok;
  for (double eta : {0.0, 0.1, 0.25}) {
    const double loss =
        gstats::parity_label_loss(gstats::kOptimalNorm, series, eta);
    verdicts["gap_exists_eta_" + std::to_string(eta).substr(0, 4)] =
        loss < gstats::kOptimalRandomLabelLoss;
  }
  return out;
}

// ---------------------------------------------------------------------------
// run-reduction
// ---------------------------------------------------------------------------

struct ReductionParams {
  std::size_t d = 20;
  unsigned k = 2;
  double eta = 0.1;
  std::size_t m1 = 100000;
  std::size_t m2 = 0;    // 0: use 100/eps^2, capped at m1
  double epsilon = 0.0;  // 0: auto from the series
  std::string learner = "subset-scan";
  unsigned repetitions = 1;
  unsigned gd_restarts = 5;
  unsigned gd_steps = 400;
  double gd_step_size = 0.4;
};

TrialResult run_reduction_trial(const ReductionParams& p, std::uint64_t seed) {
  datagen::SlpnInstance inst;
  inst.d = p.d;
  inst.eta = p.eta;
  // ground-truth S drawn from the seed's own substream (partial shuffle)
  const CounterRng pick(seed, 0xF00D);
  std::vector<std::size_t> all(p.d);
  for (std::size_t j = 0; j < p.d; ++j) all[j] = j;
  for (unsigned j = 0; j < p.k; ++j) {
    const std::size_t r =
        j + static_cast<std::size_t>(pick.uniform01(j) *
                                     static_cast<double>(p.d - j));
    std::swap(all[j], all[std::min(r, p.d - 1)]);
  }
  inst.relevant.assign(all.begin(), all.begin() + p.k);
  std::sort(inst.relevant.begin(), inst.relevant.end());

  reduction::ReductionConfig cfg;
  cfg.m1 = p.m1;
  cfg.epsilon =
      p.epsilon > 0.0 ? p.epsilon : reduction::auto_epsilon(p.k, p.eta);
  cfg.m2 = p.m2 > 0
               ? p.m2
               : std::min(p.m1, reduction::default_validation_count(cfg.epsilon));
  cfg.repetitions = p.repetitions;
  if (p.learner == "subset-scan") {
    cfg.learner.kind = learners::ReluLearnerKind::kSubsetScan;
    cfg.learner.k_max = p.k;
  } else if (p.learner == "gd") {
    cfg.learner.kind = learners::ReluLearnerKind::kGradientDescent;
    cfg.learner.restarts = p.gd_restarts;
    cfg.learner.steps = p.gd_steps;
    cfg.learner.step_size = p.gd_step_size;
  } else {
    throw std::invalid_argument("unknown learner: " + p.learner);
  }

  const LabeledDataset raw = datagen::sample_slpn(inst, cfg.m1 + cfg.m2, seed);
  const reduction::ReductionReport report =
      reduction::recover_parity(raw, cfg, seed);

  TrialResult out;
  out.record.measured["epsilon"] = report.epsilon;
  out.record.measured["threshold"] = report.threshold;
  out.record.measured["candidates_per_fit"] =
      static_cast<double>(report.candidates_per_fit);
  out.detail["lift_ms"] = report.lift_ms;
  out.detail["fit_ms"] = report.fit_ms;
  out.detail["validate_ms"] = report.validate_ms;
  out.record.verdicts["recovered_equals_truth"] =
      report.recovered == inst.relevant;
  out.record.verdicts["no_failures"] = report.failures.empty();

  out.detail["recovered"] = report.recovered;
  out.detail["truth"] = inst.relevant;
  out.detail["val_errors"] = report.val_errors;
  out.detail["failures"] = report.failures;
  return out;
}

// ---------------------------------------------------------------------------
// run-approx
// ---------------------------------------------------------------------------

struct ApproxParams {
  std::size_t d = 10;
  std::size_t m = 100000;
  double wstar_norm = gstats::kOptimalNorm;
  std::string corruption = "none:0";
  std::vector<double> alpha_grid;  // empty: default log grid
  std::string learner = "band-localized";
  unsigned band_iterations = 6;
  unsigned hinge_steps = 200;
  std::string weights_out;  // optional hypothesis sidecar CSV
};

datagen::CorruptionModel parse_corruption(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("corruption must be kind:magnitude");
  const std::string kind = text.substr(0, colon);
  datagen::CorruptionModel model;
  model.magnitude = std::stod(text.substr(colon + 1));
  if (kind == "none")
    model.kind = datagen::CorruptionKind::kNone;
  else if (kind == "flip")
    model.kind = datagen::CorruptionKind::kFlipFraction;
  else if (kind == "additive")
    model.kind = datagen::CorruptionKind::kAdditiveBounded;
  else if (kind == "clamp-shift")
    model.kind = datagen::CorruptionKind::kClampShift;
  else
    throw std::invalid_argument("unknown corruption kind: " + kind);
  return model;
}

TrialResult run_approx_trial(const ApproxParams& p, std::uint64_t seed) {
  const datagen::CorruptionModel corruption = parse_corruption(p.corruption);
  WeightVector w_star = learners::random_unit_vector(p.d, seed ^ 0xABCD);
  w_star.scale(p.wstar_norm);
  const datagen::AgnosticDataset data =
      datagen::make_agnostic_relu_dataset(w_star, corruption, p.m, seed);

  approx::ApproxConfig cfg;
  cfg.alpha_grid = p.alpha_grid.empty()
                       ? approx::ApproxConfig::default_alpha_grid()
                       : p.alpha_grid;
  cfg.use_localization = p.learner == "band-localized";
  cfg.halfspace.band_iterations = p.band_iterations;
  cfg.halfspace.hinge_steps = p.hinge_steps;
  const approx::AlphaSelection sel = approx::select_alpha(data.data, cfg, seed);
  if (!p.weights_out.empty())
    write_weights_csv({sel.w},
                      p.weights_out + "." + std::to_string(seed) + ".csv");

  // fresh evaluation set from the same generating process
  const datagen::AgnosticDataset fresh = datagen::make_agnostic_relu_dataset(
      w_star, corruption, std::max<std::size_t>(p.m, 100000), seed ^ 0x5EED);
  const double unit_loss = approx::empirical_square_loss(fresh.data, sel.w);
  WeightVector rescaled = sel.w;
  rescaled.scale(sel.rescale);
  const double rescaled_loss =
      approx::empirical_square_loss(fresh.data, rescaled);

  TrialResult out;
  out.record.measured["alpha_star"] = sel.alpha_star;
  out.record.measured["holdout_loss"] = sel.holdout_loss;
  out.record.measured["unit_loss_fresh"] = unit_loss;
  out.record.measured["rescale"] = sel.rescale;
  out.record.measured["rescaled_loss_fresh"] = rescaled_loss;
  out.record.measured["opt_estimate"] = data.opt.value;
  out.record.measured["opt_upper_bound"] = data.opt.upper_bound;
  out.record.measured["clamp_contrib"] = data.opt.clamp_contrib;
  if (p.wstar_norm > 0.0)
    out.record.measured["angle_to_truth"] =
        gstats::angle_disagreement(sel.w.v, w_star.v).angle;
  out.record.verdicts["direction_recovered"] = sel.direction_recovered;
  const double nominal_opt = std::max(data.opt.value, 1e-12);
  out.record.verdicts["loss_below_envelope"] =
      rescaled_loss <= 10.0 * std::pow(nominal_opt, 2.0 / 3.0) + 0.02;
  json table = json::array();
  for (const auto& e : sel.table)
    table.push_back({{"alpha", e.alpha},
                     {"holdout_loss", e.holdout_loss},
                     {"rescale", e.rescale},
                     {"rescaled_loss", e.rescaled_loss},
                     {"direction_recovered", e.direction_recovered}});
  out.detail["alpha_table"] = table;
  return out;
}

// ---------------------------------------------------------------------------
// sq-demo
// ---------------------------------------------------------------------------

struct SqDemoParams {
  std::string mode = "sampling";
  std::string rule = "plus-tau";
  double tau = 1e-3;
  unsigned steps = 50;
  double lr = 0.3;
  std::size_t d = 4;
  double eta = 0.1;
  std::string dataset;  // optional binary fixture
  std::string trace_out = "trace.csv";
};

sq::AdversaryRule rule_by_name(const std::string& name) {
  for (const auto rule : sq::all_adversary_rules())
    if (sq::adversary_rule_name(rule) == name) return rule;
  throw std::invalid_argument("unknown adversary rule: " + name);
}

TrialResult run_sq_demo_trial(const SqDemoParams& p, std::uint64_t seed) {
  sq::DistHandle dist = [&] {
    if (!p.dataset.empty()) {
      BinaryDataset fixture = read_binary(p.dataset);
      if (fixture.data.label_kind == LabelKind::kBoolean)
        fixture.data = datagen::remap_labels(fixture.data);
      return sq::DistHandle::from_dataset(std::move(fixture.data));
    }
    datagen::SlpnInstance inst;
    inst.d = p.d;
    inst.relevant = {0, 1};
    inst.eta = p.eta;
    return sq::DistHandle::from_dataset(datagen::remap_labels(
        datagen::lift_dataset(datagen::sample_slpn(inst, 200000, seed), seed)));
  }();

  sq::SqOracle oracle;
  oracle.seed = seed;
  if (p.mode == "sampling") {
    oracle.mode = sq::OracleMode::kSampling;
  } else if (p.mode == "adversarial") {
    oracle.mode = sq::OracleMode::kAdversarialRounding;
    oracle.rule = rule_by_name(p.rule);
  } else {
    throw std::invalid_argument("mode must be sampling or adversarial");
  }

  const WeightVector w0(dist.dim());
  const sq::SqTrajectory traj =
      sq::gd_via_sq(w0, p.steps, p.lr, oracle, dist, p.tau);

  std::ofstream trace(p.trace_out);
  if (!trace) throw std::runtime_error("cannot open " + p.trace_out);
  trace << "step,loss,queries\n";
  for (std::size_t s = 0; s < traj.losses.size(); ++s)
    trace << s << ',' << traj.losses[s] << ',' << 2 * dist.dim() * s << "\n";

  TrialResult out;
  out.record.measured["final_loss"] = traj.losses.back();
  out.record.measured["initial_loss"] = traj.losses.front();
  out.record.measured["queries"] = static_cast<double>(traj.queries);
  // Theoretical reference alongside the empirical count: a class of s
  // pairwise-orthogonal targets needs at least (s tau^2 - 1)/2 queries at
  // tolerance tau. For k-sparse parities over d coordinates s = C(d, k);
  // the generated fixture uses k = 2.
  {
    const double d_real = static_cast<double>(dist.dim());
    const double s = d_real * (d_real - 1.0) / 2.0;
    out.record.measured["sq_dimension_query_floor"] =
        (s * p.tau * p.tau - 1.0) / 2.0;
  }
  out.record.verdicts["query_accounting"] =
      traj.queries == 2 * dist.dim() * p.steps;
  out.record.verdicts["loss_finite"] = std::isfinite(traj.losses.back());
  out.detail["trace_file"] = p.trace_out;
  return out;
}

// ---------------------------------------------------------------------------
// make-fixture
// ---------------------------------------------------------------------------

struct FixtureParams {
  std::string kind = "slpn-lifted";  // slpn | slpn-lifted | agnostic
  std::size_t d = 4;
  unsigned k = 2;
  double eta = 0.1;
  std::size_t m = 100000;
  double wstar_norm = gstats::kOptimalNorm;
  std::string corruption = "none:0";
  std::string path = "fixture.bin";
};

TrialResult run_make_fixture(const FixtureParams& p, std::uint64_t seed) {
  LabeledDataset ds;
  if (p.kind == "slpn" || p.kind == "slpn-lifted") {
    datagen::SlpnInstance inst;
    inst.d = p.d;
    inst.eta = p.eta;
    for (unsigned j = 0; j < p.k; ++j) inst.relevant.push_back(j);
    ds = datagen::sample_slpn(inst, p.m, seed);
    if (p.kind == "slpn-lifted") ds = datagen::lift_dataset(ds, seed);
  } else if (p.kind == "agnostic") {
    WeightVector w_star = learners::random_unit_vector(p.d, seed ^ 0xABCD);
    w_star.scale(p.wstar_norm);
    ds = datagen::make_agnostic_relu_dataset(w_star,
                                             parse_corruption(p.corruption),
                                             p.m, seed)
             .data;
  } else {
    throw std::invalid_argument("unknown fixture kind: " + p.kind);
  }
  const std::string path = p.path + "." + std::to_string(seed) + ".bin";
  write_binary(ds, path, seed);
  TrialResult out;
  out.record.measured["samples"] = static_cast<double>(ds.size());
  out.record.measured["dim"] = static_cast<double>(ds.dim);
  out.record.verdicts["written"] = true;
  out.detail["path"] = path;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relu-lab: agnostic ReLU regression experiments"};
  app.set_config("--config", "", "TOML config file; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough(true);  // global flags may follow the subcommand name

  Harness harness;
  app.add_option("--seeds", harness.seeds, "trial seeds")->capture_default_str();
  app.add_option("--out", harness.out, "output base path (JSONL + CSV)")
      ->capture_default_str();
  app.add_option("--parallel", harness.parallelism,
                 "trial-level worker count (RELU_LAB_THREADS caps it)")
      ->capture_default_str();

  auto* vh =
      app.add_subcommand("verify-hermite", "check the coefficient closed forms");
  unsigned vh_degree = 20;
  double vh_tol = 1e-8;
  vh->add_option("--max-degree", vh_degree, "highest degree checked")
      ->capture_default_str();
  vh->add_option("--tol", vh_tol, "quadrature agreement tolerance")
      ->capture_default_str();

  auto* vg = app.add_subcommand("verify-gap",
                                "triple-route check of the k=2 correlation");
  std::size_t vg_mc = 10000000;
  unsigned vg_nmax = 42;
  vg->add_option("--mc-samples", vg_mc, "monte-carlo sample count")
      ->capture_default_str();
  vg->add_option("--n-max", vg_nmax, "series truncation degree")
      ->capture_default_str();

  auto* rr = app.add_subcommand("run-reduction", "parity recovery experiment");
  ReductionParams rp;
  rr->add_option("--d", rp.d, "ambient dimension")->capture_default_str();
  rr->add_option("--k", rp.k, "parity size (4l + 2)")->capture_default_str();
  rr->add_option("--eta", rp.eta, "label flip rate")->capture_default_str();
  rr->add_option("--m1", rp.m1, "training samples")->capture_default_str();
  rr->add_option("--m2", rp.m2,
                 "validation samples (0: 100/eps^2, capped at m1)")
      ->capture_default_str();
  rr->add_option("--epsilon", rp.epsilon, "gap parameter (0: auto)")
      ->capture_default_str();
  rr->add_option("--learner", rp.learner, "subset-scan | gd")
      ->capture_default_str();
  rr->add_option("--repetitions", rp.repetitions, "majority-vote repetitions")
      ->capture_default_str();
  rr->add_option("--gd-restarts", rp.gd_restarts, "gd learner restarts")
      ->capture_default_str();
  rr->add_option("--gd-steps", rp.gd_steps, "gd learner steps")
      ->capture_default_str();
  rr->add_option("--gd-step-size", rp.gd_step_size, "gd learner step size")
      ->capture_default_str();

  auto* ra = app.add_subcommand("run-approx", "threshold-and-learn experiment");
  ApproxParams ap;
  ra->add_option("--d", ap.d, "dimension")->capture_default_str();
  ra->add_option("--m", ap.m, "sample count")->capture_default_str();
  ra->add_option("--wstar-norm", ap.wstar_norm, "norm of the generating vector")
      ->capture_default_str();
  ra->add_option("--corruption", ap.corruption,
                 "kind:magnitude (none|flip|additive|clamp-shift)")
      ->capture_default_str();
  ra->add_option("--alpha-grid", ap.alpha_grid,
                 "threshold grid (default: 8 log-spaced in [0.01, 0.5])");
  ra->add_option("--learner", ap.learner, "averaging | band-localized")
      ->capture_default_str();
  ra->add_option("--band-iterations", ap.band_iterations,
                 "localization band halvings")
      ->capture_default_str();
  ra->add_option("--hinge-steps", ap.hinge_steps,
                 "hinge subgradient steps per band")
      ->capture_default_str();
  ra->add_option("--weights-out", ap.weights_out,
                 "write the selected hypothesis to <path>.<seed>.csv");

  auto* sd = app.add_subcommand("sq-demo", "statistical-query descent demo");
  SqDemoParams sp;
  sd->add_option("--mode", sp.mode, "sampling | adversarial")
      ->capture_default_str();
  sd->add_option("--rule", sp.rule, "adversary rule name")
      ->capture_default_str();
  sd->add_option("--tau", sp.tau, "oracle tolerance")->capture_default_str();
  sd->add_option("--steps", sp.steps, "descent steps")->capture_default_str();
  sd->add_option("--lr", sp.lr, "step size")->capture_default_str();
  sd->add_option("--d", sp.d, "dimension of the generated fixture")
      ->capture_default_str();
  sd->add_option("--eta", sp.eta, "noise rate of the generated fixture")
      ->capture_default_str();
  sd->add_option("--dataset", sp.dataset, "binary dataset fixture (optional)");
  sd->add_option("--trace-out", sp.trace_out, "per-step trace CSV")
      ->capture_default_str();

  auto* mf = app.add_subcommand("make-fixture",
                                "export a reproducible dataset fixture");
  FixtureParams fp;
  mf->add_option("--kind", fp.kind, "slpn | slpn-lifted | agnostic")
      ->capture_default_str();
  mf->add_option("--d", fp.d, "dimension")->capture_default_str();
  mf->add_option("--k", fp.k, "parity size (slpn kinds; S = first k coords)")
      ->capture_default_str();
  mf->add_option("--eta", fp.eta, "noise rate (slpn kinds)")
      ->capture_default_str();
  mf->add_option("--m", fp.m, "sample count")->capture_default_str();
  mf->add_option("--wstar-norm", fp.wstar_norm, "agnostic kind target norm")
      ->capture_default_str();
  mf->add_option("--corruption", fp.corruption, "agnostic kind corruption")
      ->capture_default_str();
  mf->add_option("--path", fp.path, "output base; writes <path>.<seed>.bin")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return 2;
  }

  try {
    if (vh->parsed())
      return harness.run("verify-hermite",
                         config_map({{"max_degree", std::to_string(vh_degree)},
                                     {"tol", fmt(vh_tol)}}),
                         [&](std::uint64_t) {
                           return run_verify_hermite(vh_degree, vh_tol);
                         });
    if (vg->parsed())
      return harness.run("verify-gap",
                         config_map({{"mc_samples", std::to_string(vg_mc)},
                                     {"n_max", std::to_string(vg_nmax)}}),
                         [&](std::uint64_t seed) {
                           return run_verify_gap(seed, vg_mc, vg_nmax);
                         });
    if (rr->parsed())
      return harness.run(
          "run-reduction",
          config_map({{"d", std::to_string(rp.d)},
                      {"k", std::to_string(rp.k)},
                      {"eta", fmt(rp.eta)},
                      {"m1", std::to_string(rp.m1)},
                      {"m2", std::to_string(rp.m2)},
                      {"epsilon", fmt(rp.epsilon)},
                      {"learner", rp.learner},
                      {"repetitions", std::to_string(rp.repetitions)}}),
          [&](std::uint64_t seed) { return run_reduction_trial(rp, seed); });
    if (ra->parsed()) {
      std::string grid_text;
      for (double a : ap.alpha_grid) grid_text += fmt(a) + ";";
      return harness.run(
          "run-approx",
          config_map({{"d", std::to_string(ap.d)},
                      {"m", std::to_string(ap.m)},
                      {"wstar_norm", fmt(ap.wstar_norm)},
                      {"corruption", ap.corruption},
                      {"alpha_grid", grid_text},
                      {"learner", ap.learner}}),
          [&](std::uint64_t seed) { return run_approx_trial(ap, seed); });
    }
    if (sd->parsed())
      return harness.run(
          "sq-demo",
          config_map({{"mode", sp.mode},
                      {"rule", sp.rule},
                      {"tau", fmt(sp.tau)},
                      {"steps", std::to_string(sp.steps)},
                      {"lr", fmt(sp.lr)},
                      {"d", std::to_string(sp.d)},
                      {"eta", fmt(sp.eta)},
                      {"dataset", sp.dataset}}),
          [&](std::uint64_t seed) { return run_sq_demo_trial(sp, seed); });
    if (mf->parsed())
      return harness.run(
          "make-fixture",
          config_map({{"kind", fp.kind},
                      {"d", std::to_string(fp.d)},
                      {"k", std::to_string(fp.k)},
                      {"eta", fmt(fp.eta)},
                      {"m", std::to_string(fp.m)},
                      {"wstar_norm", fmt(fp.wstar_norm)},
                      {"corruption", fp.corruption},
                      {"path", fp.path}}),
          [&](std::uint64_t seed) { return run_make_fixture(fp, seed); });
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
