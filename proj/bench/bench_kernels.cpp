// Timing comparison of the OpenMP kernels against their serial reference
// twins. Both variants share the blocked accumulation order, so the outputs
// are bit-identical; only the wall time differs.
//
//   ./bench_kernels [m] [d]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <omp.h>

#include "relulab/datagen.hpp"
#include "relulab/kernels.hpp"
#include "relulab/numeric_oracle.hpp"
#include "relulab/rng.hpp"

using namespace relulab;

namespace {

double time_ms(const std::function<double()>& fn, int reps, double* result) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    *result = fn();
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    if (ms < best) best = ms;
  }
  return best;
}

void report(const char* name, double serial_ms, double omp_ms, bool equal) {
  std::printf("%-28s %10.2f ms %10.2f ms   x%.2f   %s\n", name, serial_ms,
              omp_ms, serial_ms / omp_ms, equal ? "bit-equal" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t m = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1000000;
  const std::size_t d = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 20;
  std::printf("kernels at m = %zu, d = %zu, omp threads = %d\n", m, d,
              omp_get_max_threads());

  const CounterRng rng(1, stream::kGaussian);
  LabeledDataset real;
  real.dim = d;
  real.xs.resize(m * d);
  real.ys.resize(m);
  for (std::size_t i = 0; i < m * d; ++i) real.xs[i] = rng.gaussian(i);
  for (std::size_t i = 0; i < m; ++i)
    real.ys[i] = rng.uniform01((m * d) + i);
  LabeledDataset boolean = real;
  boolean.label_kind = LabelKind::kBoolean;
  for (double& y : boolean.ys) y = y < 0.5 ? -1.0 : 1.0;

  WeightVector w(d);
  for (std::size_t j = 0; j < d; ++j) w.v[j] = 0.2 * rng.gaussian(j);

  double a = 0.0, b = 0.0;
  const int reps = 3;

  const double loss_s = time_ms(
      [&] { return kernels::relu_square_loss_serial(real, w); }, reps, &a);
  const double loss_p =
      time_ms([&] { return kernels::relu_square_loss(real, w); }, reps, &b);
  report("relu_square_loss", loss_s, loss_p, a == b);

  WeightVector g1(d), g2(d);
  const double grad_s = time_ms(
      [&] { return kernels::relu_loss_gradient_serial(real, w, &g1); }, reps,
      &a);
  const double grad_p = time_ms(
      [&] { return kernels::relu_loss_gradient(real, w, &g2); }, reps, &b);
  report("relu_loss_gradient", grad_s, grad_p, a == b && g1.v == g2.v);

  const double mean_s = time_ms(
      [&] { return kernels::label_weighted_mean_serial(boolean).norm(); },
      reps, &a);
  const double mean_p = time_ms(
      [&] { return kernels::label_weighted_mean(boolean).norm(); }, reps, &b);
  report("label_weighted_mean", mean_s, mean_p, a == b);

  const double sign_s = time_ms(
      [&] { return kernels::sign_error_serial(boolean, w); }, reps, &a);
  const double sign_p =
      time_ms([&] { return kernels::sign_error(boolean, w); }, reps, &b);
  report("sign_error", sign_s, sign_p, a == b);

  WeightVector h1(d), h2(d);
  const double hinge_s = time_ms(
      [&] {
        return static_cast<double>(
            kernels::banded_hinge_subgradient_serial(boolean, w, 0.5, &h1));
      },
      reps, &a);
  const double hinge_p = time_ms(
      [&] {
        return static_cast<double>(
            kernels::banded_hinge_subgradient(boolean, w, 0.5, &h2));
      },
      reps, &b);
  report("banded_hinge_subgradient", hinge_s, hinge_p, a == b && h1.v == h2.v);

  std::vector<double> colstore(d * m);
  std::vector<const double*> cols(d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < m; ++i)
      colstore[j * m + i] = real.xs[i * d + j];
    cols[j] = colstore.data() + j * m;
  }
  const std::vector<std::size_t> support = {0, d / 2, d - 1};
  const double dir_s = time_ms(
      [&] {
        return kernels::direction_moments_serial(cols, m, support,
                                                 real.ys.data())
            .b;
      },
      reps, &a);
  const double dir_p = time_ms(
      [&] {
        return kernels::direction_moments(cols, m, support, real.ys.data()).b;
      },
      reps, &b);
  report("direction_moments", dir_s, dir_p, a == b);

  auto integrand = [](const double* x) {
    const double s = (x[0] + x[1]) * 0.7071067811865476;
    return (s > 0.0 ? s : 0.0) * (x[0] >= 0.0 ? 1.0 : -1.0) *
           (x[1] >= 0.0 ? 1.0 : -1.0);
  };
  const double mc_s = time_ms(
      [&] {
        return oracle::mc_expectation_serial(integrand, 2, m, 7).mean;
      },
      reps, &a);
  const double mc_p = time_ms(
      [&] { return oracle::mc_expectation(integrand, 2, m, 7).mean; }, reps,
      &b);
  report("mc_expectation", mc_s, mc_p, a == b);

  const double skip_s = time_ms(
      [&] {
        WeightVector v(d - 1);
        for (std::size_t j = 0; j + 1 < d; ++j) v.v[j] = w.v[j];
        return kernels::relu_square_loss_rows_skip_serial(real, v, 0, m,
                                                          d / 2);
      },
      reps, &a);
  const double skip_p = time_ms(
      [&] {
        WeightVector v(d - 1);
        for (std::size_t j = 0; j + 1 < d; ++j) v.v[j] = w.v[j];
        return kernels::relu_square_loss_rows_skip(real, v, 0, m, d / 2);
      },
      reps, &b);
  report("relu_square_loss_rows_skip", skip_s, skip_p, a == b);

  return 0;
}
