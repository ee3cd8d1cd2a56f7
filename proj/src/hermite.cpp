#include "relulab/hermite.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace relulab::hermite {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // 1/sqrt(2 pi)

double log_factorial(unsigned n) {
  return std::lgamma(static_cast<double>(n) + 1.0);
}

// log |H_{2m}(0)| = log((2m-1)!!) = log((2m)!) - log(m!) - m log 2.
double log_hermite_at_zero(unsigned n) {
  const unsigned m = n / 2;
  return log_factorial(n) - log_factorial(m) -
         static_cast<double>(m) * std::numbers::ln2;
}

int sign_hermite_at_zero(unsigned n) { return (n / 2) % 2 == 0 ? 1 : -1; }

}  // namespace

double hermite_eval(unsigned n, double x) {
  if (!std::isfinite(x))
    throw std::invalid_argument("hermite_eval: non-finite x");
  double hm1 = 0.0;
  double h = 1.0;
  for (unsigned j = 0; j < n; ++j) {
    const double next = x * h - static_cast<double>(j) * hm1;
    hm1 = h;
    h = next;
  }
  return h;
}

double hermite_normalized_eval(unsigned n, double x) {
  double pm1 = 0.0;
  double p = 1.0;
  for (unsigned j = 0; j < n; ++j) {
    const double next = (x * p - std::sqrt(static_cast<double>(j)) * pm1) /
                        std::sqrt(static_cast<double>(j) + 1.0);
    pm1 = p;
    p = next;
  }
  return p;
}

double hermite_at_zero(unsigned n) {
  if (n % 2 == 1) return 0.0;
  if (n == 0) return 1.0;
  const double log_mag = log_hermite_at_zero(n);
  if (log_mag > 709.0)
    throw std::overflow_error("hermite_at_zero: |H_n(0)| exceeds double range");
  return sign_hermite_at_zero(n) * std::exp(log_mag);
}

double hermite_at_zero_exact(unsigned n) {
  if (n % 2 == 1) return 0.0;
  if (n > 56)
    throw std::invalid_argument("hermite_at_zero_exact: supported for n <= 56");
  unsigned __int128 dfact = 1;
  for (unsigned j = 1; j + 1 <= n; j += 2) dfact *= j;  // (n-1)!!
  return sign_hermite_at_zero(n) * static_cast<double>(dfact);
}

double sign_coefficient(unsigned i) {
  if (i == 0 || i % 2 == 0) return 0.0;
  // sqrt(2/(pi i!)) * H_{i-1}(0), in log space.
  const double log_mag = 0.5 * (std::numbers::ln2 -
                                std::log(std::numbers::pi) -
                                log_factorial(i)) +
                         log_hermite_at_zero(i - 1);
  return sign_hermite_at_zero(i - 1) * std::exp(log_mag);
}

double relu_coefficient(unsigned i) {
  if (i == 0) return kInvSqrt2Pi;
  if (i == 1) return 0.5;
  if (i % 2 == 1) return 0.0;
  // H_i(0) + i H_{i-2}(0) = (-1)^{i/2+1} (i-3)!!, so the magnitude is
  // (i-3)!!/sqrt(2 pi i!): log-space avoids the cancellation of the two
  // nearly equal terms at large i.
  const unsigned m = i / 2;
  double log_dfact = 0.0;  // log((i-3)!!), empty product at i = 2
  for (unsigned j = 3; j + 3 <= i; j += 2)
    log_dfact += std::log(static_cast<double>(j));
  const double log_mag =
      log_dfact - 0.5 * (std::log(2.0 * std::numbers::pi) + log_factorial(i));
  const int sign = (m % 2 == 0) ? -1 : 1;  // (-1)^{m+1}
  return sign * std::exp(log_mag);
}

CoefficientTable build_coefficient_table(FunctionTag tag,
                                         unsigned max_degree) {
  CoefficientTable table;
  table.tag = tag;
  table.max_degree = max_degree;
  for (unsigned i = 0; i <= max_degree; ++i)
    table.coefficients[i] =
        tag == FunctionTag::kSign ? sign_coefficient(i) : relu_coefficient(i);
  return table;
}

void require_series_k(unsigned k) {
  if (k < 2 || (k - 2) % 4 != 0)
    throw std::invalid_argument(
        "correlation series requires k = 4l + 2 (the sign pattern of the "
        "series terms needs it)");
}

std::uint64_t composition_count(unsigned k, unsigned n) {
  require_series_k(k);
  if (n < k || (n - k) % 2 != 0) return 0;
  const unsigned s = (n - k) / 2;
  // C(s + k - 1, k - 1), saturating at uint64 max.
  long double c = 1.0L;
  for (unsigned j = 1; j < k; ++j)
    c = c * static_cast<long double>(s + j) / static_cast<long double>(j);
  if (c > 1.8e19L) return UINT64_MAX;
  return static_cast<std::uint64_t>(c + 0.5L);
}

namespace {

// Visits every composition of s into k non-negative parts.
template <class Visitor>
void for_each_composition(unsigned s, unsigned k, Visitor&& visit) {
  std::vector<unsigned> parts(k, 0);
  parts[k - 1] = s;
  for (;;) {
    visit(parts);
    // Next composition in colex order: move one unit left of the last
    // nonzero tail position.
    unsigned idx = k - 1;
    while (idx > 0 && parts[idx] == 0) --idx;
    if (idx == 0) break;
    const unsigned tail = parts[idx] - 1;
    parts[idx] = 0;
    parts[idx - 1] += 1;
    parts[k - 1] = tail;
  }
}

}  // namespace

double correlation_term(unsigned k, unsigned n,
                        std::uint64_t composition_cap) {
  require_series_k(k);
  if (n < k)
    throw std::invalid_argument("correlation_term: n must be >= k");
  if (n % 2 == 1) return 0.0;
  const std::uint64_t count = composition_count(k, n);
  if (count > composition_cap)
    throw std::length_error(
        "correlation_term: composition count exceeds the configured cap");

  const unsigned s = (n - k) / 2;
  const double relu_n = relu_coefficient(n);
  const double half_log_n_fact = 0.5 * log_factorial(n);
  const double log_k = std::log(static_cast<double>(k));

  // Precompute sign coefficients and factorial logs for odd degrees <= n.
  std::vector<double> log_sign_mag(s + 1);
  std::vector<int> sign_sign(s + 1);
  std::vector<double> log_fact_odd(s + 1);
  for (unsigned m = 0; m <= s; ++m) {
    const unsigned deg = 2 * m + 1;
    const double c = sign_coefficient(deg);
    sign_sign[m] = c >= 0.0 ? 1 : -1;
    log_sign_mag[m] = std::log(std::abs(c));
    log_fact_odd[m] = log_factorial(deg);
  }

  double sum = 0.0;
  for_each_composition(s, k, [&](const std::vector<unsigned>& parts) {
    double log_mag = half_log_n_fact;
    int sign = 1;
    for (unsigned m : parts) {
      log_mag += log_sign_mag[m] - 0.5 * log_fact_odd[m];
      sign *= sign_sign[m];
    }
    sum += sign * std::exp(log_mag);
  });

  const double scale =
      relu_n * std::exp(-0.5 * static_cast<double>(n) * log_k);
  return scale * sum;
}

double correlation_term_exact(unsigned k, unsigned n) {
  require_series_k(k);
  if (n < k)
    throw std::invalid_argument("correlation_term_exact: n must be >= k");
  if (n > 30)
    throw std::invalid_argument("correlation_term_exact: supported for n <= 30");
  if (n % 2 == 1) return 0.0;

  const unsigned s = (n - k) / 2;
  std::vector<unsigned __int128> fact(2 * s + 2);
  fact[0] = 1;
  for (unsigned j = 1; j < fact.size(); ++j) fact[j] = fact[j - 1] * j;

  long double sum = 0.0L;
  for_each_composition(s, k, [&](const std::vector<unsigned>& parts) {
    long double prod = 1.0L;
    for (unsigned m : parts) {
      prod *= static_cast<long double>(fact[2 * m]);
      prod /= static_cast<long double>(fact[m]);
      prod /= static_cast<long double>(fact[2 * m + 1]);
    }
    sum += prod;
  });

  long double dfact = 1.0L;  // (n-3)!!
  for (unsigned j = 3; j + 3 <= n; j += 2) dfact *= j;

  const long double pi = 3.14159265358979323846264338327950288L;
  long double value = dfact * sum;
  value *= std::pow(2.0L / pi, static_cast<long double>(k) / 2.0L);
  value /= std::pow(2.0L, static_cast<long double>(n - k) / 2.0L);
  value /= std::sqrt(2.0L * pi);
  value /= std::pow(static_cast<long double>(k),
                    static_cast<long double>(n) / 2.0L);
  return static_cast<double>(value);
}

double correlation_lower_bound(unsigned k) {
  require_series_k(k);
  // k! / (sqrt(2 pi) k^{k/2} (k-1) (k/2)! pi^{k/2}) in log space.
  const double log_val =
      log_factorial(k) - 0.5 * std::log(2.0 * std::numbers::pi) -
      0.5 * static_cast<double>(k) * std::log(static_cast<double>(k)) -
      std::log(static_cast<double>(k - 1)) - log_factorial(k / 2) -
      0.5 * static_cast<double>(k) * std::log(std::numbers::pi);
  return std::exp(log_val);
}

double correlation_lower_bound_stirling(unsigned k) {
  require_series_k(k);
  const unsigned l = (k - 2) / 4;
  const double base = 2.0 / (std::numbers::e * std::numbers::pi);
  return (1.0 / (std::sqrt(std::numbers::pi) *
                 static_cast<double>(4 * l + 1))) *
         std::pow(base, static_cast<double>(2 * l + 1));
}

CorrelationSeries build_correlation_series(unsigned k, unsigned n_max,
                                           std::uint64_t composition_cap) {
  require_series_k(k);
  if (n_max < k)
    throw std::invalid_argument("build_correlation_series: n_max < k");
  CorrelationSeries series;
  series.k = k;
  series.tail_bound_degree = n_max;
  for (unsigned n = k; n <= n_max; n += 2) {
    const double term = correlation_term(k, n, composition_cap);
    series.terms[n] = term;
    series.partial_sum += term;
    series.tail_estimate = std::abs(term);
  }
  return series;
}

double relu_parity_inner_product(unsigned k, unsigned n_max,
                                 std::uint64_t composition_cap) {
  const CorrelationSeries series =
      build_correlation_series(k, n_max, composition_cap);
  return kInvSqrt2Pi * series.partial_sum;
}

}  // namespace relulab::hermite
