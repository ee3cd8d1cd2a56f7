#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace relulab::hermite {

// Probabilists' Hermite polynomial H_n(x) by the three-term recurrence
// H_{n+1}(x) = x H_n(x) - n H_{n-1}(x).
double hermite_eval(unsigned n, double x);

// Normalized polynomial Hbar_n(x) = H_n(x)/sqrt(n!), evaluated with the
// orthonormal recurrence (no factorial overflow).
double hermite_normalized_eval(unsigned n, double x);

// H_n(0): zero for odd n, (-1)^m (2m)!/(m! 2^m) for n = 2m. Computed in
// log space with sign tracking; throws std::overflow_error once the value
// exceeds double range.
double hermite_at_zero(unsigned n);

// Exact integer evaluation of |H_n(0)| = (n-1)!! for even n <= 56 (fits in
// unsigned 128-bit). Test oracle for the log-space path.
double hermite_at_zero_exact(unsigned n);

// Degree-i Hermite coefficient of sign(x): 0 at i = 0 and all even i,
// sqrt(2/(pi i!)) H_{i-1}(0) otherwise.
double sign_coefficient(unsigned i);

// Degree-i Hermite coefficient of ReLU(x): 1/sqrt(2 pi) at i = 0, 1/2 at
// i = 1, (H_i(0) + i H_{i-2}(0))/sqrt(2 pi i!) for i >= 2 (zero at odd i).
double relu_coefficient(unsigned i);

struct HermitePoly {
  unsigned degree = 0;
  double operator()(double x) const { return hermite_eval(degree, x); }
  double normalized(double x) const {
    return hermite_normalized_eval(degree, x);
  }
};

enum class FunctionTag { kSign, kRelu };

struct CoefficientTable {
  FunctionTag tag = FunctionTag::kSign;
  unsigned max_degree = 0;
  std::map<unsigned, double> coefficients;
};

CoefficientTable build_coefficient_table(FunctionTag tag, unsigned max_degree);

// --- Correlation series of the lifted-parity inner product ---------------
//
// For w_S = (1/sqrt(2 pi k)) sum_{i in S} e_i and the coordinate-sign parity
// lift, the inner product <ReLU_{w_S}, chi_S> expands over total Hermite
// degree n as (1/sqrt(2 pi)) sum_{n >= k} T_n with
//
//   T_n = (relu_coefficient(n) / k^{n/2})
//         * sum_{n_1+...+n_k = n} sqrt(n!/(n_1!...n_k!))
//           * prod_j sign_coefficient(n_j).
//
// Only compositions with every n_j odd contribute, so T_n = 0 for odd n,
// and T_n > 0 for even n >= k when k = 4l + 2.

inline constexpr std::uint64_t kDefaultCompositionCap = 10'000'000;

// Throws std::invalid_argument unless k = 4l + 2.
void require_series_k(unsigned k);

// Number of compositions of (n - k)/2 into k non-negative parts; the
// enumeration cost of correlation_term.
std::uint64_t composition_count(unsigned k, unsigned n);

// T_n by explicit composition enumeration (log-space products). Throws
// std::length_error when the composition count exceeds the cap.
double correlation_term(unsigned k, unsigned n,
                        std::uint64_t composition_cap = kDefaultCompositionCap);

// Independent oracle route for tests: exact 128-bit integer factorials
// combined in long double, through the algebraically simplified form
// T_n = (n-3)!! (2/pi)^{k/2} 2^{-(n-k)/2} / (sqrt(2 pi) k^{n/2})
//       * sum prod_j (2m_j)! / (m_j! (2m_j+1)!).   Valid for n <= 30.
double correlation_term_exact(unsigned k, unsigned n);

// Exact first term T_k = k! / (sqrt(2 pi) k^{k/2} (k-1) (k/2)! pi^{k/2});
// both a closed form for correlation_term(k, k) and the series lower bound.
double correlation_lower_bound(unsigned k);

// Stirling approximation (1/(sqrt(pi)(4l+1))) (2/(e pi))^{2l+1}, diagnostic.
double correlation_lower_bound_stirling(unsigned k);

struct CorrelationSeries {
  unsigned k = 2;
  std::map<unsigned, double> terms;  // even n in [k, n_max] -> T_n
  double partial_sum = 0.0;
  unsigned tail_bound_degree = 0;    // n_max used
  double tail_estimate = 0.0;        // magnitude of the last included term
};

CorrelationSeries build_correlation_series(
    unsigned k, unsigned n_max,
    std::uint64_t composition_cap = kDefaultCompositionCap);

// <ReLU_{w_S}, chi_S^gamma> truncated at degree n_max:
// (1/sqrt(2 pi)) * sum_{n=k..n_max} T_n. Non-decreasing in n_max.
double relu_parity_inner_product(
    unsigned k, unsigned n_max,
    std::uint64_t composition_cap = kDefaultCompositionCap);

}  // namespace relulab::hermite
