#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace relulab::par {

// Reductions are accumulated in fixed 4096-element blocks whose partial sums
// are combined in block order. The OpenMP kernels therefore produce results
// that are bit-identical for any thread count, and identical to
// block_sum_serial. A plain left-to-right loop is kept as the reference
// implementation for tests; it may differ from the blocked sum by ordinary
// rounding, never by more than that.
inline constexpr std::size_t kBlock = 4096;

template <class F>
double block_sum_serial(std::size_t n, F&& term) {
  double total = 0.0;
  for (std::size_t b = 0; b < n; b += kBlock) {
    const std::size_t hi = (b + kBlock < n) ? b + kBlock : n;
    double part = 0.0;
    for (std::size_t i = b; i < hi; ++i) part += term(i);
    total += part;
  }
  return total;
}

template <class F>
double block_sum(std::size_t n, F&& term) {
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  if (nblocks <= 1) return block_sum_serial(n, term);
  std::vector<double> parts(nblocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = (lo + kBlock < n) ? lo + kBlock : n;
    double part = 0.0;
    for (std::size_t i = lo; i < hi; ++i) part += term(i);
    parts[static_cast<std::size_t>(b)] = part;
  }
  double total = 0.0;
  for (double p : parts) total += p;
  return total;
}

// Same scheme for accumulating a vector of width dim per element.
template <class F>
void block_sum_vec_serial(std::size_t n, std::size_t dim, F&& term,
                          double* out) {
  std::vector<double> part(dim);
  for (std::size_t j = 0; j < dim; ++j) out[j] = 0.0;
  for (std::size_t b = 0; b < n; b += kBlock) {
    const std::size_t hi = (b + kBlock < n) ? b + kBlock : n;
    for (std::size_t j = 0; j < dim; ++j) part[j] = 0.0;
    for (std::size_t i = b; i < hi; ++i) term(i, part.data());
    for (std::size_t j = 0; j < dim; ++j) out[j] += part[j];
  }
}

template <class F>
void block_sum_vec(std::size_t n, std::size_t dim, F&& term, double* out) {
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  if (nblocks <= 1) {
    block_sum_vec_serial(n, dim, term, out);
    return;
  }
  std::vector<double> parts(nblocks * dim, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = (lo + kBlock < n) ? lo + kBlock : n;
    double* part = parts.data() + static_cast<std::size_t>(b) * dim;
    for (std::size_t i = lo; i < hi; ++i) term(i, part);
  }
  for (std::size_t j = 0; j < dim; ++j) out[j] = 0.0;
  for (std::size_t b = 0; b < nblocks; ++b)
    for (std::size_t j = 0; j < dim; ++j) out[j] += parts[b * dim + j];
}

// Parallel map over an index range (independent iterations).
template <class F>
void parallel_for(std::size_t n, F&& body) {
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
    body(static_cast<std::size_t>(i));
}

}  // namespace relulab::par
