#include "relulab/numeric_oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "relulab/parallel.hpp"

namespace relulab::oracle {

namespace {

// Orthonormal probabilists' Hermite value and the full sequence
// p_0..p_n at x:  p_{j+1} = (x p_j - sqrt(j) p_{j-1}) / sqrt(j+1).
double orthonormal_hermite_seq(std::size_t n, double x,
                               std::vector<double>* seq = nullptr) {
  double pm1 = 0.0;
  double p = 1.0;
  if (seq) (*seq)[0] = p;
  for (std::size_t j = 0; j < n; ++j) {
    const double next =
        (x * p - std::sqrt(static_cast<double>(j)) * pm1) /
        std::sqrt(static_cast<double>(j + 1));
    pm1 = p;
    p = next;
    if (seq) (*seq)[j + 1] = p;
  }
  return p;
}

// Number of eigenvalues of the Jacobi matrix (diag 0, offdiag sqrt(i))
// strictly below x, via the Sturm sequence of leading principal minors.
std::size_t sturm_count(std::size_t n, double x) {
  std::size_t count = 0;
  double q = -x;
  if (q < 0.0) ++count;
  for (std::size_t i = 2; i <= n; ++i) {
    const double b2 = static_cast<double>(i - 1);  // sqrt(i-1)^2
    if (q == 0.0) q = 1e-300;
    q = -x - b2 / q;
    if (q < 0.0) ++count;
  }
  return count;
}

}  // namespace

QuadratureRule gauss_hermite_rule(std::size_t n_nodes) {
  if (n_nodes == 0) throw std::invalid_argument("gauss_hermite_rule: 0 nodes");
  QuadratureRule rule;
  rule.nodes.resize(n_nodes);
  rule.weights.resize(n_nodes);
  const double bound = std::sqrt(4.0 * static_cast<double>(n_nodes) + 2.0);
  std::vector<double> seq(n_nodes + 1);
  for (std::size_t j = 0; j < n_nodes; ++j) {
    // Bisect for the (j+1)-th smallest eigenvalue.
    double lo = -bound, hi = bound;
    for (int iter = 0; iter < 80; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (sturm_count(n_nodes, mid) >= j + 1)
        hi = mid;
      else
        lo = mid;
    }
    double x = 0.5 * (lo + hi);
    // Newton polish on the orthonormal polynomial: p_n' = sqrt(n) p_{n-1}.
    for (int iter = 0; iter < 8; ++iter) {
      orthonormal_hermite_seq(n_nodes, x, &seq);
      const double deriv =
          std::sqrt(static_cast<double>(n_nodes)) * seq[n_nodes - 1];
      if (deriv == 0.0) break;
      const double step = seq[n_nodes] / deriv;
      x -= step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(x))) break;
    }
    orthonormal_hermite_seq(n_nodes, x, &seq);
    double norm2 = 0.0;
    for (std::size_t k = 0; k < n_nodes; ++k) norm2 += seq[k] * seq[k];
    rule.nodes[j] = x;
    rule.weights[j] = 1.0 / norm2;
  }
  return rule;
}

QuadratureRule gauss_legendre_rule(std::size_t n_nodes) {
  if (n_nodes == 0) throw std::invalid_argument("gauss_legendre_rule: 0 nodes");
  QuadratureRule rule;
  rule.nodes.resize(n_nodes);
  rule.weights.resize(n_nodes);
  const std::size_t half = (n_nodes + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi *
                        (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n_nodes) + 0.5));
    double p0 = 0.0, p1 = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      p0 = 1.0;
      p1 = x;
      for (std::size_t j = 2; j <= n_nodes; ++j) {
        const double jj = static_cast<double>(j);
        const double p2 = ((2.0 * jj - 1.0) * x * p1 - (jj - 1.0) * p0) / jj;
        p0 = p1;
        p1 = p2;
      }
      const double deriv =
          static_cast<double>(n_nodes) * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / deriv;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double deriv =
        static_cast<double>(n_nodes) * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * deriv * deriv);
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.nodes[n_nodes - 1 - i] = x;
    rule.weights[n_nodes - 1 - i] = w;
  }
  return rule;
}

double quad_expectation(const std::function<double(double)>& f,
                        const QuadratureRule& rule) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = f(rule.nodes[i]);
    if (!std::isfinite(v))
      throw std::domain_error("quad_expectation: non-finite integrand value");
    sum += rule.weights[i] * v;
  }
  return sum;
}

namespace {

double gaussian_density(double x) {
  return std::exp(-0.5 * x * x) *
         (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
}

// Integral of f(x) phi(x) over [a, b] by unit-width composite GL panels.
double panel_integral(const std::function<double(double)>& f, double a,
                      double b, const QuadratureRule& gl) {
  const int panels = static_cast<int>(std::ceil(b - a));
  const double width = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double mid = lo + 0.5 * width;
    const double scale = 0.5 * width;
    for (std::size_t i = 0; i < gl.size(); ++i) {
      const double x = mid + scale * gl.nodes[i];
      sum += scale * gl.weights[i] * f(x) * gaussian_density(x);
    }
  }
  return sum;
}

}  // namespace

double quad_expectation_split(const std::function<double(double)>& f,
                              std::size_t panel_nodes, double half_width) {
  const QuadratureRule gl = gauss_legendre_rule(panel_nodes);
  return panel_integral(f, -half_width, 0.0, gl) +
         panel_integral(f, 0.0, half_width, gl);
}

double correlation_2d_quadrature(std::size_t n_nodes, bool with_parity_sign) {
  if (n_nodes < 32)
    throw std::invalid_argument("correlation_2d_quadrature: need >= 32 nodes");
  const QuadratureRule gl = gauss_legendre_rule(n_nodes);
  const double X = 14.0;
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

  // Quadrant z1 > 0, z2 > 0: the ReLU argument is positive, integrand smooth.
  // Tensor rule over [0, X]^2 in unit panels.
  const int panels = static_cast<int>(X);
  double both_positive = 0.0;
  for (int pa = 0; pa < panels; ++pa) {
    for (int pb = 0; pb < panels; ++pb) {
      for (std::size_t i = 0; i < gl.size(); ++i) {
        const double z1 = pa + 0.5 + 0.5 * gl.nodes[i];
        const double w1 = 0.5 * gl.weights[i] * gaussian_density(z1);
        for (std::size_t j = 0; j < gl.size(); ++j) {
          const double z2 = pb + 0.5 + 0.5 * gl.nodes[j];
          const double w2 = 0.5 * gl.weights[j] * gaussian_density(z2);
          both_positive += w1 * w2 * (z1 + z2) * inv_sqrt2;
        }
      }
    }
  }

  // Mixed quadrant z1 > 0, z2 < 0 (and its mirror): after z2 -> -v the
  // integrand is (z1 - v)/sqrt(2) on the triangle 0 < v < z1 and zero above
  // it. Map the triangle with v = z1 * t so the kink lies on the boundary.
  double mixed = 0.0;
  for (int pa = 0; pa < panels; ++pa) {
    for (std::size_t i = 0; i < gl.size(); ++i) {
      const double z1 = pa + 0.5 + 0.5 * gl.nodes[i];
      const double w1 = 0.5 * gl.weights[i] * gaussian_density(z1);
      double inner = 0.0;
      for (std::size_t j = 0; j < gl.size(); ++j) {
        const double t = 0.5 + 0.5 * gl.nodes[j];
        const double wt = 0.5 * gl.weights[j];
        inner += wt * (1.0 - t) * gaussian_density(z1 * t);
      }
      mixed += w1 * z1 * z1 * inner * inv_sqrt2;
    }
  }

  return with_parity_sign ? both_positive - 2.0 * mixed
                          : both_positive + 2.0 * mixed;
}

namespace {

McEstimate mc_finish(double sum, double sumsq, std::size_t n,
                     std::uint64_t seed) {
  McEstimate est;
  est.n = n;
  est.seed = seed;
  est.mean = sum / static_cast<double>(n);
  const double var =
      (sumsq - sum * sum / static_cast<double>(n)) /
      (static_cast<double>(n) - 1.0);
  est.stderr_ = std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
  return est;
}

}  // namespace

McEstimate mc_expectation(const std::function<double(const double*)>& f,
                          std::size_t m, std::size_t n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("mc_expectation: need n >= 2");
  const CounterRng rng(seed, stream::kMc);
  double acc[2];
  par::block_sum_vec(
      n, 2,
      [&](std::size_t i, double* part) {
        thread_local std::vector<double> xs;
        if (xs.size() < m) xs.resize(m);
        for (std::size_t j = 0; j < m; ++j)
          xs[j] = rng.gaussian(i * m + j);
        const double v = f(xs.data());
        part[0] += v;
        part[1] += v * v;
      },
      acc);
  return mc_finish(acc[0], acc[1], n, seed);
}

McEstimate mc_expectation_serial(const std::function<double(const double*)>& f,
                                 std::size_t m, std::size_t n,
                                 std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("mc_expectation: need n >= 2");
  const CounterRng rng(seed, stream::kMc);
  std::vector<double> xs(m);
  double acc[2];
  par::block_sum_vec_serial(
      n, 2,
      [&](std::size_t i, double* part) {
        for (std::size_t j = 0; j < m; ++j)
          xs[j] = rng.gaussian(i * m + j);
        const double v = f(xs.data());
        part[0] += v;
        part[1] += v * v;
      },
      acc);
  return mc_finish(acc[0], acc[1], n, seed);
}

}  // namespace relulab::oracle
