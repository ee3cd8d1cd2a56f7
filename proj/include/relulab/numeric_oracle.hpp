#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "relulab/rng.hpp"

namespace relulab::oracle {

// Gauss rule for E_{x~N(0,1)}[f(x)]: probabilists' Hermite nodes/weights.
// Exact for polynomials of degree <= 2*nodes - 1.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

// Nodes from Sturm-sequence bisection on the Jacobi matrix, polished by
// Newton; weights are the Christoffel numbers of the orthonormal basis.
QuadratureRule gauss_hermite_rule(std::size_t n_nodes);

// Gauss-Legendre nodes/weights on [-1, 1].
QuadratureRule gauss_legendre_rule(std::size_t n_nodes);

// Weighted node sum approximating E_{N(0,1)}[f]. Throws std::domain_error if
// f is non-finite on a node.
double quad_expectation(const std::function<double(double)>& f,
                        const QuadratureRule& rule);

// E_{N(0,1)}[f] for integrands with a kink or jump at 0 (ReLU, sign):
// composite Gauss-Legendre panels on [-half_width, 0] and [0, half_width]
// with the Gaussian density folded into the integrand. Spectrally accurate
// on each smooth piece; the tail beyond 14 sigma is below 5e-44.
double quad_expectation_split(const std::function<double(double)>& f,
                              std::size_t panel_nodes = 32,
                              double half_width = 14.0);

// E[ReLU((z1+z2)/sqrt(2)) * sign(z1) * sign(z2)] over independent standard
// normals, by tensor-product quadrature split at the coordinate axes and at
// the interior ReLU kink of the mixed-sign quadrants. >= 8 significant
// digits at the default node count. with_parity_sign=false drops the sign
// factor, giving E[ReLU((z1+z2)/sqrt(2))] = 1/sqrt(2*pi) as a cross-check.
double correlation_2d_quadrature(std::size_t n_nodes = 96,
                                 bool with_parity_sign = true);

struct McEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;

  bool within_sigma(double truth, double sigmas) const {
    return std::abs(mean - truth) <= sigmas * stderr_;
  }
};

// Seeded Monte Carlo mean of f over m-dimensional standard Gaussian input.
// Deterministic for a fixed seed regardless of thread count.
McEstimate mc_expectation(const std::function<double(const double*)>& f,
                          std::size_t m, std::size_t n, std::uint64_t seed);

// Serial reference for the kernel-consistency tests.
McEstimate mc_expectation_serial(const std::function<double(const double*)>& f,
                                 std::size_t m, std::size_t n,
                                 std::uint64_t seed);

}  // namespace relulab::oracle
