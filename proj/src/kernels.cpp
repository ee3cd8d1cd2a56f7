#include "relulab/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "relulab/parallel.hpp"

namespace relulab::kernels {

namespace {

void check(const LabeledDataset& ds, const WeightVector& w) {
  if (ds.size() == 0) throw std::invalid_argument("kernel: empty dataset");
  if (w.dim() != ds.dim)
    throw std::invalid_argument("kernel: dimension mismatch");
}

template <class Sum>
double loss_impl(const LabeledDataset& ds, const WeightVector& w, Sum&& sum) {
  check(ds, w);
  const double* xs = ds.xs.data();
  const double* ys = ds.ys.data();
  const std::size_t d = ds.dim;
  const double* wv = w.v.data();
  const double total = sum(ds.size(), [=](std::size_t i) {
    const double* row = xs + i * d;
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += wv[j] * row[j];
    const double r = (s > 0.0 ? s : 0.0) - ys[i];
    return r * r;
  });
  return total / static_cast<double>(ds.size());
}

template <class SumVec>
double gradient_impl(const LabeledDataset& ds, const WeightVector& w,
                     WeightVector* grad, SumVec&& sum_vec) {
  check(ds, w);
  const double* xs = ds.xs.data();
  const double* ys = ds.ys.data();
  const std::size_t d = ds.dim;
  const double* wv = w.v.data();
  std::vector<double> acc(d + 1);
  sum_vec(
      ds.size(), d + 1,
      [=](std::size_t i, double* part) {
        const double* row = xs + i * d;
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += wv[j] * row[j];
        const double relu = s > 0.0 ? s : 0.0;
        const double r = relu - ys[i];
        part[d] += r * r;
        if (s >= 0.0) {  // 1_+(0) = 1
          const double c = 2.0 * r;
          for (std::size_t j = 0; j < d; ++j) part[j] += c * row[j];
        }
      },
      acc.data());
  const double inv_m = 1.0 / static_cast<double>(ds.size());
  grad->v.assign(acc.begin(), acc.end() - 1);
  for (double& g : grad->v) g *= inv_m;
  return acc[d] * inv_m;
}

template <class SumVec>
WeightVector mean_impl(const LabeledDataset& ds, SumVec&& sum_vec) {
  if (ds.size() == 0) throw std::invalid_argument("kernel: empty dataset");
  const double* xs = ds.xs.data();
  const double* ys = ds.ys.data();
  const std::size_t d = ds.dim;
  WeightVector out(d);
  sum_vec(
      ds.size(), d,
      [=](std::size_t i, double* part) {
        const double* row = xs + i * d;
        const double y = ys[i];
        for (std::size_t j = 0; j < d; ++j) part[j] += y * row[j];
      },
      out.v.data());
  out.scale(1.0 / static_cast<double>(ds.size()));
  return out;
}

template <class Sum>
double sign_error_impl(const LabeledDataset& ds, const WeightVector& w,
                       Sum&& sum) {
  check(ds, w);
  const double* xs = ds.xs.data();
  const double* ys = ds.ys.data();
  const std::size_t d = ds.dim;
  const double* wv = w.v.data();
  const double total = sum(ds.size(), [=](std::size_t i) {
    const double* row = xs + i * d;
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += wv[j] * row[j];
    const double predicted = s >= 0.0 ? 1.0 : -1.0;
    return predicted != ys[i] ? 1.0 : 0.0;
  });
  return total / static_cast<double>(ds.size());
}

template <class Sum>
double loss_rows_skip_impl(const LabeledDataset& ds, const WeightVector& w,
                           std::size_t row_begin, std::size_t row_end,
                           std::size_t skip, Sum&& sum) {
  if (row_end > ds.size() || row_begin >= row_end)
    throw std::invalid_argument("kernel: bad row range");
  if (skip >= ds.dim || w.dim() + 1 != ds.dim)
    throw std::invalid_argument("kernel: skip/dimension mismatch");
  const double* xs = ds.xs.data();
  const double* ys = ds.ys.data();
  const std::size_t d = ds.dim;
  const double* wv = w.v.data();
  const std::size_t n = row_end - row_begin;
  const double total = sum(n, [=](std::size_t idx) {
    const std::size_t i = row_begin + idx;
    const double* row = xs + i * d;
    double s = 0.0;
    for (std::size_t c = 0; c < skip; ++c) s += wv[c] * row[c];
    for (std::size_t c = skip + 1; c < d; ++c) s += wv[c - 1] * row[c];
    const double r = (s > 0.0 ? s : 0.0) - ys[i];
    return r * r;
  });
  return total / static_cast<double>(n);
}

template <class SumVec>
DirectionMoments direction_impl(const std::vector<const double*>& columns,
                                std::size_t m,
                                const std::vector<std::size_t>& support,
                                const double* ys, SumVec&& sum_vec) {
  if (support.empty())
    throw std::invalid_argument("direction_moments: empty support");
  const double inv_sqrt_t = 1.0 / std::sqrt(static_cast<double>(support.size()));
  double acc[2];
  sum_vec(
      m, 2,
      [&](std::size_t i, double* part) {
        double s = 0.0;
        for (std::size_t j : support) s += columns[j][i];
        s *= inv_sqrt_t;
        const double relu = s > 0.0 ? s : 0.0;
        part[0] += relu * relu;
        part[1] += relu * ys[i];
      },
      acc);
  return {acc[0] / static_cast<double>(m), acc[1] / static_cast<double>(m)};
}

template <class SumVec>
std::size_t hinge_impl(const LabeledDataset& ds, const WeightVector& w,
                       double band, WeightVector* grad, SumVec&& sum_vec) {
  check(ds, w);
  const double* xs = ds.xs.data();
  const double* ys = ds.ys.data();
  const std::size_t d = ds.dim;
  const double* wv = w.v.data();
  std::vector<double> acc(d + 1);
  sum_vec(
      ds.size(), d + 1,
      [=](std::size_t i, double* part) {
        const double* row = xs + i * d;
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += wv[j] * row[j];
        if (std::abs(s) > band) return;
        part[d] += 1.0;
        if (ys[i] * s < band)
          for (std::size_t j = 0; j < d; ++j) part[j] -= ys[i] * row[j];
      },
      acc.data());
  grad->v.assign(acc.begin(), acc.end() - 1);
  const std::size_t in_band = static_cast<std::size_t>(acc[d]);
  if (in_band > 0)
    grad->scale(1.0 / static_cast<double>(in_band));
  return in_band;
}

}  // namespace

double relu_square_loss(const LabeledDataset& ds, const WeightVector& w) {
  return loss_impl(ds, w, [](std::size_t n, auto&& f) {
    return par::block_sum(n, f);
  });
}
double relu_square_loss_serial(const LabeledDataset& ds,
                               const WeightVector& w) {
  return loss_impl(ds, w, [](std::size_t n, auto&& f) {
    return par::block_sum_serial(n, f);
  });
}

double relu_loss_gradient(const LabeledDataset& ds, const WeightVector& w,
                          WeightVector* grad) {
  return gradient_impl(ds, w, grad,
                       [](std::size_t n, std::size_t dim, auto&& f, double* o) {
                         par::block_sum_vec(n, dim, f, o);
                       });
}
double relu_loss_gradient_serial(const LabeledDataset& ds,
                                 const WeightVector& w, WeightVector* grad) {
  return gradient_impl(ds, w, grad,
                       [](std::size_t n, std::size_t dim, auto&& f, double* o) {
                         par::block_sum_vec_serial(n, dim, f, o);
                       });
}

WeightVector label_weighted_mean(const LabeledDataset& ds) {
  return mean_impl(ds, [](std::size_t n, std::size_t dim, auto&& f, double* o) {
    par::block_sum_vec(n, dim, f, o);
  });
}
WeightVector label_weighted_mean_serial(const LabeledDataset& ds) {
  return mean_impl(ds, [](std::size_t n, std::size_t dim, auto&& f, double* o) {
    par::block_sum_vec_serial(n, dim, f, o);
  });
}

double sign_error(const LabeledDataset& ds, const WeightVector& w) {
  return sign_error_impl(ds, w, [](std::size_t n, auto&& f) {
    return par::block_sum(n, f);
  });
}
double sign_error_serial(const LabeledDataset& ds, const WeightVector& w) {
  return sign_error_impl(ds, w, [](std::size_t n, auto&& f) {
    return par::block_sum_serial(n, f);
  });
}

double relu_square_loss_rows_skip(const LabeledDataset& ds,
                                  const WeightVector& w, std::size_t row_begin,
                                  std::size_t row_end, std::size_t skip) {
  return loss_rows_skip_impl(ds, w, row_begin, row_end, skip,
                             [](std::size_t n, auto&& f) {
                               return par::block_sum(n, f);
                             });
}
double relu_square_loss_rows_skip_serial(const LabeledDataset& ds,
                                         const WeightVector& w,
                                         std::size_t row_begin,
                                         std::size_t row_end,
                                         std::size_t skip) {
  return loss_rows_skip_impl(ds, w, row_begin, row_end, skip,
                             [](std::size_t n, auto&& f) {
                               return par::block_sum_serial(n, f);
                             });
}

DirectionMoments direction_moments(const std::vector<const double*>& columns,
                                   std::size_t m,
                                   const std::vector<std::size_t>& support,
                                   const double* ys) {
  return direction_impl(columns, m, support, ys,
                        [](std::size_t n, std::size_t dim, auto&& f,
                           double* o) { par::block_sum_vec(n, dim, f, o); });
}
DirectionMoments direction_moments_serial(
    const std::vector<const double*>& columns, std::size_t m,
    const std::vector<std::size_t>& support, const double* ys) {
  return direction_impl(columns, m, support, ys,
                        [](std::size_t n, std::size_t dim, auto&& f,
                           double* o) {
                          par::block_sum_vec_serial(n, dim, f, o);
                        });
}

std::size_t banded_hinge_subgradient(const LabeledDataset& ds,
                                     const WeightVector& w, double band,
                                     WeightVector* grad) {
  return hinge_impl(ds, w, band, grad,
                    [](std::size_t n, std::size_t dim, auto&& f, double* o) {
                      par::block_sum_vec(n, dim, f, o);
                    });
}
std::size_t banded_hinge_subgradient_serial(const LabeledDataset& ds,
                                            const WeightVector& w, double band,
                                            WeightVector* grad) {
  return hinge_impl(ds, w, band, grad,
                    [](std::size_t n, std::size_t dim, auto&& f, double* o) {
                      par::block_sum_vec_serial(n, dim, f, o);
                    });
}

double mean_label_square(const LabeledDataset& ds) {
  if (ds.size() == 0) throw std::invalid_argument("kernel: empty dataset");
  const double* ys = ds.ys.data();
  const double total = par::block_sum(
      ds.size(), [=](std::size_t i) { return ys[i] * ys[i]; });
  return total / static_cast<double>(ds.size());
}

}  // namespace relulab::kernels
