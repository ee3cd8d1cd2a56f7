#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace relulab {

struct WeightVector {
  std::vector<double> v;

  WeightVector() = default;
  explicit WeightVector(std::size_t dim) : v(dim, 0.0) {}
  explicit WeightVector(std::vector<double> values) : v(std::move(values)) {}

  std::size_t dim() const { return v.size(); }
  double norm() const;
  double dot(std::span<const double> x) const;
  WeightVector normalized() const;  // throws on the zero vector
  void scale(double c);
};

enum class LabelKind : std::uint8_t {
  kReal = 0,     // labels in [0, 1]
  kBoolean = 1,  // labels in {-1, +1}
};

enum class MarginalTag : std::uint8_t {
  kGaussian = 0,
  kBooleanCube = 1,
  kLifted = 2,
};

// Row-major sample matrix plus labels. All rows share the dimension; real
// labels lie in [0,1], boolean labels in {-1,+1} (checked on construction
// helpers and on import).
struct LabeledDataset {
  std::size_t dim = 0;
  std::vector<double> xs;  // size m * dim
  std::vector<double> ys;  // size m
  LabelKind label_kind = LabelKind::kReal;
  MarginalTag marginal = MarginalTag::kGaussian;

  std::size_t size() const { return ys.size(); }
  std::span<const double> row(std::size_t i) const {
    return {xs.data() + i * dim, dim};
  }
  double* mutable_row(std::size_t i) { return xs.data() + i * dim; }

  // Throws std::out_of_range / std::invalid_argument on violations.
  void validate() const;
};

// CSV: one row per sample, coordinates then label.
void write_csv(const LabeledDataset& ds, const std::string& path);
LabeledDataset read_csv(const std::string& path, LabelKind kind);

// Binary: header {magic, d, m, label_kind, seed} then doubles.
void write_binary(const LabeledDataset& ds, const std::string& path,
                  std::uint64_t seed);
struct BinaryDataset {
  LabeledDataset data;
  std::uint64_t seed = 0;
};
BinaryDataset read_binary(const std::string& path);

// Hypothesis sidecar: weight vectors in the dataset CSV format (one row,
// coordinates only).
void write_weights_csv(const std::vector<WeightVector>& ws,
                       const std::string& path);
std::vector<WeightVector> read_weights_csv(const std::string& path);

}  // namespace relulab
