#include "relulab/dataset.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace relulab {

double WeightVector::norm() const {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double WeightVector::dot(std::span<const double> x) const {
  if (x.size() != v.size())
    throw std::invalid_argument("WeightVector::dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * x[i];
  return s;
}

WeightVector WeightVector::normalized() const {
  const double n = norm();
  if (n == 0.0)
    throw std::invalid_argument("WeightVector::normalized: zero vector");
  WeightVector out = *this;
  out.scale(1.0 / n);
  return out;
}

void WeightVector::scale(double c) {
  for (double& x : v) x *= c;
}

void LabeledDataset::validate() const {
  if (xs.size() != dim * ys.size())
    throw std::invalid_argument("LabeledDataset: shape mismatch");
  for (double y : ys) {
    if (label_kind == LabelKind::kReal) {
      if (!(y >= 0.0 && y <= 1.0))
        throw std::invalid_argument("LabeledDataset: real label outside [0,1]");
    } else {
      if (y != 1.0 && y != -1.0)
        throw std::invalid_argument("LabeledDataset: boolean label not +-1");
    }
  }
}

void write_csv(const LabeledDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  out.precision(17);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto r = ds.row(i);
    for (std::size_t j = 0; j < ds.dim; ++j) out << r[j] << ',';
    out << ds.ys[i] << '\n';
  }
}

LabeledDataset read_csv(const std::string& path, LabelKind kind) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  LabeledDataset ds;
  ds.label_kind = kind;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<double> fields;
    std::string cell;
    while (std::getline(ss, cell, ',')) fields.push_back(std::stod(cell));
    if (fields.empty()) continue;
    if (ds.dim == 0) ds.dim = fields.size() - 1;
    if (fields.size() != ds.dim + 1)
      throw std::runtime_error("read_csv: ragged row in " + path);
    ds.xs.insert(ds.xs.end(), fields.begin(), fields.end() - 1);
    ds.ys.push_back(fields.back());
  }
  ds.validate();
  return ds;
}

namespace {
constexpr std::uint64_t kBinaryMagic = 0x52454C554C414201ull;
}

void write_binary(const LabeledDataset& ds, const std::string& path,
                  std::uint64_t seed) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_binary: cannot open " + path);
  const std::uint64_t d = ds.dim;
  const std::uint64_t m = ds.size();
  const std::uint64_t kind = static_cast<std::uint64_t>(ds.label_kind);
  out.write(reinterpret_cast<const char*>(&kBinaryMagic), 8);
  out.write(reinterpret_cast<const char*>(&d), 8);
  out.write(reinterpret_cast<const char*>(&m), 8);
  out.write(reinterpret_cast<const char*>(&kind), 8);
  out.write(reinterpret_cast<const char*>(&seed), 8);
  out.write(reinterpret_cast<const char*>(ds.xs.data()),
            static_cast<std::streamsize>(ds.xs.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(ds.ys.data()),
            static_cast<std::streamsize>(ds.ys.size() * sizeof(double)));
}

BinaryDataset read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_binary: cannot open " + path);
  std::uint64_t magic = 0, d = 0, m = 0, kind = 0, seed = 0;
  in.read(reinterpret_cast<char*>(&magic), 8);
  in.read(reinterpret_cast<char*>(&d), 8);
  in.read(reinterpret_cast<char*>(&m), 8);
  in.read(reinterpret_cast<char*>(&kind), 8);
  in.read(reinterpret_cast<char*>(&seed), 8);
  if (!in || magic != kBinaryMagic)
    throw std::runtime_error("read_binary: bad header in " + path);
  BinaryDataset out;
  out.seed = seed;
  out.data.dim = d;
  out.data.label_kind = static_cast<LabelKind>(kind);
  out.data.xs.resize(d * m);
  out.data.ys.resize(m);
  in.read(reinterpret_cast<char*>(out.data.xs.data()),
          static_cast<std::streamsize>(d * m * sizeof(double)));
  in.read(reinterpret_cast<char*>(out.data.ys.data()),
          static_cast<std::streamsize>(m * sizeof(double)));
  if (!in) throw std::runtime_error("read_binary: truncated file " + path);
  out.data.validate();
  return out;
}

void write_weights_csv(const std::vector<WeightVector>& ws,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_weights_csv: cannot open " + path);
  out.precision(17);
  for (const auto& w : ws) {
    for (std::size_t j = 0; j < w.dim(); ++j) {
      if (j) out << ',';
      out << w.v[j];
    }
    out << '\n';
  }
}

std::vector<WeightVector> read_weights_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_weights_csv: cannot open " + path);
  std::vector<WeightVector> ws;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    WeightVector w;
    while (std::getline(ss, cell, ',')) w.v.push_back(std::stod(cell));
    ws.push_back(std::move(w));
  }
  return ws;
}

}  // namespace relulab
