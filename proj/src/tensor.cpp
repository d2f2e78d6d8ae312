#include "codesum/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "codesum/errors.hpp"

namespace codesum {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(shape_product(shape_), fill) {
  if (std::ranges::any_of(shape_, [](std::size_t d) { return d == 0; })) {
    throw Error(ErrorCode::kDimensionMismatch, "tensor extents must be positive");
  }
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_product(shape_) != data_.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "shape " + shape_string() + " does not match " + std::to_string(data_.size()) +
                    " values");
  }
}

Tensor Tensor::vector(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

void Tensor::fill(double value) { std::ranges::fill(data_, value); }

void Tensor::add_scaled(const Tensor& other, double scale) {
  if (other.shape_ != shape_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "add_scaled " + shape_string() + " vs " + other.shape_string());
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += scale * other.data_[i];
}

double Tensor::squared_norm() const {
  double sum = 0.0;
  for (double v : data_) sum += v * v;
  return sum;
}

bool Tensor::all_finite() const {
  return std::ranges::all_of(data_, [](double v) { return std::isfinite(v); });
}

std::string Tensor::shape_string() const {
  std::string out = "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(shape_[i]);
  }
  return out + "]";
}

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kKernelTooLong: return "KernelTooLong";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kUnbalancedBraces: return "UnbalancedBraces";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kEmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::kEmptyIndex: return "EmptyIndex";
    case ErrorCode::kVariantDisabled: return "VariantDisabled";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::kCorruptManifest: return "CorruptManifest";
    case ErrorCode::kTruncatedPayload: return "TruncatedPayload";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace codesum
