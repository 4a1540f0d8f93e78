#include "gatenav/numerics/tensor.hpp"

#include <cmath>
#include <sstream>

#include "gatenav/common/error.hpp"

namespace gatenav {

int64_t shape_numel(const std::vector<int>& shape) {
  int64_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw NumericsError("tensor extent must be positive, got " + shape_str(shape));
    n *= d;
  }
  return n;
}

std::string shape_str(const std::vector<int>& shape) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << "x";
    os << shape[i];
  }
  os << "]";
  return os.str();
}

Tensor::Tensor(std::vector<int> shape)
    : shape_(std::move(shape)), data_(static_cast<size_t>(shape_numel(shape_)), 0.0f) {}

Tensor::Tensor(std::vector<int> shape, std::vector<float> data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_numel(shape_) != static_cast<int64_t>(data_.size()))
    throw NumericsError("tensor data length does not match shape " + shape_str(shape_));
}

Tensor Tensor::zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }

Tensor Tensor::full(std::vector<int> shape, float value) {
  Tensor t(std::move(shape));
  for (auto& x : t.data_) x = value;
  return t;
}

Tensor Tensor::scalar(float value) { return Tensor({1}, {value}); }

void Tensor::alloc_grad() {
  if (grad_.size() != data_.size()) grad_.assign(data_.size(), 0.0f);
}

void Tensor::zero_grad() {
  if (!grad_.empty()) grad_.assign(grad_.size(), 0.0f);
}

void Tensor::drop_grad() { grad_.clear(); }

void Tensor::check_finite(const std::string& where) const {
  for (float x : data_) {
    if (!std::isfinite(x)) throw NumericsError("non-finite value in " + where);
  }
  for (float g : grad_) {
    if (!std::isfinite(g)) throw NumericsError("non-finite gradient in " + where);
  }
}

}  // namespace gatenav
