#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gatenav {

// Row-major N-dimensional float32 array with an optional gradient buffer of
// the same extent. The single numeric currency of every model in the project.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape);
  Tensor(std::vector<int> shape, std::vector<float> data);

  static Tensor zeros(std::vector<int> shape);
  static Tensor full(std::vector<int> shape, float value);
  static Tensor scalar(float value);

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  int64_t size() const { return static_cast<int64_t>(data_.size()); }

  float* data() { return data_.data(); }
  const float* data() const { return data_.data(); }
  std::vector<float>& vec() { return data_; }
  const std::vector<float>& vec() const { return data_; }

  bool has_grad() const { return !grad_.empty(); }
  void alloc_grad();  // zero-filled, same extent
  void zero_grad();
  void drop_grad();
  float* grad() { return grad_.data(); }
  const float* grad() const { return grad_.data(); }
  std::vector<float>& grad_vec() { return grad_; }
  const std::vector<float>& grad_vec() const { return grad_; }

  float& at(int64_t i) { return data_[static_cast<size_t>(i)]; }
  float at(int64_t i) const { return data_[static_cast<size_t>(i)]; }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  // Throws NumericsError if any element (or gradient element) is not finite.
  void check_finite(const std::string& where) const;

 private:
  std::vector<int> shape_;
  std::vector<float> data_;
  std::vector<float> grad_;
};

int64_t shape_numel(const std::vector<int>& shape);
std::string shape_str(const std::vector<int>& shape);

}  // namespace gatenav
