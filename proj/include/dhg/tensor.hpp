#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dhg {

// Dense row-major matrix of 64-bit floats. Row vectors are 1xN, scalars 1x1.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int64_t rows, int64_t cols);  // zero-filled
  Tensor(int64_t rows, int64_t cols, std::vector<double> data);

  static Tensor zeros(int64_t rows, int64_t cols) { return Tensor(rows, cols); }
  static Tensor full(int64_t rows, int64_t cols, double v);
  static Tensor row(std::vector<double> data);
  static Tensor scalar(double v) { return Tensor(1, 1, {v}); }

  int64_t rows() const { return rows_; }
  int64_t cols() const { return cols_; }
  int64_t size() const { return rows_ * cols_; }

  double& at(int64_t r, int64_t c) { return data_[static_cast<size_t>(r * cols_ + c)]; }
  double at(int64_t r, int64_t c) const { return data_[static_cast<size_t>(r * cols_ + c)]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& vec() { return data_; }
  const std::vector<double>& vec() const { return data_; }

  bool same_shape(const Tensor& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
  std::string shape_str() const;

  bool all_finite() const;

 private:
  int64_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

// C = A * B
Tensor matmul(const Tensor& a, const Tensor& b);
// C += A * B^T  (used by backward passes; shapes: A m x n, B k x n, C m x k)
void add_matmul_abT(Tensor& c, const Tensor& a, const Tensor& b);
// C += A^T * B  (A m x k, B m x n, C k x n)
void add_matmul_aTb(Tensor& c, const Tensor& a, const Tensor& b);

}  // namespace dhg
