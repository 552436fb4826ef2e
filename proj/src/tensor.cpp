#include "dhg/tensor.hpp"

#include <cmath>

#include "dhg/error.hpp"

namespace dhg {

namespace {
size_t checked_size(int64_t rows, int64_t cols) {
  if (rows <= 0 || cols <= 0)
    throw ShapeError("Tensor: dimensions must be positive, got " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  return static_cast<size_t>(rows) * static_cast<size_t>(cols);
}
}  // namespace

Tensor::Tensor(int64_t rows, int64_t cols)
    : rows_(rows), cols_(cols), data_(checked_size(rows, cols), 0.0) {}

Tensor::Tensor(int64_t rows, int64_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (checked_size(rows, cols) != data_.size())
    throw ShapeError("Tensor: data length " + std::to_string(data_.size()) +
                     " does not match shape " + shape_str());
}

Tensor Tensor::full(int64_t rows, int64_t cols, double v) {
  Tensor t(rows, cols);
  for (auto& x : t.data_) x = v;
  return t;
}

Tensor Tensor::row(std::vector<double> data) {
  auto n = static_cast<int64_t>(data.size());
  return Tensor(1, n, std::move(data));
}

std::string Tensor::shape_str() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

bool Tensor::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows())
    throw ShapeError("matmul: inner dimensions do not match: " + a.shape_str() + " x " +
                     b.shape_str());
  const int64_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor c(m, n);
  const double* pa = a.data();
  const double* pb = b.data();
  double* pc = c.data();
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t p = 0; p < k; ++p) {
      double av = pa[i * k + p];
      if (av == 0.0) continue;
      const double* brow = pb + p * n;
      double* crow = pc + i * n;
      for (int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
  return c;
}

void add_matmul_abT(Tensor& c, const Tensor& a, const Tensor& b) {
  // c (m x k) += a (m x n) * b^T (n x k), b is k x n
  const int64_t m = a.rows(), n = a.cols(), k = b.rows();
  if (b.cols() != n || c.rows() != m || c.cols() != k)
    throw ShapeError("add_matmul_abT: incompatible shapes " + a.shape_str() + ", " +
                     b.shape_str() + ", " + c.shape_str());
  const double* pa = a.data();
  const double* pb = b.data();
  double* pc = c.data();
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t p = 0; p < k; ++p) {
      const double* arow = pa + i * n;
      const double* brow = pb + p * n;
      double acc = 0.0;
      for (int64_t j = 0; j < n; ++j) acc += arow[j] * brow[j];
      pc[i * k + p] += acc;
    }
  }
}

void add_matmul_aTb(Tensor& c, const Tensor& a, const Tensor& b) {
  // c (k x n) += a^T (k x m) * b (m x n), a is m x k
  const int64_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != m || c.rows() != k || c.cols() != n)
    throw ShapeError("add_matmul_aTb: incompatible shapes " + a.shape_str() + ", " +
                     b.shape_str() + ", " + c.shape_str());
  const double* pa = a.data();
  const double* pb = b.data();
  double* pc = c.data();
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t p = 0; p < k; ++p) {
      double av = pa[i * k + p];
      if (av == 0.0) continue;
      const double* brow = pb + i * n;
      double* crow = pc + p * n;
      for (int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

}  // namespace dhg
