#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mtgan {

// Dense row-major 2-D array of doubles. Scalars are [1,1], row vectors [1,n].
struct Tensor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  Tensor(std::size_t r, std::size_t c, std::vector<double> d);

  static Tensor zeros(std::size_t r, std::size_t c) { return Tensor(r, c); }
  static Tensor full(std::size_t r, std::size_t c, double v);
  static Tensor scalar(double v);
  static Tensor row(std::vector<double> d);

  std::size_t size() const { return rows * cols; }
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
  bool is_scalar() const { return rows == 1 && cols == 1; }
  double item() const;
  bool all_finite() const;
  std::string shape_str() const;
};

bool value_equal(const Tensor& a, const Tensor& b);

// Raw (untracked) arithmetic used by both forward evaluation and optimizers.
namespace tmath {
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor smul(const Tensor& a, double c);
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor add_row(const Tensor& a, const Tensor& bias);  // bias [1,n] broadcast over rows
double sum(const Tensor& a);
double max_abs(const Tensor& a);
double l2_norm(const Tensor& a);
}  // namespace tmath

[[noreturn]] void shape_error(const std::string& op, const Tensor& a, const Tensor& b);
[[noreturn]] void shape_error(const std::string& op, const Tensor& a);

}  // namespace mtgan
