#include "mtgan/tensor.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mtgan {

Tensor::Tensor(std::size_t r, std::size_t c, std::vector<double> d)
    : rows(r), cols(c), data(std::move(d)) {
  if (data.size() != r * c) {
    throw std::invalid_argument("Tensor: data length " + std::to_string(data.size()) +
                                " does not match shape [" + std::to_string(r) + "," +
                                std::to_string(c) + "]");
  }
}

Tensor Tensor::full(std::size_t r, std::size_t c, double v) {
  Tensor t(r, c);
  for (auto& x : t.data) x = v;
  return t;
}

Tensor Tensor::scalar(double v) { return Tensor(1, 1, {v}); }

Tensor Tensor::row(std::vector<double> d) {
  const std::size_t n = d.size();
  return Tensor(1, n, std::move(d));
}

double Tensor::item() const {
  if (!is_scalar()) throw std::invalid_argument("Tensor::item on non-scalar " + shape_str());
  return data[0];
}

bool Tensor::all_finite() const {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

std::string Tensor::shape_str() const {
  return "[" + std::to_string(rows) + "," + std::to_string(cols) + "]";
}

bool value_equal(const Tensor& a, const Tensor& b) {
  return a.rows == b.rows && a.cols == b.cols && a.data == b.data;
}

void shape_error(const std::string& op, const Tensor& a, const Tensor& b) {
  throw std::invalid_argument(op + ": incompatible shapes " + a.shape_str() + " and " +
                              b.shape_str());
}

void shape_error(const std::string& op, const Tensor& a) {
  throw std::invalid_argument(op + ": bad shape " + a.shape_str());
}

namespace tmath {

Tensor add(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) shape_error("add", a, b);
  Tensor r = a;
  for (std::size_t i = 0; i < r.data.size(); ++i) r.data[i] += b.data[i];
  return r;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) shape_error("sub", a, b);
  Tensor r = a;
  for (std::size_t i = 0; i < r.data.size(); ++i) r.data[i] -= b.data[i];
  return r;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) shape_error("mul", a, b);
  Tensor r = a;
  for (std::size_t i = 0; i < r.data.size(); ++i) r.data[i] *= b.data[i];
  return r;
}

Tensor smul(const Tensor& a, double c) {
  Tensor r = a;
  for (auto& x : r.data) x *= c;
  return r;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols != b.rows) shape_error("matmul", a, b);
  Tensor r(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double av = a.data[i * a.cols + k];
      if (av == 0.0) continue;
      const double* brow = &b.data[k * b.cols];
      double* rrow = &r.data[i * r.cols];
      for (std::size_t j = 0; j < b.cols; ++j) rrow[j] += av * brow[j];
    }
  }
  return r;
}

Tensor transpose(const Tensor& a) {
  Tensor r(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) r.data[j * r.cols + i] = a.data[i * a.cols + j];
  return r;
}

Tensor add_row(const Tensor& a, const Tensor& bias) {
  if (bias.rows != 1 || bias.cols != a.cols) shape_error("add_row", a, bias);
  Tensor r = a;
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) r.data[i * a.cols + j] += bias.data[j];
  return r;
}

double sum(const Tensor& a) {
  double s = 0.0;
  for (double v : a.data) s += v;
  return s;
}

double max_abs(const Tensor& a) {
  double m = 0.0;
  for (double v : a.data) m = std::max(m, std::fabs(v));
  return m;
}

double l2_norm(const Tensor& a) {
  double s = 0.0;
  for (double v : a.data) s += v * v;
  return std::sqrt(s);
}

}  // namespace tmath
}  // namespace mtgan
