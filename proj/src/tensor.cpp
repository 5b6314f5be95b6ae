#include "dkgm/tensor.hpp"

#include <cmath>
#include <stdexcept>

#include "dkgm/errors.hpp"

namespace dkgm {

namespace {
std::size_t checked_product(const std::vector<std::size_t>& dims) {
  std::size_t n = 1;
  for (std::size_t d : dims) {
    if (d == 0) throw std::invalid_argument("tensor dims must be positive");
    n *= d;
  }
  return n;
}
}  // namespace

Tensor::Tensor(std::vector<std::size_t> dims)
    : dims_(std::move(dims)), data_(checked_product(dims_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> dims, Vec data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  if (checked_product(dims_) != data_.size())
    throw std::invalid_argument("tensor data length does not match dims");
  check_finite("tensor construction");
}

Tensor Tensor::scalar(double v) { return Tensor({1}, {v}); }

Tensor Tensor::vector(Vec v) {
  std::size_t n = v.size();
  return Tensor({n}, std::move(v));
}

double Tensor::at(std::size_t i, std::size_t j) const {
  return data_[i * dims_[1] + j];
}

double& Tensor::at(std::size_t i, std::size_t j) {
  return data_[i * dims_[1] + j];
}

bool Tensor::finite() const { return all_finite(data_); }

void Tensor::check_finite(const char* context) const {
  if (!finite()) throw NumericError(std::string(context) + ": non-finite tensor entry");
}

Tensor& Tensor::operator+=(const Tensor& other) {
  if (dims_ != other.dims_) throw std::invalid_argument("tensor shape mismatch in +=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
  if (dims_ != other.dims_) throw std::invalid_argument("tensor shape mismatch in -=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Tensor& Tensor::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
Tensor operator*(Tensor a, double s) { return a *= s; }
Tensor operator*(double s, Tensor a) { return a *= s; }

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_distance(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("squared_distance: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double norm(const Vec& v) { return std::sqrt(dot(v, v)); }

bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace dkgm
