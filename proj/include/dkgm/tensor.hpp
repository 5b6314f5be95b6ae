#pragma once

#include <cstddef>
#include <vector>

namespace dkgm {

using Vec = std::vector<double>;

/// Dense n-dimensional real array, row-major. The invariants are
/// product(dims) == data.size() and all entries finite; constructors and
/// the mutating helpers below enforce both.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> dims);       // zero-filled
  Tensor(std::vector<std::size_t> dims, Vec data);      // validates

  static Tensor scalar(double v);
  static Tensor vector(Vec v);

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t rank() const { return dims_.size(); }
  std::size_t size() const { return data_.size(); }

  const Vec& values() const { return data_; }
  Vec take() && { return std::move(data_); }

  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }

  // rank-2 access, row-major
  double at(std::size_t i, std::size_t j) const;
  double& at(std::size_t i, std::size_t j);

  bool finite() const;
  void check_finite(const char* context) const;  // throws NumericError

  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);
  Tensor& operator*=(double s);

 private:
  std::vector<std::size_t> dims_;
  Vec data_;
};

Tensor operator+(Tensor a, const Tensor& b);
Tensor operator-(Tensor a, const Tensor& b);
Tensor operator*(Tensor a, double s);
Tensor operator*(double s, Tensor a);

// small Vec helpers shared across modules
double dot(const Vec& a, const Vec& b);
double squared_distance(const Vec& a, const Vec& b);
double norm(const Vec& v);
bool all_finite(const Vec& v);

}  // namespace dkgm
