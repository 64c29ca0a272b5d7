#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace potmap {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Dense rank-3 array with row-major storage. The meaning of each slot is fixed
// by the producing function; see the layout notes in each module header.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int d0, int d1, int d2, double fill = 0.0)
      : d0_(d0), d1_(d1), d2_(d2), data_(static_cast<std::size_t>(d0) * d1 * d2, fill) {}

  int dim0() const noexcept { return d0_; }
  int dim1() const noexcept { return d1_; }
  int dim2() const noexcept { return d2_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(int a, int b, int c) {
    assert(a >= 0 && a < d0_ && b >= 0 && b < d1_ && c >= 0 && c < d2_);
    return data_[(static_cast<std::size_t>(a) * d1_ + b) * d2_ + c];
  }
  double operator()(int a, int b, int c) const {
    assert(a >= 0 && a < d0_ && b >= 0 && b < d1_ && c >= 0 && c < d2_);
    return data_[(static_cast<std::size_t>(a) * d1_ + b) * d2_ + c];
  }

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  Tensor3& operator+=(const Tensor3& o) {
    assert(o.size() == size());
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Tensor3& operator-=(const Tensor3& o) {
    assert(o.size() == size());
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Tensor3& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

  friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
  friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
  friend Tensor3 operator*(double s, Tensor3 a) { return a *= s; }

 private:
  int d0_ = 0, d1_ = 0, d2_ = 0;
  std::vector<double> data_;
};

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace potmap
