#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace wavelab {

/// Uniform mesh x_i = x_min + i dx, i = 0..n-1, truncating the real line.
class Grid {
 public:
  Grid(double x_min, double x_max, std::size_t n);

  static Grid symmetric(double half_width, std::size_t n) {
    return Grid(-half_width, half_width, n);
  }

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t size() const noexcept { return n_; }
  double dx() const noexcept { return dx_; }
  double x(std::size_t i) const noexcept { return x_min_ + static_cast<double>(i) * dx_; }

  /// Same extent with 2n - 1 nodes, so dx is exactly halved.
  Grid refined() const { return Grid(x_min_, x_max_, 2 * n_ - 1); }

  bool operator==(const Grid& other) const noexcept {
    return x_min_ == other.x_min_ && x_max_ == other.x_max_ && n_ == other.n_;
  }

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double dx_;
};

/// Real values sampled on a Grid. All entries must be finite.
class Field {
 public:
  Field(Grid grid, std::vector<double> values);
  explicit Field(Grid grid, double constant = 0.0);

  template <class F>
  static Field sample(const Grid& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.x(i));
    return Field(grid, std::move(v));
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  const std::vector<double>& data() const noexcept { return values_; }

  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  double front() const noexcept { return values_.front(); }
  double back() const noexcept { return values_.back(); }
  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s) noexcept;

  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator*(double s, Field a) { return a *= s; }

  bool operator==(const Field& other) const noexcept {
    return grid_ == other.grid_ && values_ == other.values_;
  }

 private:
  Grid grid_;
  std::vector<double> values_;
};

}  // namespace wavelab
