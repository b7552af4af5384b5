#include "wavelab/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavelab {

Grid::Grid(double x_min, double x_max, std::size_t n)
    : x_min_(x_min), x_max_(x_max), n_(n), dx_(0.0) {
  if (n < 3) throw std::invalid_argument("Grid needs at least 3 nodes");
  if (!(x_min < x_max)) throw std::invalid_argument("Grid needs x_min < x_max");
  dx_ = (x_max - x_min) / static_cast<double>(n - 1);
}

Field::Field(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("Field length does not match grid size");
  }
  if (!all_finite()) throw std::invalid_argument("Field values must be finite");
}

Field::Field(Grid grid, double constant)
    : grid_(grid), values_(grid.size(), constant) {}

double Field::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool Field::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Field& Field::operator+=(const Field& other) {
  if (!(grid_ == other.grid_)) throw std::invalid_argument("Field grids differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  if (!(grid_ == other.grid_)) throw std::invalid_argument("Field grids differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

}  // namespace wavelab
