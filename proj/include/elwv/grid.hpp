#pragma once

#include <cstddef>

namespace elwv {

// Uniform nodes including both endpoints; halving the spacing nests grids.
struct Grid1D {
  double x_min = 0.0;
  double x_max = 1.0;
  std::size_t n = 2;

  double spacing() const { return (x_max - x_min) / static_cast<double>(n - 1); }
  double x(std::size_t i) const { return x_min + spacing() * static_cast<double>(i); }
  void validate() const;

  // Smallest grid starting at lo with spacing <= dx that reaches hi.
  static Grid1D covering(double lo, double hi, double dx);
};

}  // namespace elwv
