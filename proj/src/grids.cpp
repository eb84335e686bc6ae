#include "wavelab/grids.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wavelab {

double RadialGrid::total_volume() const {
  return std::accumulate(w.begin(), w.end(), 0.0);
}

RadialGrid make_radial_grid(double r_max, std::size_t n) {
  if (r_max <= 0.0 || n == 0) throw std::invalid_argument("radial grid needs r_max > 0 and n > 0");
  RadialGrid g;
  g.dr = r_max / static_cast<double>(n);
  g.r_max = r_max;
  g.r.resize(n);
  g.w.resize(n);
  const double c = 4.0 * M_PI / 3.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = static_cast<double>(i) * g.dr;
    const double hi = lo + g.dr;
    g.r[i] = 0.5 * (lo + hi);
    g.w[i] = c * (hi * hi * hi - lo * lo * lo);
  }
  return g;
}

CartesianGrid make_cartesian_grid(double half_width, std::size_t count_per_axis) {
  if (half_width <= 0.0) throw std::invalid_argument("cartesian grid needs half_width > 0");
  if (count_per_axis < 3 || count_per_axis % 2 == 0)
    throw std::invalid_argument("cartesian grid needs an odd count_per_axis >= 3");
  CartesianGrid g;
  g.half_width = half_width;
  g.count_per_axis = count_per_axis;
  g.h = 2.0 * half_width / static_cast<double>(count_per_axis - 1);
  g.nodes.reserve(count_per_axis * count_per_axis * count_per_axis);
  for (std::size_t iz = 0; iz < count_per_axis; ++iz)
    for (std::size_t iy = 0; iy < count_per_axis; ++iy)
      for (std::size_t ix = 0; ix < count_per_axis; ++ix)
        g.nodes.push_back({-half_width + g.h * static_cast<double>(ix),
                           -half_width + g.h * static_cast<double>(iy),
                           -half_width + g.h * static_cast<double>(iz)});
  return g;
}

}  // namespace wavelab
