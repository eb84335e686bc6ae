#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace wavelab {

// Quadrature grid on the ball {|x| <= r_max}, reduced to radii. Nodes are
// cell centers r_i = (i+1/2)*dr and weights are the exact spherical-shell
// volumes, so sum(w) equals (4/3)*pi*r_max^3 to round-off.
struct RadialGrid {
  std::vector<double> r;  // ascending, all > 0
  std::vector<double> w;  // shell volumes
  double dr = 0.0;
  double r_max = 0.0;

  std::size_t size() const { return r.size(); }
  double total_volume() const;
};

RadialGrid make_radial_grid(double r_max, std::size_t n);

// Uniform cube grid on [-L, L]^3, nodes symmetric about the origin.
// count_per_axis is odd so the origin is a node; spacing*(count-1) = 2L.
struct CartesianGrid {
  double h = 0.0;
  double half_width = 0.0;
  std::size_t count_per_axis = 0;
  std::vector<std::array<double, 3>> nodes;  // x fastest, then y, then z

  std::size_t size() const { return nodes.size(); }
  double cell_volume() const { return h * h * h; }
  std::size_t index(std::size_t ix, std::size_t iy, std::size_t iz) const {
    return (iz * count_per_axis + iy) * count_per_axis + ix;
  }
};

CartesianGrid make_cartesian_grid(double half_width, std::size_t count_per_axis);

// Integral of 1/|x| over the unit cube centered at the origin. Used as the
// cell-averaged weight for the Newton-kernel diagonal on cartesian grids:
// integral over a cell of side h is kCubeNewtonIntegral * h^2.
inline constexpr double kCubeNewtonIntegral = 2.3800773639795535;

}  // namespace wavelab
