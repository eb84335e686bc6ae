#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "wavelab/semigroup.hpp"

namespace wavelab::besov {

using semigroup::DiscreteHamiltonian;

// Smooth cutoff psi: 1 on r <= 1, 0 on r >= 2, glued with the canonical
// exp(-1/x) construction. phi_0(r) = psi(r) - psi(2r) is supported in
// [1/2, 2]; phi_j(r) = phi_0(2^{-j} r); the family telescopes to 1.
double smooth_cutoff(double r);

struct DyadicPartition {
  int j_min = 0;
  int j_max = 0;

  double psi(double r) const { return smooth_cutoff(r); }
  double phi(int j, double r) const;
  double phi_tilde(int j, double r) const;  // phi_{j-1} + phi_j + phi_{j+1}
  double psi0(double r) const;              // 1 - sum_{j >= 0} phi_j = psi(2r)
  double partition_sum(double r) const;     // sum over the j range
  std::vector<int> range() const;
};

DyadicPartition build_partition(int j_min, int j_max);

// j range resolvable on a grid: j_max from the spacing, j_min from the size.
DyadicPartition partition_for_grid(double spacing, double r_max);

struct BesovProfile {
  std::vector<std::pair<int, double>> coefficients;  // (j, L1 norm of the block)
  double s = 0.0;
  double q = 1.0;
  bool homogeneous = true;
  double psi0_block = 0.0;   // non-homogeneous low block, if any
  double edge_fraction = 0.0;  // share of the norm carried by the edge blocks
  bool edge_flagged = false;
  int j_min = 0, j_max = 0;

  double norm() const;
};

// Besov norm through the functional-calculus blocks phi_j(sqrt(H)). The free
// case is the same code path with the V = 0 operator on the same grid.
BesovProfile besov_norm(const DiscreteHamiltonian& h, const Eigen::VectorXd& f, double s,
                        double q, const DyadicPartition& part, bool homogeneous = true);

struct EquivalenceScan {
  std::vector<double> thetas;
  // ratios[k][m]: perturbed/free norm for theta k, test function m
  std::vector<std::vector<double>> ratios;
  double c_low = 0.0;
  double c_high = 0.0;
  bool hypothesis_ok = true;
};

// Ratio scan ||f||_{B(V_theta)} / ||f||_{B(0)} over a function set and a
// theta set; hypothesis ||V_-||_K < c_3/2 checked on the grid.
EquivalenceScan equivalence_ratio(const RadialGrid& grid, const potential::PotentialSpec& v,
                                  const std::vector<Eigen::VectorXd>& test_set, double s,
                                  double q, const std::vector<double>& thetas);

struct RescaleCheck {
  double lhs = 0.0;       // ||S_lambda f||_{B(V)}
  double rhs = 0.0;       // lambda^{s-3} ||f||_{B(V_{lambda^{-2}})}
  double residual = 0.0;  // relative gap
  bool resolved = true;
};

// Identity ||f(2^k x)||_{B^s(V)} = 2^{k(s-3)} ||f||_{B^s(V_{2^{-2k}})} checked
// on the grid; the datum is a radial profile so both sides can be sampled.
RescaleCheck rescale_check(const RadialGrid& grid, const potential::PotentialSpec& v,
                           const std::function<double(double)>& radial_datum, double s,
                           double q, int k, const DyadicPartition& part);

}  // namespace wavelab::besov
