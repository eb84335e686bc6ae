#pragma once

#include <utility>
#include <vector>

#include "wavelab/grids.hpp"
#include "wavelab/potential.hpp"

namespace wavelab::potential {

// Threshold constants of the hypothesis set, n = 3 throughout.
// c_n = 2 pi^{n/2} / Gamma(n/2 - 1); the self-adjointness threshold is 2*c_n.
double kato_coupling_constant(int n = 3);          // c_3 = 2*pi
double selfadjoint_threshold(int n = 3);           // 4*pi

struct KatoReport {
  double kato_norm = 0.0;
  std::vector<std::pair<double, double>> modulus_samples;  // (r, eta(r))
  bool class_verdict = false;
  bool converged = true;        // refinement-stability of the quadrature
  double refinement_delta = 0.0;
  double tail_bound = 0.0;      // contribution beyond the grid, estimated
};

struct HypothesisReport {
  double split_radius = 0.0;
  double v_kato = 0.0;        // ||V||_K
  double v1_kato = 0.0;       // ||V1||_K, V1 = V restricted to |x| < R
  double v2_kato = 0.0;       // ||V2||_K
  double vminus_kato = 0.0;   // ||V_-||_K

  bool selfadjoint_ok = false;    // ||V_-||_K < 4 pi
  double selfadjoint_margin = 0.0;
  bool compact_part_ok = false;   // V1 compactly supported, finite Kato norm
  double smallness_value = 0.0;   // ||V2||_K (1 + ||V1||_K / 4pi)
  bool smallness_ok = false;      // smallness_value < 4 pi
  bool negative_part_ok = false;  // ||V_-||_K < 2 pi
  double negative_part_margin = 0.0;
  bool decay_shape_a = false;     // declared decay exponent > 2
  bool decay_shape_b = false;     // declared decay exponent > 1
  bool heat_semigroup_ok = false; // ||V_-||_K < c_3
  bool heat_kernel_ok = false;    // ||V_-||_K < c_3 / 2
};

// sup over probes of int |V(y)| / |x-y| dy. For radial V the probe set is
// the grid radii plus the origin; cartesian probes are all nodes plus the
// origin. Values are quadrature under-estimates refined with the grid.
double kato_norm(const PotentialSpec& v, const RadialGrid& grid);
double kato_norm(const PotentialSpec& v, const CartesianGrid& grid);

// eta(r) = sup_x int_{|x-y|<r} |V(y)|/|x-y| dy for each requested radius.
std::vector<std::pair<double, double>> kato_modulus(const PotentialSpec& v,
                                                    const RadialGrid& grid,
                                                    const std::vector<double>& radii);
std::vector<std::pair<double, double>> kato_modulus(const PotentialSpec& v,
                                                    const CartesianGrid& grid,
                                                    const std::vector<double>& radii);

// Full report: norm, modulus profile, class verdict, refinement check and
// tail bound. class_tol bounds eta(radii.front()) for a pass.
KatoReport kato_report(const PotentialSpec& v, const RadialGrid& grid,
                       const std::vector<double>& radii, double class_tol);

// Lorentz L^{3/2,1} norm, fixed convention int_0^inf mu{|V|>s}^{2/3} ds,
// by layer-cake over the grid cells. tail_flagged/tail_bound report the
// truncation control for unbounded supports.
struct LorentzResult {
  double value = 0.0;
  double tail_bound = 0.0;
  bool tail_flagged = false;
};
LorentzResult lorentz_321_norm(const PotentialSpec& v, const RadialGrid& grid,
                               double tail_tol = 1e-3);

// V1 = V restricted to {|x| < R}, V2 = remainder; V1 + V2 == V pointwise.
std::pair<PotentialSpec, PotentialSpec> split_potential(const PotentialSpec& v, double R);

HypothesisReport check_hypotheses(const PotentialSpec& v, double split_radius,
                                  const RadialGrid& grid);

// Kato distance ||V*rho_eps - V||_K measured on the grid.
double mollify_distance(const PotentialSpec& v, double eps, const RadialGrid& grid);

}  // namespace wavelab::potential
