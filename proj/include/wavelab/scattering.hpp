#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wavelab/grids.hpp"
#include "wavelab/kernel_operator.hpp"
#include "wavelab/potential.hpp"

namespace wavelab::scattering {

using potential::PotentialSpec;

struct InversionCertificate {
  SpectralPoint point;
  // which argument closes the inversion: "neumann" (||R0 V|| < 1),
  // "squared-neumann" (||(R0 V)^2|| < 1), else "fredholm"
  std::string route;
  bool neumann_applicable = false;  // ||R0 V|| < 1 in the sup norm
  double r0v_norm = 0.0;
  double squared_norm = 0.0;        // ||(R0 V)^2||
  double sigma_min = 0.0;           // smallest singular value of I + R0 V
  double condition = 1.0;           // sigma_max / sigma_min
  double inverse_norm = 0.0;        // measured ||(I + R0 V)^{-1}|| sup-to-sup
  bool near_singular = false;
};

struct Inversion {
  KernelOperator inverse;  // entries of (I + R0 V)^{-1}, plain matrix
  InversionCertificate certificate;
};

// Dense solve of (I + R0(z)V) X = I with a certificate recording which
// route (Neumann, squared Neumann, or plain Fredholm solve) applies.
Inversion invert(const RadialGrid& grid, const PotentialSpec& v, const SpectralPoint& z,
                 double tau = 1e-8);

struct ResonanceDip {
  double lambda = 0.0;
  double sigma = 0.0;
};

struct ResonanceScan {
  std::vector<double> lambdas;
  std::vector<double> sigma_min;
  std::vector<double> condition;
  std::vector<double> neumann_norm;  // ||R0 V|| per lambda
  std::vector<ResonanceDip> dips;
  double tau = 0.0;
  bool truncated = false;    // lambda range clipped to the resolution cap
  double lambda_cap = 0.0;
};

// sigma_min(I + R0(lambda + i0)V) over an ascending lambda grid including 0;
// dips below tau = 1e-3 * median are refined by golden-section search.
ResonanceScan resonance_scan(const RadialGrid& grid, const PotentialSpec& v,
                             const std::vector<double>& lambdas);

// R_V(z) = (I + R0 V)^{-1} R0(z); checks agreement with R0(z)(I + V R0)^{-1}.
struct PerturbedResolvent {
  KernelOperator op;
  double route_disagreement = 0.0;  // max entry gap between the two routes
  bool near_singular = false;
};
PerturbedResolvent perturbed_resolvent(const RadialGrid& grid, const PotentialSpec& v,
                                       const SpectralPoint& z);

// (I + R0(l-ie)V)^{-1} [R0(l+ie) - R0(l-ie)] (I + V R0(l+ie))^{-1}.
KernelOperator spectral_measure_perturbed(const RadialGrid& grid, const PotentialSpec& v,
                                          double lambda, double eps);

// (I + R0 V)^{-1} R0^2 (I + V R0)^{-1}; needs (lambda, eps) != (0, 0).
KernelOperator perturbed_resolvent_squared(const RadialGrid& grid, const PotentialSpec& v,
                                           double lambda, double eps, int branch);

struct PerturbationBudget {
  double c0 = 0.0;        // max inverse norm over the lambda range
  double budget = 0.0;    // 4 pi / c0
  double lambda_cap = 0.0;
  bool resonance_obstruction = false;
};

// Case-B budget eps(V1) = 4 pi / C0 with C0 the measured sup of
// ||(I + R0(lambda + i0) V1)^{-1}|| over [0, lambda_cap]. lambda_cap <= 0
// selects the default: the point where ||(R0 V1)^2|| drops below 1/2.
PerturbationBudget perturbation_budget(const RadialGrid& grid, const PotentialSpec& v1,
                                       double lambda_cap = -1.0, std::size_t scan_points = 33);

}  // namespace wavelab::scattering
