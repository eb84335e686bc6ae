#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "wavelab/besov.hpp"
#include "wavelab/grids.hpp"
#include "wavelab/potential.hpp"
#include "wavelab/semigroup.hpp"

namespace wavelab::wave {

using potential::PotentialSpec;
using semigroup::DiscreteHamiltonian;

struct WaveState {
  double t = 0.0;
  Eigen::VectorXd u;          // field on grid nodes
  std::string method;         // "spectral-eigen", "spectral-resolvent", "fdtd"
  bool bound_state_present = false;  // sinh mode in the evolution, decay not expected
};

// u(t) = sum_k sin(t sqrt(mu_k))/sqrt(mu_k) <e_k, f> e_k, with the mu -> 0
// limit t and the sinh continuation for negative modes (flagged).
WaveState evolve_spectral(const DiscreteHamiltonian& h, const Eigen::VectorXd& f, double t);

struct ResolventEvolution {
  WaveState direct;             // quadrature of the spectral-measure form
  WaveState integrated;         // integrated-by-parts form with squared blocks
  double mutual_disagreement = 0.0;  // sup gap between the two forms
};

// (1/2 pi i) int sin(t sqrt(l))/sqrt(l) psi(l) [R_V(l+ie) - R_V(l-ie)] f dl
// and the by-parts variant; psi is a smooth window with support in (0, inf),
// psi_prime its derivative. The kernels carry the free-space continuous
// spectrum, so the integrand is smooth in lambda and composite Gauss panels
// converge fast.
ResolventEvolution evolve_spectral_resolvent(const RadialGrid& grid, const PotentialSpec& v,
                                             const Eigen::VectorXd& f, double t,
                                             const std::function<double(double)>& psi,
                                             const std::function<double(double)>& psi_prime,
                                             double lambda_lo, double lambda_hi, double eps,
                                             std::size_t panels = 48);

struct LocalizedRun {
  int j = 0;
  double t = 0.0;
  double sup_norm = 0.0;
  double block_l1 = 0.0;       // ||phi_j(sqrt H) f||_{L^1}
  double ratio = 0.0;          // t * sup / (2^j * block_l1)
  bool skipped = false;        // under-resolved block
};

LocalizedRun evolve_localized(const DiscreteHamiltonian& h, const besov::DyadicPartition& part,
                              const Eigen::VectorXd& f, int j, double t);

struct FdtdResult {
  std::vector<double> times;
  std::vector<double> sup_norms;
  Eigen::VectorXd final_field;        // on the cartesian grid
  std::vector<double> energy;         // physical energy per sample
  double energy_drift = 0.0;          // max relative drift
  double dt = 0.0;
};

// Leapfrog for u_tt = Lap u - V u, u(0)=0, u_t(0)=f, Dirichlet cube walls.
// Start-up u^1 = dt f + (dt^3/6)(Lap - V) f. Refuses dt > h/sqrt(3).
FdtdResult evolve_fdtd(const CartesianGrid& grid, const PotentialSpec& v,
                       const std::function<double(double)>& radial_datum, double t_final,
                       const std::vector<double>& sample_times, double dt = 0.0);

struct DecayReport {
  std::vector<double> times;
  std::vector<std::vector<double>> sup_norms;  // per datum, per time
  std::vector<double> besov_perturbed;         // ||f||_{B^1_{1,1}(V)} per datum
  std::vector<double> besov_free;
  std::vector<std::vector<double>> ratios;     // t * sup / perturbed norm
  double c_star = 0.0;
  bool bound_state_present = false;
  bool resonance_dip = false;
};

// Dispersive-quotient scan over a datum set: C* = max over data and times of
// t ||u(t)||_inf / ||f||_{B^1_{1,1}(V)}.
DecayReport dispersive_ratio(const RadialGrid& grid, const PotentialSpec& v,
                             const std::vector<Eigen::VectorXd>& data,
                             const std::vector<double>& times);

}  // namespace wavelab::wave
