#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "wavelab/grids.hpp"
#include "wavelab/potential.hpp"

namespace wavelab::semigroup {

using potential::PotentialSpec;

// H = -Laplacian + V discretized with a Dirichlet wall. The radial variant is
// the s-wave finite-volume operator on f(r) (fluxes through shell faces), so
// it is exactly symmetric in the pairing sum(w_i f_i g_i) with the grid's
// shell volumes. The eigendecomposition is computed once and cached.
class DiscreteHamiltonian {
 public:
  static DiscreteHamiltonian radial(const RadialGrid& grid, const PotentialSpec& v);
  static DiscreteHamiltonian cartesian(const CartesianGrid& grid, const PotentialSpec& v);

  std::size_t size() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& radii() const { return radii_; }  // empty for cartesian
  double wall_radius() const { return wall_radius_; }

  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  double min_eigenvalue() const { return eigenvalues_(0); }
  bool selfadjoint_warning() const { return selfadjoint_warning_; }

  // phi(H) f with phi applied to the spectrum; f and the result are node values.
  Eigen::VectorXd apply(const std::function<double(double)>& phi,
                        const Eigen::VectorXd& f) const;
  // Matrix of phi(H) acting on node values.
  Eigen::MatrixXd action_matrix(const std::function<double(double)>& phi) const;
  // Kernel values k(x_i, y_j) of phi(H): action = kernel * diag(w).
  Eigen::MatrixXd kernel_matrix(const std::function<double(double)>& phi) const;
  // H itself on node values (no spectral truncation).
  const Eigen::MatrixXd& hamiltonian_matrix() const { return h_action_; }

  double discrete_l1(const Eigen::VectorXd& f) const;
  double l1_to_l1_norm(const Eigen::MatrixXd& action) const;

 private:
  DiscreteHamiltonian() = default;
  void decompose(const Eigen::MatrixXd& sym);

  std::vector<double> weights_;
  std::vector<double> radii_;
  double wall_radius_ = 0.0;
  bool selfadjoint_warning_ = false;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd modes_;     // columns: eigenvectors in the symmetrized frame
  Eigen::VectorXd sqrt_w_;
  Eigen::MatrixXd h_action_;
};

Eigen::VectorXd heat_apply(const DiscreteHamiltonian& h, double t, const Eigen::VectorXd& f);
Eigen::MatrixXd heat_kernel(const DiscreteHamiltonian& h, double t);

struct HeatKernelCheck {
  double t = 0.0;
  double vminus_kato = 0.0;
  double bound_constant = 0.0;   // (2 pi t)^{-3/2} / (1 - 2||V_-||_K / c_3)
  double gaussian_width = 0.0;   // 8 t
  double max_violation = 0.0;    // over interior node pairs
  double interior_radius = 0.0;
  bool skipped = false;          // hypothesis ||V_-||_K < c_3/2 violated
  bool pass = false;
};

// Pointwise comparison of the heat kernel against the Gaussian bound, on
// node pairs with both radii inside wall_radius - 3*sqrt(2t). The radial
// kernel is compared against the spherical mean of the bound.
HeatKernelCheck kernel_bound_check(const DiscreteHamiltonian& h, const PotentialSpec& v,
                                   double t, double boundary_tol = 1e-9);

struct LpLqCheck {
  int p = 1, q = 1;
  double t = 0.0;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

// Discrete L^p -> L^q norm of e^{-tH} against (2 pi t)^{-gamma} /
// (1 - ||V_-||_K/c_3)^2, gamma = (3/2)(1/p - 1/q); (p,q) in
// {(1,inf),(2,2),(1,2),(2,inf)} with q = 0 meaning infinity.
LpLqCheck lplq_check(const DiscreteHamiltonian& h, const PotentialSpec& v, double t,
                     int p, int q);

struct PathEnsemble {
  std::size_t count = 100000;
  double dt = 0.0;          // 0 selects t/200
  std::uint64_t seed = 1234;
  double variance_rate = 2.0;  // per-coordinate increment variance per unit time
};

struct McResult {
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::size_t paths = 0;
  bool tolerance_flagged = false;
};

// Monte-Carlo average of exp(-int_0^t V(b(s)) ds) * f(b(t)) over Brownian
// paths from x; f == nullptr means f == 1. Increments have variance
// variance_rate * dt per coordinate (2.0 matches e^{t Laplacian}).
McResult feynman_kac_mc(const PotentialSpec& v, const std::array<double, 3>& x, double t,
                        const PathEnsemble& ensemble,
                        const std::function<double(double)>* radial_datum = nullptr,
                        double stderr_tol = 0.0);

struct KhasminskiiCheck {
  std::vector<double> probes;
  std::vector<double> q_quadrature;   // int Q_t(x-y) V_-(y) dy per probe
  std::vector<double> q_mc;           // MC estimate of E_x int_0^t V_-(b) ds
  std::vector<double> q_mc_stderr;
  double alpha = 0.0;                 // sup of the quadrature values
  double alpha_bound = 0.0;           // ||V_-||_K / c_3
  std::vector<double> exp_mc;         // MC estimate of E_x exp(int_0^t V_-)
  std::vector<double> exp_mc_stderr;
  double exp_bound = 0.0;             // 1 / (1 - alpha_bound)
  bool applicable = true;             // alpha_bound < 1
  bool identity_ok = false;           // MC matches quadrature within 3 stderr
  bool bound_ok = false;              // exp moments below the bound
};

// Verifies the occupation-time identity and the exponential-moment bound for
// the negative part, in the standard Brownian convention (variance dt).
KhasminskiiCheck qt_and_khasminskii(const PotentialSpec& vminus, double t,
                                    const std::vector<double>& probe_radii,
                                    const RadialGrid& grid, const PathEnsemble& ensemble);

// Q_t(rho) = int_0^t (2 pi s)^{-3/2} e^{-rho^2/(2s)} ds = erfc(rho/sqrt(2t))/(2 pi rho).
double occupation_kernel(double rho, double t);

// g(theta H) as a matrix on node values.
Eigen::MatrixXd functional_calculus(const DiscreteHamiltonian& h,
                                    const std::function<double(double)>& g, double theta);

// Discrete L1 -> L1 norm of phi(sqrt(H_a)) psi(sqrt(H_b)).
double cross_block_norm(const DiscreteHamiltonian& ha, const DiscreteHamiltonian& hb,
                        const std::function<double(double)>& phi,
                        const std::function<double(double)>& psi);

}  // namespace wavelab::semigroup
