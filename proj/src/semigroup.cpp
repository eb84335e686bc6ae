#include "wavelab/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "wavelab/kato.hpp"

namespace wavelab::semigroup {

void DiscreteHamiltonian::decompose(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  eigenvalues_ = es.eigenvalues();
  modes_ = es.eigenvectors();
}

DiscreteHamiltonian DiscreteHamiltonian::radial(const RadialGrid& grid, const PotentialSpec& v) {
  DiscreteHamiltonian h;
  const std::size_t n = grid.size();
  h.weights_ = grid.w;
  h.radii_ = grid.r;
  h.wall_radius_ = grid.r_max;
  h.sqrt_w_ = Eigen::VectorXd(n);
  for (std::size_t i = 0; i < n; ++i) h.sqrt_w_(i) = std::sqrt(grid.w[i]);

  const double vminus = potential::kato_norm(v.negated_negative_part(), grid);
  h.selfadjoint_warning_ = vminus >= potential::selfadjoint_threshold();

  // Finite-volume fluxes through the shell faces r = (i+1) dr; the face at
  // r = 0 carries no flux (s-wave regularity), the outer face is a Dirichlet
  // wall (ghost value 0).
  Eigen::MatrixXd action = Eigen::MatrixXd::Zero(n, n);
  const double dr = grid.dr;
  for (std::size_t i = 0; i < n; ++i) {
    const double face_lo = 4.0 * M_PI * std::pow(static_cast<double>(i) * dr, 2) / dr;
    const double face_hi = 4.0 * M_PI * std::pow(static_cast<double>(i + 1) * dr, 2) / dr;
    double diag = (face_lo + face_hi) / grid.w[i];
    if (i > 0) action(i, i - 1) = -face_lo / grid.w[i];
    if (i + 1 < n) action(i, i + 1) = -face_hi / grid.w[i];
    action(i, i) = diag + v.eval_radius(grid.r[i]);
  }
  h.h_action_ = action;

  Eigen::MatrixXd sym = action;
  for (std::size_t i = 0; i < n; ++i) sym.row(i) *= h.sqrt_w_(i);
  for (std::size_t j = 0; j < n; ++j) sym.col(j) /= h.sqrt_w_(j);
  sym = 0.5 * (sym + sym.transpose().eval());  // kill round-off asymmetry
  h.decompose(sym);
  return h;
}

DiscreteHamiltonian DiscreteHamiltonian::cartesian(const CartesianGrid& grid,
                                                   const PotentialSpec& v) {
  const std::size_t n = grid.size();
  if (n > 6000)
    throw std::invalid_argument("cartesian eigendecomposition capped at 6000 nodes");
  DiscreteHamiltonian h;
  h.weights_.assign(n, grid.cell_volume());
  h.wall_radius_ = grid.half_width;
  h.sqrt_w_ = Eigen::VectorXd::Constant(n, std::sqrt(grid.cell_volume()));

  Eigen::MatrixXd action = Eigen::MatrixXd::Zero(n, n);
  const double inv_h2 = 1.0 / (grid.h * grid.h);
  const std::size_t c = grid.count_per_axis;
  for (std::size_t iz = 0; iz < c; ++iz)
    for (std::size_t iy = 0; iy < c; ++iy)
      for (std::size_t ix = 0; ix < c; ++ix) {
        const std::size_t i = grid.index(ix, iy, iz);
        const auto& p = grid.nodes[i];
        action(i, i) = 6.0 * inv_h2 +
                       v.eval_radius(std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]));
        auto couple = [&](std::size_t j) { action(i, j) = -inv_h2; };
        if (ix > 0) couple(grid.index(ix - 1, iy, iz));
        if (ix + 1 < c) couple(grid.index(ix + 1, iy, iz));
        if (iy > 0) couple(grid.index(ix, iy - 1, iz));
        if (iy + 1 < c) couple(grid.index(ix, iy + 1, iz));
        if (iz > 0) couple(grid.index(ix, iy, iz - 1));
        if (iz + 1 < c) couple(grid.index(ix, iy, iz + 1));
      }
  h.h_action_ = action;
  h.decompose(action);  // uniform weights: already symmetric
  return h;
}

Eigen::VectorXd DiscreteHamiltonian::apply(const std::function<double(double)>& phi,
                                           const Eigen::VectorXd& f) const {
  const Eigen::VectorXd coeffs = modes_.transpose() * (sqrt_w_.cwiseProduct(f));
  Eigen::VectorXd scaled(coeffs.size());
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) scaled(k) = phi(eigenvalues_(k)) * coeffs(k);
  return (modes_ * scaled).cwiseQuotient(sqrt_w_);
}

Eigen::MatrixXd DiscreteHamiltonian::action_matrix(const std::function<double(double)>& phi) const {
  Eigen::VectorXd d(eigenvalues_.size());
  for (Eigen::Index k = 0; k < d.size(); ++k) d(k) = phi(eigenvalues_(k));
  Eigen::MatrixXd m = modes_ * d.asDiagonal() * modes_.transpose();
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) /= sqrt_w_(i);
  for (Eigen::Index j = 0; j < m.cols(); ++j) m.col(j) *= sqrt_w_(j);
  return m;
}

Eigen::MatrixXd DiscreteHamiltonian::kernel_matrix(const std::function<double(double)>& phi) const {
  Eigen::MatrixXd m = action_matrix(phi);
  for (Eigen::Index j = 0; j < m.cols(); ++j) m.col(j) /= weights_[j];
  return m;
}

double DiscreteHamiltonian::discrete_l1(const Eigen::VectorXd& f) const {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) acc += weights_[i] * std::abs(f(i));
  return acc;
}

double DiscreteHamiltonian::l1_to_l1_norm(const Eigen::MatrixXd& action) const {
  double best = 0.0;
  for (Eigen::Index j = 0; j < action.cols(); ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < action.rows(); ++i)
      acc += weights_[i] * std::abs(action(i, j));
    best = std::max(best, acc / weights_[j]);
  }
  return best;
}

Eigen::VectorXd heat_apply(const DiscreteHamiltonian& h, double t, const Eigen::VectorXd& f) {
  if (t < 0.0) throw std::invalid_argument("heat flow needs t >= 0");
  return h.apply([t](double mu) { return std::exp(-t * mu); }, f);
}

Eigen::MatrixXd heat_kernel(const DiscreteHamiltonian& h, double t) {
  if (t <= 0.0) throw std::invalid_argument("heat kernel needs t > 0");
  return h.kernel_matrix([t](double mu) { return std::exp(-t * mu); });
}

namespace {

// Spherical mean of e^{-rho^2/width} between radii r and s:
// (2 r s)^{-1} int_{|r-s|}^{r+s} e^{-rho^2/width} rho d rho.
double gaussian_angular_mean(double r, double s, double width) {
  const double u = r + s, l = std::abs(r - s);
  if (r == 0.0 || s == 0.0) {
    const double hi = std::max(r, s);
    return std::exp(-hi * hi / width);
  }
  return 0.5 * width * (std::exp(-l * l / width) - std::exp(-u * u / width)) / (2.0 * r * s);
}

}  // namespace

HeatKernelCheck kernel_bound_check(const DiscreteHamiltonian& h, const PotentialSpec& v,
                                   double t, double boundary_tol) {
  HeatKernelCheck chk;
  chk.t = t;
  if (h.radii().empty())
    throw std::invalid_argument("kernel bound check is implemented for radial operators");
  const RadialGrid grid = make_radial_grid(h.wall_radius(), h.size());
  chk.vminus_kato = potential::kato_norm(v.negated_negative_part(), grid);
  const double c3 = potential::kato_coupling_constant();
  if (chk.vminus_kato >= 0.5 * c3) {
    chk.skipped = true;
    return chk;
  }
  chk.bound_constant = std::pow(2.0 * M_PI * t, -1.5) / (1.0 - 2.0 * chk.vminus_kato / c3);
  chk.gaussian_width = 8.0 * t;
  chk.interior_radius = h.wall_radius() - 3.0 * std::sqrt(2.0 * t);

  const Eigen::MatrixXd kern = heat_kernel(h, t);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (h.radii()[i] > chk.interior_radius) continue;
    for (std::size_t j = 0; j < h.size(); ++j) {
      if (h.radii()[j] > chk.interior_radius) continue;
      const double bound = chk.bound_constant *
                           gaussian_angular_mean(h.radii()[i], h.radii()[j], chk.gaussian_width);
      worst = std::max(worst, kern(i, j) - bound);
    }
  }
  chk.max_violation = worst;
  chk.pass = worst <= boundary_tol * chk.bound_constant;
  return chk;
}

LpLqCheck lplq_check(const DiscreteHamiltonian& h, const PotentialSpec& v, double t,
                     int p, int q) {
  LpLqCheck chk;
  chk.p = p;
  chk.q = q;
  chk.t = t;
  const RadialGrid grid = make_radial_grid(h.wall_radius(), h.size());
  const double vminus = potential::kato_norm(v.negated_negative_part(), grid);
  const double c3 = potential::kato_coupling_constant();
  const double qq = q == 0 ? std::numeric_limits<double>::infinity() : q;
  const double gamma = 1.5 * (1.0 / p - 1.0 / qq);
  chk.bound = std::pow(2.0 * M_PI * t, -gamma) / std::pow(1.0 - vminus / c3, 2);

  if (p == 2 && q == 2) {
    chk.measured = std::exp(-t * h.min_eigenvalue());
  } else {
    const Eigen::MatrixXd kern = heat_kernel(h, t);
    if (p == 1 && q == 0) {
      chk.measured = kern.cwiseAbs().maxCoeff();
    } else if (p == 1 && q == 2) {
      double best = 0.0;
      for (std::size_t j = 0; j < h.size(); ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i)
          acc += h.weights()[i] * kern(i, j) * kern(i, j);
        best = std::max(best, std::sqrt(acc));
      }
      chk.measured = best;
    } else if (p == 2 && q == 0) {
      double best = 0.0;
      for (std::size_t i = 0; i < h.size(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < h.size(); ++j)
          acc += h.weights()[j] * kern(i, j) * kern(i, j);
        best = std::max(best, std::sqrt(acc));
      }
      chk.measured = best;
    } else {
      throw std::invalid_argument("unsupported (p, q) pair");
    }
  }
  chk.pass = chk.measured <= chk.bound * (1.0 + 1e-9);
  return chk;
}

namespace {

struct PathAccumulator {
  double sum = 0.0;
  double sumsq = 0.0;
  std::size_t n = 0;
  void add(double x) {
    sum += x;
    sumsq += x * x;
    ++n;
  }
};

// One reproducible chunk of paths; chunking fixes the reduction order no
// matter how the work is scheduled.
template <typename Weight>
PathAccumulator run_chunk(const PotentialSpec& v, const std::array<double, 3>& x0, double t,
                          double dt, double sigma, std::uint64_t seed, std::size_t paths,
                          Weight&& weight) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t steps = static_cast<std::size_t>(std::ceil(t / dt));
  const double step_dt = t / static_cast<double>(steps);
  const double step_sigma = sigma * std::sqrt(step_dt);
  PathAccumulator acc;
  for (std::size_t p = 0; p < paths; ++p) {
    std::array<double, 3> b = x0;
    double prev = v.eval_radius(std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]));
    double integral = 0.0;
    for (std::size_t s = 0; s < steps; ++s) {
      b[0] += step_sigma * gauss(rng);
      b[1] += step_sigma * gauss(rng);
      b[2] += step_sigma * gauss(rng);
      const double cur = v.eval_radius(std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]));
      integral += 0.5 * (prev + cur) * step_dt;
      prev = cur;
    }
    acc.add(weight(integral, b));
  }
  return acc;
}

}  // namespace

McResult feynman_kac_mc(const PotentialSpec& v, const std::array<double, 3>& x, double t,
                        const PathEnsemble& ensemble,
                        const std::function<double(double)>* radial_datum,
                        double stderr_tol) {
  const double dt = ensemble.dt > 0.0 ? ensemble.dt : t / 200.0;
  const double sigma = std::sqrt(ensemble.variance_rate);
  const std::size_t chunk = 4096;
  PathAccumulator total;
  std::size_t done = 0;
  std::uint64_t block = 0;
  while (done < ensemble.count) {
    const std::size_t m = std::min(chunk, ensemble.count - done);
    const std::uint64_t seed = ensemble.seed + 0x9e3779b97f4a7c15ull * (block + 1);
    auto acc = run_chunk(v, x, t, dt, sigma, seed, m,
                         [&](double integral, const std::array<double, 3>& b) {
                           double w = std::exp(-integral);
                           if (radial_datum) {
                             const double r =
                                 std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
                             w *= (*radial_datum)(r);
                           }
                           return w;
                         });
    total.sum += acc.sum;
    total.sumsq += acc.sumsq;
    total.n += acc.n;
    done += m;
    ++block;
  }
  McResult res;
  res.paths = total.n;
  res.estimate = total.sum / static_cast<double>(total.n);
  const double var =
      std::max(0.0, total.sumsq / static_cast<double>(total.n) - res.estimate * res.estimate);
  res.stderr_ = std::sqrt(var / static_cast<double>(total.n));
  res.tolerance_flagged = stderr_tol > 0.0 && res.stderr_ > stderr_tol;
  return res;
}

double occupation_kernel(double rho, double t) {
  if (rho <= 0.0) throw std::invalid_argument("occupation kernel needs rho > 0");
  return std::erfc(rho / std::sqrt(2.0 * t)) / (2.0 * M_PI * rho);
}

namespace {

// int erfc(u) du antiderivative.
double erfc_antiderivative(double u) {
  return u * std::erfc(u) - std::exp(-u * u) / std::sqrt(M_PI);
}

// Spherical mean of Q_t(rho) between radii a and s:
// (1/(4 pi a s)) int_{|a-s|}^{a+s} erfc(rho/sqrt(2t)) d rho.
double occupation_mean(double a, double s, double t) {
  const double c = std::sqrt(2.0 * t);
  if (a == 0.0) return occupation_kernel(s, t);
  const double u = a + s, l = std::abs(a - s);
  const double integral = c * (erfc_antiderivative(u / c) - erfc_antiderivative(l / c));
  return integral / (4.0 * M_PI * a * s);
}

}  // namespace

KhasminskiiCheck qt_and_khasminskii(const PotentialSpec& vminus, double t,
                                    const std::vector<double>& probe_radii,
                                    const RadialGrid& grid, const PathEnsemble& ensemble) {
  KhasminskiiCheck chk;
  chk.probes = probe_radii;
  const double c3 = potential::kato_coupling_constant();
  const double kato = potential::kato_norm(vminus, grid);
  chk.alpha_bound = kato / c3;
  chk.applicable = chk.alpha_bound < 1.0;

  PathEnsemble standard = ensemble;
  standard.variance_rate = 1.0;  // occupation identity is stated for standard BM
  const double dt = standard.dt > 0.0 ? standard.dt : t / 200.0;

  bool identity_ok = true;
  bool bound_ok = true;
  for (double a : probe_radii) {
    double pred = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double vv = vminus.eval_radius(grid.r[j]);
      if (vv != 0.0) pred += vv * grid.w[j] * occupation_mean(a, grid.r[j], t);
    }
    chk.q_quadrature.push_back(pred);
    chk.alpha = std::max(chk.alpha, pred);

    // MC of the occupation integral and of the exponential moment from the
    // same ensemble parameters.
    const std::array<double, 3> x0{a, 0.0, 0.0};
    const std::size_t chunk = 4096;
    PathAccumulator occ, expm;
    std::size_t done = 0;
    std::uint64_t block = 0;
    while (done < standard.count) {
      const std::size_t m = std::min(chunk, standard.count - done);
      const std::uint64_t seed = standard.seed + 0x9e3779b97f4a7c15ull * (block + 1);
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> gauss(0.0, 1.0);
      const std::size_t steps = static_cast<std::size_t>(std::ceil(t / dt));
      const double step_dt = t / static_cast<double>(steps);
      const double step_sigma = std::sqrt(step_dt);
      for (std::size_t p = 0; p < m; ++p) {
        std::array<double, 3> b = x0;
        double prev = vminus.eval_radius(std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]));
        double integral = 0.0;
        for (std::size_t s = 0; s < steps; ++s) {
          b[0] += step_sigma * gauss(rng);
          b[1] += step_sigma * gauss(rng);
          b[2] += step_sigma * gauss(rng);
          const double cur =
              vminus.eval_radius(std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]));
          integral += 0.5 * (prev + cur) * step_dt;
          prev = cur;
        }
        occ.add(integral);
        expm.add(std::exp(integral));
      }
      done += m;
      ++block;
    }
    const double nn = static_cast<double>(occ.n);
    const double occ_mean = occ.sum / nn;
    const double occ_se =
        std::sqrt(std::max(0.0, occ.sumsq / nn - occ_mean * occ_mean) / nn);
    const double exp_mean = expm.sum / nn;
    const double exp_se =
        std::sqrt(std::max(0.0, expm.sumsq / nn - exp_mean * exp_mean) / nn);
    chk.q_mc.push_back(occ_mean);
    chk.q_mc_stderr.push_back(occ_se);
    chk.exp_mc.push_back(exp_mean);
    chk.exp_mc_stderr.push_back(exp_se);

    // time-discretization slack scales with dt
    if (std::abs(occ_mean - pred) > 3.0 * occ_se + 10.0 * dt * std::abs(pred) + 1e-4)
      identity_ok = false;
  }
  chk.exp_bound = chk.applicable ? 1.0 / (1.0 - chk.alpha_bound) : 0.0;
  if (chk.applicable) {
    for (std::size_t i = 0; i < chk.exp_mc.size(); ++i)
      if (chk.exp_mc[i] > chk.exp_bound + 3.0 * chk.exp_mc_stderr[i]) bound_ok = false;
  } else {
    bound_ok = false;
  }
  chk.identity_ok = identity_ok;
  chk.bound_ok = bound_ok;
  return chk;
}

Eigen::MatrixXd functional_calculus(const DiscreteHamiltonian& h,
                                    const std::function<double(double)>& g, double theta) {
  return h.action_matrix([&](double mu) { return g(theta * mu); });
}

double cross_block_norm(const DiscreteHamiltonian& ha, const DiscreteHamiltonian& hb,
                        const std::function<double(double)>& phi,
                        const std::function<double(double)>& psi) {
  if (ha.size() != hb.size())
    throw std::invalid_argument("cross-block norm needs operators on the same grid");
  const Eigen::MatrixXd left = ha.action_matrix([&](double mu) {
    return phi(std::sqrt(std::max(0.0, mu)));
  });
  const Eigen::MatrixXd right = hb.action_matrix([&](double mu) {
    return psi(std::sqrt(std::max(0.0, mu)));
  });
  return ha.l1_to_l1_norm(left * right);
}

}  // namespace wavelab::semigroup
