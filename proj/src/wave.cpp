#include "wavelab/wave.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wavelab/resolvent.hpp"
#include "wavelab/scattering.hpp"

namespace wavelab::wave {

namespace {

double wave_multiplier(double mu, double t) {
  if (mu > 0.0) {
    const double root = std::sqrt(mu);
    return std::sin(t * root) / root;
  }
  if (mu == 0.0) return t;
  const double root = std::sqrt(-mu);  // sinh continuation for bound states
  return std::sinh(t * root) / root;
}

}  // namespace

WaveState evolve_spectral(const DiscreteHamiltonian& h, const Eigen::VectorXd& f, double t) {
  WaveState st;
  st.t = t;
  st.method = "spectral-eigen";
  st.bound_state_present = h.min_eigenvalue() < -1e-10;
  st.u = h.apply([t](double mu) { return wave_multiplier(mu, t); }, f);
  return st;
}

ResolventEvolution evolve_spectral_resolvent(const RadialGrid& grid, const PotentialSpec& v,
                                             const Eigen::VectorXd& f, double t,
                                             const std::function<double(double)>& psi,
                                             const std::function<double(double)>& psi_prime,
                                             double lambda_lo, double lambda_hi, double eps,
                                             std::size_t panels) {
  if (eps <= 0.0) throw std::invalid_argument("resolvent path needs eps > 0");
  if (!(lambda_lo > 0.0 && lambda_hi > lambda_lo))
    throw std::invalid_argument("window must sit inside (0, inf)");

  const std::size_t n = grid.size();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  Eigen::VectorXcd acc_direct = Eigen::VectorXcd::Zero(n);
  Eigen::VectorXcd acc_parts = Eigen::VectorXcd::Zero(n);
  const Eigen::VectorXcd fc = f.cast<std::complex<double>>();

  const double half = 0.5 / std::sqrt(3.0);
  for (std::size_t p = 0; p < panels; ++p) {
    const double width = (lambda_hi - lambda_lo) / static_cast<double>(panels);
    const double mid = lambda_lo + (static_cast<double>(p) + 0.5) * width;
    for (double off : {-half, +half}) {
      const double lambda = mid + off * width;
      const double wq = 0.5 * width;

      const SpectralPoint zp{lambda, eps, +1};
      const KernelOperator r0p = resolvent::assemble_R0(grid, zp);
      const Eigen::MatrixXcd r0m = r0p.entries().conjugate();
      Eigen::MatrixXcd r0v_p = r0p.entries(), r0v_m = r0m;
      Eigen::MatrixXcd vr0_p = r0p.entries(), vr0_m = r0m;
      for (std::size_t j = 0; j < n; ++j) {
        const double vv = v.eval_radius(grid.r[j]);
        r0v_p.col(j) *= vv;
        r0v_m.col(j) *= vv;
        vr0_p.row(j) *= vv;
        vr0_m.row(j) *= vv;
      }
      Eigen::PartialPivLU<Eigen::MatrixXcd> lu_r0v_p(id + r0v_p);
      Eigen::PartialPivLU<Eigen::MatrixXcd> lu_r0v_m(id + r0v_m);
      Eigen::PartialPivLU<Eigen::MatrixXcd> lu_vr0_p(id + vr0_p);
      Eigen::PartialPivLU<Eigen::MatrixXcd> lu_vr0_m(id + vr0_m);

      // [R_V(+) - R_V(-)] f through two solves around the free difference
      const Eigen::VectorXcd y = lu_vr0_p.solve(fc);
      const Eigen::VectorXcd d = lu_r0v_m.solve((r0p.entries() - r0m) * y);

      const double root = std::sqrt(lambda);
      acc_direct += wq * (std::sin(t * root) / root) * psi(lambda) * d;
      acc_parts += wq * std::cos(t * root) * psi_prime(lambda) * d;

      // R_V(+/-)^2 f = (I + R0 V)^{-1} R0^2 (I + V R0)^{-1} f
      const auto sqp = resolvent::assemble_R0_squared(grid, zp);
      const Eigen::VectorXcd qp = lu_r0v_p.solve(sqp.entries() * lu_vr0_p.solve(fc));
      const Eigen::VectorXcd qm =
          lu_r0v_m.solve(sqp.entries().conjugate() * lu_vr0_m.solve(fc));
      acc_parts += wq * std::cos(t * root) * psi(lambda) * (qp - qm);
    }
  }

  const std::complex<double> I{0.0, 1.0};
  ResolventEvolution out;
  out.direct.t = t;
  out.direct.method = "spectral-resolvent";
  out.direct.u = (acc_direct / (2.0 * M_PI * I)).real();

  out.integrated.t = t;
  out.integrated.method = "spectral-resolvent-parts";
  out.integrated.u = (acc_parts / (M_PI * I * t)).real();

  out.mutual_disagreement = (out.direct.u - out.integrated.u).cwiseAbs().maxCoeff();
  return out;
}

LocalizedRun evolve_localized(const DiscreteHamiltonian& h, const besov::DyadicPartition& part,
                              const Eigen::VectorXd& f, int j, double t) {
  LocalizedRun run;
  run.j = j;
  run.t = t;
  const Eigen::VectorXd datum = h.apply(
      [&](double mu) { return part.phi(j, std::sqrt(std::max(0.0, mu))); }, f);
  run.block_l1 = h.discrete_l1(datum);
  if (run.block_l1 < 1e-14 * h.discrete_l1(f)) {
    run.skipped = true;
    return run;
  }
  const WaveState st = evolve_spectral(h, datum, t);
  run.sup_norm = st.u.cwiseAbs().maxCoeff();
  run.ratio = t * run.sup_norm / (std::pow(2.0, j) * run.block_l1);
  return run;
}

FdtdResult evolve_fdtd(const CartesianGrid& grid, const PotentialSpec& v,
                       const std::function<double(double)>& radial_datum, double t_final,
                       const std::vector<double>& sample_times, double dt) {
  const double cfl = grid.h / std::sqrt(3.0);
  if (dt <= 0.0) dt = 0.9 * cfl;
  if (dt > cfl) throw std::invalid_argument("CFL violation: need dt <= h/sqrt(3)");

  const std::size_t c = grid.count_per_axis;
  const std::size_t n = grid.size();
  std::vector<double> vv(n), radius(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = grid.nodes[i];
    radius[i] = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    vv[i] = v.eval_radius(radius[i]);
  }

  auto lap_minus_v = [&](const std::vector<double>& u, std::vector<double>& out) {
    const double inv_h2 = 1.0 / (grid.h * grid.h);
    for (std::size_t iz = 0; iz < c; ++iz)
      for (std::size_t iy = 0; iy < c; ++iy)
        for (std::size_t ix = 0; ix < c; ++ix) {
          const std::size_t i = grid.index(ix, iy, iz);
          double acc = -6.0 * u[i];
          acc += ix > 0 ? u[grid.index(ix - 1, iy, iz)] : 0.0;
          acc += ix + 1 < c ? u[grid.index(ix + 1, iy, iz)] : 0.0;
          acc += iy > 0 ? u[grid.index(ix, iy - 1, iz)] : 0.0;
          acc += iy + 1 < c ? u[grid.index(ix, iy + 1, iz)] : 0.0;
          acc += iz > 0 ? u[grid.index(ix, iy, iz - 1)] : 0.0;
          acc += iz + 1 < c ? u[grid.index(ix, iy, iz + 1)] : 0.0;
          out[i] = acc * inv_h2 - vv[i] * u[i];
        }
  };

  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = radial_datum(radius[i]);

  const std::size_t steps = static_cast<std::size_t>(std::ceil(t_final / dt));
  dt = t_final / static_cast<double>(steps);

  std::vector<double> prev(n, 0.0), cur(n), next(n), work(n);
  lap_minus_v(f, work);
  for (std::size_t i = 0; i < n; ++i)
    cur[i] = dt * f[i] + dt * dt * dt / 6.0 * work[i];

  FdtdResult res;
  res.dt = dt;

  auto energy_of = [&](const std::vector<double>& a, const std::vector<double>& b) {
    // physical energy at the midpoint: ||(b-a)/dt||^2/2 + (quadratic form at mean)
    double kin = 0.0, pot = 0.0;
    const double vol = grid.cell_volume();
    const double inv_h = 1.0 / grid.h;
    for (std::size_t iz = 0; iz < c; ++iz)
      for (std::size_t iy = 0; iy < c; ++iy)
        for (std::size_t ix = 0; ix < c; ++ix) {
          const std::size_t i = grid.index(ix, iy, iz);
          const double ut = (b[i] - a[i]) / dt;
          kin += ut * ut;
          const double um = 0.5 * (a[i] + b[i]);
          double gx = (ix + 1 < c ? 0.5 * (a[grid.index(ix + 1, iy, iz)] +
                                           b[grid.index(ix + 1, iy, iz)]) : 0.0) - um;
          double gy = (iy + 1 < c ? 0.5 * (a[grid.index(ix, iy + 1, iz)] +
                                           b[grid.index(ix, iy + 1, iz)]) : 0.0) - um;
          double gz = (iz + 1 < c ? 0.5 * (a[grid.index(ix, iy, iz + 1)] +
                                           b[grid.index(ix, iy, iz + 1)]) : 0.0) - um;
          pot += (gx * gx + gy * gy + gz * gz) * inv_h * inv_h + vv[i] * um * um;
        }
    return 0.5 * vol * (kin + pot);
  };

  std::size_t sample_idx = 0;
  auto maybe_sample = [&](double time, const std::vector<double>& u_prev,
                          const std::vector<double>& u_cur) {
    while (sample_idx < sample_times.size() && sample_times[sample_idx] <= time + 0.5 * dt) {
      double sup = 0.0;
      for (double x : u_cur) sup = std::max(sup, std::abs(x));
      res.times.push_back(time);
      res.sup_norms.push_back(sup);
      res.energy.push_back(energy_of(u_prev, u_cur));
      ++sample_idx;
    }
  };

  maybe_sample(dt, prev, cur);
  for (std::size_t s = 1; s < steps; ++s) {
    lap_minus_v(cur, work);
    for (std::size_t i = 0; i < n; ++i)
      next[i] = 2.0 * cur[i] - prev[i] + dt * dt * work[i];
    std::swap(prev, cur);
    std::swap(cur, next);
    maybe_sample((s + 1) * dt, prev, cur);
  }

  res.final_field = Eigen::Map<Eigen::VectorXd>(cur.data(), static_cast<Eigen::Index>(n));
  if (res.energy.size() >= 2) {
    const double e0 = res.energy.front();
    double drift = 0.0;
    for (double e : res.energy) drift = std::max(drift, std::abs(e - e0) / std::max(e0, 1e-300));
    res.energy_drift = drift;
  }
  return res;
}

DecayReport dispersive_ratio(const RadialGrid& grid, const PotentialSpec& v,
                             const std::vector<Eigen::VectorXd>& data,
                             const std::vector<double>& times) {
  if (!times.empty() && times.front() < 0.5)
    throw std::invalid_argument("dispersive scan needs t_min >= 0.5");
  DecayReport rep;
  rep.times = times;

  const DiscreteHamiltonian h = DiscreteHamiltonian::radial(grid, v);
  const DiscreteHamiltonian h_free =
      DiscreteHamiltonian::radial(grid, PotentialSpec::zero());
  rep.bound_state_present = h.min_eigenvalue() < -1e-10;

  // Zero-energy neighborhood of the scan: sigma_min dips flag the report.
  {
    std::vector<double> lams{0.0, 0.05, 0.2, 0.8};
    const auto scan = scattering::resonance_scan(grid, v, lams);
    rep.resonance_dip = !scan.dips.empty();
  }

  const besov::DyadicPartition part = besov::partition_for_grid(grid.dr, grid.r_max);
  for (const auto& f : data) {
    rep.besov_perturbed.push_back(besov::besov_norm(h, f, 1.0, 1.0, part).norm());
    rep.besov_free.push_back(besov::besov_norm(h_free, f, 1.0, 1.0, part).norm());
  }

  for (std::size_t m = 0; m < data.size(); ++m) {
    std::vector<double> sups, ratios;
    for (double t : times) {
      const WaveState st = evolve_spectral(h, data[m], t);
      const double sup = st.u.cwiseAbs().maxCoeff();
      sups.push_back(sup);
      const double ratio = t * sup / rep.besov_perturbed[m];
      ratios.push_back(ratio);
      rep.c_star = std::max(rep.c_star, ratio);
    }
    rep.sup_norms.push_back(std::move(sups));
    rep.ratios.push_back(std::move(ratios));
  }
  return rep;
}

}  // namespace wavelab::wave
