// Acceptance suite: one line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "wavelab/besov.hpp"
#include "wavelab/kato.hpp"
#include "wavelab/resolvent.hpp"
#include "wavelab/scattering.hpp"
#include "wavelab/semigroup.hpp"
#include "wavelab/wave.hpp"

using namespace wavelab;
using potential::PotentialSpec;
using semigroup::DiscreteHamiltonian;

namespace {

int failures = 0;

void report(int idx, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
  std::printf("[%2d] %s %s: %s (%.1f s)\n", idx, pass ? "PASS" : "FAIL", name.c_str(),
              detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <typename Fn>
void criterion(int idx, const std::string& name, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = false;
  std::string detail;
  try {
    std::tie(pass, detail) = fn();
  } catch (const std::exception& e) {
    pass = false;
    detail = std::string("exception: ") + e.what();
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(idx, name, pass, detail, dt);
}

char buf[512];

std::string fmt(const char* f, auto... args) {
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

Eigen::VectorXd radial_samples(const RadialGrid& g, const std::function<double(double)>& f) {
  Eigen::VectorXd out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out(i) = f(g.r[i]);
  return out;
}

double kirchhoff_gaussian(double t, double r) {
  auto G = [](double x) { return 0.5 * (1.0 - std::exp(-x * x)); };
  if (r < 1e-12) return t * std::exp(-t * t);
  return (G(r + t) - G(std::abs(r - t))) / (2.0 * r);
}

}  // namespace

int main() {
  std::printf("acceptance criteria\n");

  criterion(1, "kato norm of the unit ball", [] {
    const auto grid = make_radial_grid(2.0, 2000);
    const double k = potential::kato_norm(PotentialSpec::ball_well(1.0, 1.0), grid);
    const double rel = std::abs(k - 2.0 * M_PI) / (2.0 * M_PI);
    return std::pair{rel < 1e-2, fmt("measured %.6f vs 2*pi, rel err %.2e", k, rel)};
  });

  criterion(2, "threshold constants", [] {
    const double c3 = potential::kato_coupling_constant();
    const double thr = potential::selfadjoint_threshold();
    const bool ok = std::abs(c3 - 2.0 * M_PI) < 1e-12 && std::abs(thr - 4.0 * M_PI) < 1e-12;
    return std::pair{ok, fmt("c3 = %.15f, threshold = %.15f", c3, thr)};
  });

  criterion(3, "free spectral-measure norm", [] {
    const auto grid = make_radial_grid(6.0, 300);
    double worst = 0.0;
    for (double lambda : {1.0, 4.0, 16.0}) {
      for (double eps : {0.0, 0.1}) {
        const auto op = resolvent::spectral_measure_free(grid, lambda, eps);
        const double expected = std::sqrt(lambda_eps(lambda, eps)) / (2.0 * M_PI);
        worst = std::max(worst, std::abs(op.opnorm_l1_to_linf() - expected) / expected);
      }
    }
    return std::pair{worst < 5e-3, fmt("worst rel dev %.2e over 6 points", worst)};
  });

  criterion(4, "zero-energy resonance depth", [] {
    // bisection in the well depth on the sign of the lowest eigenvalue of
    // I + R0(0)V restricted to the support ball
    const auto grid = make_radial_grid(1.0, 400);
    const std::size_t n = grid.size();
    Eigen::MatrixXd sym(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        sym(i, j) = std::sqrt(grid.w[i] * grid.w[j]) /
                    (4.0 * M_PI * std::max(grid.r[i], grid.r[j]));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    auto lowest = [&](double g) { return 1.0 - g * es.eigenvalues()(n - 1); };
    double lo = 2.0, hi = 3.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (lowest(lo) * lowest(mid) <= 0.0)
        hi = mid;
      else
        lo = mid;
    }
    const double g_star = 0.5 * (lo + hi);
    const double target = M_PI * M_PI / 4.0;
    const double rel = std::abs(g_star - target) / target;
    // cross-check that sigma_min actually dips at the located depth
    const auto scan = scattering::resonance_scan(
        grid, PotentialSpec::ball_well(1.0, -g_star), {0.0, 0.5, 1.0});
    const bool dip = scan.sigma_min.front() < 0.05;
    return std::pair{rel < 2e-2 && dip,
                     fmt("g* = %.5f vs pi^2/4 = %.5f (rel %.2e), sigma_min(0) = %.2e",
                         g_star, target, rel, scan.sigma_min.front())};
  });

  criterion(5, "neumann inverse bound for the 0.9 well", [] {
    const auto grid = make_radial_grid(2.0, 300);
    const auto well = PotentialSpec::ball_well(1.0, -0.9);
    const double bound = 1.0 / (1.0 - 0.45) * 1.05;
    double worst = 0.0;
    for (double lambda : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
      for (double eps : {0.0, 0.05, 0.1}) {
        for (int branch : {+1, -1}) {
          const auto inv = scattering::invert(grid, well, {lambda, eps, branch});
          worst = std::max(worst, inv.certificate.inverse_norm);
          if (!inv.certificate.neumann_applicable)
            return std::pair{false, std::string("neumann route unexpectedly closed")};
        }
      }
    }
    return std::pair{worst <= bound,
                     fmt("max inverse norm %.4f <= 1/(1-0.45)+5%% = %.4f", worst, bound)};
  });

  criterion(6, "perturbed spectral-measure envelope", [] {
    const auto grid = make_radial_grid(6.0, 300);
    const auto well = PotentialSpec::ball_well(1.0, -0.4);
    const double eps = 0.05;
    std::vector<double> cs;
    for (double lambda : {1.0, 2.0, 4.0, 8.0, 16.0}) {
      const auto pert = scattering::spectral_measure_perturbed(grid, well, lambda, eps);
      cs.push_back(pert.opnorm_l1_to_linf() / std::sqrt(lambda_eps(lambda, eps)));
    }
    double mean = 0.0;
    for (double c : cs) mean += c;
    mean /= static_cast<double>(cs.size());
    double lo = 1e300, hi = 0.0;
    for (double c : cs) {
      lo = std::min(lo, c / mean);
      hi = std::max(hi, c / mean);
    }
    const bool ok = lo >= 0.75 && hi <= 1.25;
    return std::pair{ok, fmt("fitted C = %.4f, per-lambda within [%.2f, %.2f] of the fit",
                             mean, lo, hi)};
  });

  criterion(7, "heat kernel gaussian bound", [] {
    const auto grid = make_radial_grid(8.0, 320);
    const auto v = PotentialSpec::ball_well(1.0, -0.25);  // ||V_-||_K = pi/2
    const auto h = DiscreteHamiltonian::radial(grid, v);
    double worst = -1e300;
    for (double t : {0.1, 0.5, 1.0}) {
      const auto chk = semigroup::kernel_bound_check(h, v, t);
      if (chk.skipped) return std::pair{false, std::string("hypothesis check skipped")};
      if (!chk.pass) return std::pair{false, fmt("violation %.3e at t = %.1f", chk.max_violation, t)};
      worst = std::max(worst, chk.max_violation);
    }
    // free-case comparison holds symbolically on a sample
    for (double t : {0.1, 0.5, 1.0})
      for (double rho = 0.0; rho < 5.0; rho += 0.25)
        if (std::pow(4.0 * M_PI * t, -1.5) * std::exp(-rho * rho / (4.0 * t)) >
            std::pow(2.0 * M_PI * t, -1.5) * std::exp(-rho * rho / (8.0 * t)))
          return std::pair{false, std::string("free-case comparison failed")};
    return std::pair{true, fmt("zero violations above tolerance, worst gap %.2e", worst)};
  });

  criterion(8, "feynman-kac and khasminskii", [] {
    const auto grid = make_radial_grid(10.0, 300);
    const auto vminus = PotentialSpec::ball_well(1.0, 0.5);  // V_- of the g = 0.5 well
    semigroup::PathEnsemble ens;
    ens.count = 100000;
    ens.seed = 20240817;
    const auto kh = semigroup::qt_and_khasminskii(vminus, 1.0, {0.0, 0.5, 1.0}, grid, ens);
    if (!kh.applicable || !kh.bound_ok)
      return std::pair{false, std::string("exponential-moment bound failed")};
    if (!kh.identity_ok)
      return std::pair{false, std::string("occupation-time identity failed")};

    const auto v = PotentialSpec::ball_well(1.0, -0.5);
    const auto h = DiscreteHamiltonian::radial(grid, v);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(grid.size());
    const Eigen::VectorXd heat = semigroup::heat_apply(h, 1.0, ones);
    const auto mc = semigroup::feynman_kac_mc(v, {grid.r[8], 0.0, 0.0}, 1.0, ens);
    const double gap = std::abs(mc.estimate - heat(8));
    const double tol = 3.0 * mc.stderr_ + 2e-2;
    return std::pair{gap < tol,
                     fmt("exp moments below %.3f; mc vs grid gap %.3e < %.3e", kh.exp_bound,
                         gap, tol)};
  });

  criterion(9, "functional-calculus uniformity", [] {
    // theta-uniform L1 bounds for g(theta H)
    const auto grid = make_radial_grid(40.0, 400);
    const auto h = DiscreteHamiltonian::radial(grid, PotentialSpec::ball_well(1.0, -0.9));
    auto bump = [](double s) {
      auto cut = [](double r) {
        if (r <= 1.0) return 1.0;
        if (r >= 2.0) return 0.0;
        const double a = std::exp(-1.0 / (2.0 - r));
        const double b = std::exp(-1.0 / (r - 1.0));
        return a / (a + b);
      };
      return cut(s) - cut(2.0 * s);
    };
    double lo = 1e300, hi = 0.0;
    for (int e = -4; e <= 4; ++e) {
      const double norm = h.l1_to_l1_norm(
          semigroup::functional_calculus(h, bump, std::ldexp(1.0, e)));
      lo = std::min(lo, norm);
      hi = std::max(hi, norm);
    }
    if (!(hi / lo < 10.0))
      return std::pair{false, fmt("g(theta H) spread %.2f >= 10", hi / lo)};

    // cross-block ratios against 2^{-2j+2k}: the constant must be uniform in
    // theta cell by cell (the envelope itself is a one-sided bound)
    const auto wide = make_radial_grid(36.0, 800);
    const auto part = besov::build_partition(-5, 6);
    const auto h0 = DiscreteHamiltonian::radial(wide, PotentialSpec::zero());
    std::vector<Eigen::MatrixXd> kblocks;
    for (int k = -4; k <= 0; ++k)
      kblocks.push_back(h0.action_matrix(
          [&](double mu) { return part.phi(k, std::sqrt(std::max(0.0, mu))); }));
    double cell_lo[5][5], cell_hi[5][5];
    for (auto& row : cell_lo)
      for (auto& x : row) x = 1e300;
    for (auto& row : cell_hi)
      for (auto& x : row) x = 0.0;
    double fitted_c = 0.0;
    const auto well = PotentialSpec::ball_well(1.0, -0.9);
    for (double theta : {0.25, 1.0, 4.0}) {
      const auto ht = DiscreteHamiltonian::radial(wide, well.rescaled(theta));
      for (int j = 1; j <= 5; ++j) {
        const Eigen::MatrixXd jb = ht.action_matrix(
            [&](double mu) { return part.phi(j, std::sqrt(std::max(0.0, mu))); });
        for (int k = -4; k <= 0; ++k) {
          const double norm = ht.l1_to_l1_norm(jb * kblocks[k + 4]);
          const double ratio = norm / std::pow(2.0, -2.0 * j + 2.0 * k);
          cell_lo[j - 1][k + 4] = std::min(cell_lo[j - 1][k + 4], ratio);
          cell_hi[j - 1][k + 4] = std::max(cell_hi[j - 1][k + 4], ratio);
          fitted_c = std::max(fitted_c, ratio);
        }
      }
    }
    double worst = 0.0;
    for (int a = 0; a < 5; ++a)
      for (int b = 0; b < 5; ++b) worst = std::max(worst, cell_hi[a][b] / cell_lo[a][b]);
    return std::pair{worst < 10.0,
                     fmt("g(theta H) spread %.2f; cross-block fitted C = %.2f, worst "
                         "per-cell theta spread %.2f",
                         hi / lo, fitted_c, worst)};
  });

  criterion(10, "besov machinery", [] {
    const auto part = besov::build_partition(-6, 6);
    for (double r : {0.1, 0.37, 1.0, 3.0, 17.0, 60.0})
      if (std::abs(part.partition_sum(r) - 1.0) > 1e-12)
        return std::pair{false, fmt("partition identity fails at r = %.2f", r)};

    const auto grid = make_radial_grid(16.0, 400);
    const auto gpart = besov::partition_for_grid(grid.dr, grid.r_max);
    auto zero_mean = [](double r) { return (4.0 * r * r - 6.0) * std::exp(-r * r); };
    const auto well = PotentialSpec::ball_well(1.0, -0.4);
    double worst_resc = 0.0;
    for (int k : {1, 2}) {
      const auto chk = besov::rescale_check(grid, well, zero_mean, 1.0, 1.0, k, gpart);
      if (!chk.resolved) return std::pair{false, std::string("rescale datum under-resolved")};
      worst_resc = std::max(worst_resc, chk.residual);
    }
    if (worst_resc >= 5e-2)
      return std::pair{false, fmt("rescale residual %.3f >= 0.05", worst_resc)};

    std::vector<Eigen::VectorXd> data;
    for (double w : {0.5, 1.0, 2.0, 0.75, 1.5, 1.25})
      data.push_back(radial_samples(
          grid, [w](double r) { return std::exp(-r * r / (w * w)); }));
    const auto scan = besov::equivalence_ratio(grid, well, data, 1.0, 1.0,
                                               {1.0 / 16.0, 0.25, 1.0, 4.0, 16.0});
    if (!scan.hypothesis_ok) return std::pair{false, std::string("hypothesis check failed")};
    const double spread = scan.c_high / scan.c_low;
    return std::pair{spread < 10.0,
                     fmt("partition 1e-12 ok; rescale residual %.3f; equivalence spread "
                         "%.2f (C in [%.3f, %.3f])",
                         worst_resc, spread, scan.c_low, scan.c_high)};
  });

  criterion(11, "free-wave oracle", [] {
    const auto grid = make_radial_grid(12.0, 480);
    const auto h = DiscreteHamiltonian::radial(grid, PotentialSpec::zero());
    const Eigen::VectorXd f =
        radial_samples(grid, [](double r) { return std::exp(-r * r); });
    double worst_spec = 0.0;
    for (double t : {0.5, 1.0, 2.0}) {
      const auto st = wave::evolve_spectral(h, f, t);
      double w = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        w = std::max(w, std::abs(st.u(static_cast<Eigen::Index>(i)) -
                                 kirchhoff_gaussian(t, grid.r[i])));
        scale = std::max(scale, std::abs(kirchhoff_gaussian(t, grid.r[i])));
      }
      worst_spec = std::max(worst_spec, w / scale);
    }

    const auto cart = make_cartesian_grid(6.0, 121);
    const auto fd = wave::evolve_fdtd(cart, PotentialSpec::zero(),
                                      [](double r) { return std::exp(-r * r); }, 2.0, {2.0});
    double wfd = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < cart.size(); ++i) {
      const auto& p = cart.nodes[i];
      const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
      wfd = std::max(wfd, std::abs(fd.final_field(static_cast<Eigen::Index>(i)) -
                                   kirchhoff_gaussian(2.0, r)));
      scale = std::max(scale, std::abs(kirchhoff_gaussian(2.0, r)));
    }
    const double fdtd_rel = wfd / scale;
    const bool ok = worst_spec < 1e-3 && fdtd_rel < 1e-2;
    return std::pair{ok, fmt("spectral rel %.2e < 1e-3, fdtd rel %.2e < 1e-2", worst_spec,
                             fdtd_rel)};
  });

  criterion(12, "dispersive decay", [] {
    const auto grid = make_radial_grid(16.0, 400);
    std::vector<Eigen::VectorXd> data;
    for (double w : {0.3, 0.4, 0.5})
      data.push_back(radial_samples(
          grid, [w](double r) { return std::exp(-r * r / (w * w)); }));
    std::vector<double> times;
    for (int k = 0; k < 6; ++k) times.push_back(std::pow(8.0, k / 5.0));

    for (auto [name, v] :
         {std::pair<const char*, PotentialSpec>{"free", PotentialSpec::zero()},
          {"well", PotentialSpec::ball_well(1.0, -0.4)}}) {
      const auto rep = wave::dispersive_ratio(grid, v, data, times);
      if (rep.bound_state_present || rep.resonance_dip)
        return std::pair{false, fmt("%s has an unexpected bound state", name)};
      for (std::size_t m = 0; m < data.size(); ++m) {
        double lo = 1e300, hi = 0.0;
        for (double r : rep.ratios[m]) {
          lo = std::min(lo, r);
          hi = std::max(hi, r);
        }
        if (hi / lo > 1.3)
          return std::pair{false, fmt("%s datum %zu spread %.3f > 1.3", name, m, hi / lo)};
      }
    }

    const auto deep = wave::dispersive_ratio(grid, PotentialSpec::ball_well(1.0, -3.0),
                                             data, times);
    if (!deep.bound_state_present)
      return std::pair{false, std::string("bound state not flagged")};
    for (std::size_t m = 0; m < data.size(); ++m)
      if (deep.ratios[m].back() < 2.0 * deep.ratios[m].front())
        return std::pair{false, std::string("bound-state growth not observed")};
    return std::pair{true,
                     std::string("free and shallow-well ratios flat within 30%; "
                                 "bound state grows and is labeled")};
  });

  std::printf("%d of 12 criteria passed\n", 12 - failures);
  return failures == 0 ? 0 : 1;
}
