#include <cmath>

#include "doctest.h"
#include "wavelab/besov.hpp"
#include "wavelab/kato.hpp"
#include "wavelab/semigroup.hpp"

using namespace wavelab;
using potential::PotentialSpec;
using semigroup::DiscreteHamiltonian;

namespace {

// Spherical mean of the free heat kernel between radii r and s.
double free_heat_mean(double r, double s, double t) {
  const double w = 4.0 * t;
  const double u = r + s, l = std::abs(r - s);
  const double shell = 0.5 * w * (std::exp(-l * l / w) - std::exp(-u * u / w)) / (2.0 * r * s);
  return std::pow(4.0 * M_PI * t, -1.5) * shell;
}

// Bound-state energy of the depth-g unit well from the s-wave matching
// k cot(k) = -kappa, k^2 + kappa^2 = g.
double well_bound_state_energy(double g) {
  double lo = 1e-6, hi = std::sqrt(g) - 1e-9;
  auto f = [&](double kappa) {
    const double k = std::sqrt(g - kappa * kappa);
    return k / std::tan(k) + kappa;
  };
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(lo) * f(mid) <= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  const double kappa = 0.5 * (lo + hi);
  return -kappa * kappa;
}

}  // namespace

TEST_CASE("radial hamiltonian spectrum") {
  const auto grid = make_radial_grid(8.0, 400);

  SUBCASE("free dirichlet s-wave modes") {
    const auto h = DiscreteHamiltonian::radial(grid, PotentialSpec::zero());
    for (int k = 1; k <= 5; ++k) {
      const double exact = std::pow(k * M_PI / grid.r_max, 2);
      CHECK(h.eigenvalues()(k - 1) == doctest::Approx(exact).epsilon(1e-2));
    }
    CHECK_FALSE(h.selfadjoint_warning());
  }

  SUBCASE("hypothesis-passing well is nonnegative") {
    const auto h = DiscreteHamiltonian::radial(grid, PotentialSpec::ball_well(1.0, -0.9));
    CHECK(h.min_eigenvalue() >= -1e-8);
  }

  SUBCASE("deep well has a bound state matching the s-wave matching oracle") {
    const auto h = DiscreteHamiltonian::radial(grid, PotentialSpec::ball_well(1.0, -3.0));
    CHECK(h.min_eigenvalue() < 0.0);
    CHECK(h.min_eigenvalue() ==
          doctest::Approx(well_bound_state_energy(3.0)).epsilon(1e-2));
  }

  SUBCASE("violating the selfadjointness threshold only warns") {
    const auto h = DiscreteHamiltonian::radial(grid, PotentialSpec::ball_well(1.0, -2.5));
    CHECK(h.selfadjoint_warning());  // ||V_-||_K = 5 pi >= 4 pi
    CHECK(h.eigenvalues().size() == 400);
  }

  SUBCASE("exact symmetry in the weighted pairing") {
    const auto h = DiscreteHamiltonian::radial(grid, PotentialSpec::gaussian(1.0, -0.5));
    const Eigen::MatrixXd& a = h.hamiltonian_matrix();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j)
        worst = std::max(worst,
                         std::abs(grid.w[i] * a(i, j) - grid.w[j] * a(j, i)));
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("heat flow") {
  const auto grid = make_radial_grid(8.0, 320);
  const auto h = DiscreteHamiltonian::radial(grid, PotentialSpec::zero());

  SUBCASE("short-time limit returns the datum") {
    Eigen::VectorXd f(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
      f(i) = std::exp(-grid.r[i] * grid.r[i]);
    const Eigen::VectorXd out = semigroup::heat_apply(h, 1e-9, f);
    CHECK((out - f).cwiseAbs().maxCoeff() < 1e-6);
  }

  SUBCASE("free kernel matches the gaussian within 2 percent away from walls") {
    for (double t : {0.1, 0.5, 1.0}) {
      const Eigen::MatrixXd kern = semigroup::heat_kernel(h, t);
      const double margin = 3.0 * std::sqrt(2.0 * t);
      for (std::size_t i = 0; i < grid.size(); i += 13) {
        for (std::size_t j = 0; j < grid.size(); j += 17) {
          if (grid.r[i] > grid.r_max - margin || grid.r[j] > grid.r_max - margin) continue;
          const double oracle = free_heat_mean(grid.r[i], grid.r[j], t);
          if (oracle < 1e-6) continue;
          CHECK(kern(i, j) == doctest::Approx(oracle).epsilon(2e-2));
        }
      }
    }
  }

  SUBCASE("semigroup law to round-off") {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(grid.size());
    f(10) = 1.0;
    const Eigen::VectorXd one_step = semigroup::heat_apply(h, 0.7, f);
    const Eigen::VectorXd two_step =
        semigroup::heat_apply(h, 0.3, semigroup::heat_apply(h, 0.4, f));
    CHECK((one_step - two_step).cwiseAbs().maxCoeff() < 1e-10);
  }

  SUBCASE("eigen-sum resolvent and derivative identities hold to round-off") {
    const auto hw = DiscreteHamiltonian::radial(grid, PotentialSpec::ball_well(1.0, -0.9));
    const double z = -1.0;
    const Eigen::MatrixXd res =
        hw.action_matrix([z](double mu) { return 1.0 / (mu - z); });
    const Eigen::MatrixXd should_be_identity =
        hw.hamiltonian_matrix() * res - z * res;
    CHECK((should_be_identity - Eigen::MatrixXd::Identity(res.rows(), res.cols()))
              .cwiseAbs()
              .maxCoeff() < 1e-9);

    const double t = 0.5;
    const Eigen::MatrixXd ddt =
        hw.action_matrix([t](double mu) { return -mu * std::exp(-t * mu); });
    const Eigen::MatrixXd minus_h_heat =
        -hw.hamiltonian_matrix() *
        hw.action_matrix([t](double mu) { return std::exp(-t * mu); });
    CHECK((ddt - minus_h_heat).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("heat kernel gaussian bound") {
  const auto grid = make_radial_grid(8.0, 320);

  SUBCASE("free case dominated symbolically") {
    for (double t : {0.1, 0.5, 1.0})
      for (double rho : {0.0, 0.5, 1.0, 3.0})
        CHECK(std::pow(4.0 * M_PI * t, -1.5) * std::exp(-rho * rho / (4.0 * t)) <=
              std::pow(2.0 * M_PI * t, -1.5) * std::exp(-rho * rho / (8.0 * t)));
  }

  SUBCASE("quarter-depth well passes at the stated times") {
    const auto v = PotentialSpec::ball_well(1.0, -0.25);  // ||V_-||_K = pi/2
    const auto h = DiscreteHamiltonian::radial(grid, v);
    for (double t : {0.1, 0.5, 1.0}) {
      const auto chk = semigroup::kernel_bound_check(h, v, t);
      CHECK_FALSE(chk.skipped);
      CHECK(chk.vminus_kato == doctest::Approx(M_PI / 2.0).epsilon(1e-3));
      CHECK(chk.pass);
    }
  }

  SUBCASE("hypothesis violation skips the check") {
    const auto v = PotentialSpec::ball_well(1.0, -0.9);  // 1.8 pi > pi
    const auto h = DiscreteHamiltonian::radial(grid, v);
    CHECK(semigroup::kernel_bound_check(h, v, 0.5).skipped);
  }

  SUBCASE("repulsive potential is dominated by the free kernel") {
    const auto v = PotentialSpec::ball_well(1.0, 0.8);
    const auto h = DiscreteHamiltonian::radial(grid, v);
    const auto h0 = DiscreteHamiltonian::radial(grid, PotentialSpec::zero());
    const double t = 0.5;
    const Eigen::MatrixXd kv = semigroup::heat_kernel(h, t);
    const Eigen::MatrixXd k0 = semigroup::heat_kernel(h0, t);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t j = 0; j < grid.size(); ++j)
        if (grid.r[i] < 5.0 && grid.r[j] < 5.0)
          worst = std::max(worst, kv(i, j) - k0(i, j));
    CHECK(worst <= 1e-8 * k0.maxCoeff());
  }
}

TEST_CASE("lp-lq bounds") {
  const auto grid = make_radial_grid(8.0, 320);
  const auto v = PotentialSpec::ball_well(1.0, -0.25);
  const auto h = DiscreteHamiltonian::radial(grid, v);
  const auto h0 = DiscreteHamiltonian::radial(grid, PotentialSpec::zero());

  SUBCASE("all four pairs pass for the quarter well") {
    for (double t : {0.1, 0.5, 1.0}) {
      for (auto [p, q] : {std::pair{1, 0}, {2, 2}, {1, 2}, {2, 0}}) {
        const auto chk = semigroup::lplq_check(h, v, t, p, q);
        CHECK(chk.pass);
      }
    }
  }

  SUBCASE("free measured L1->Linf value is the gaussian peak") {
    const auto chk = semigroup::lplq_check(h0, PotentialSpec::zero(), 0.5, 1, 0);
    CHECK(chk.measured == doctest::Approx(std::pow(4.0 * M_PI * 0.5, -1.5)).epsilon(2e-2));
  }

  SUBCASE("free L2->L2 norm is bounded by one") {
    const auto chk = semigroup::lplq_check(h0, PotentialSpec::zero(), 0.5, 2, 2);
    CHECK(chk.measured <= 1.0);
  }

  SUBCASE("log-log slope of the L1->Linf decay is -3/2") {
    std::vector<double> ts{0.1, 0.2, 0.4, 0.8};
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double t : ts) {
      const auto chk = semigroup::lplq_check(h0, PotentialSpec::zero(), t, 1, 0);
      const double x = std::log(t), y = std::log(chk.measured);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double n = ts.size();
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-1.5).epsilon(0.05 / 1.5));
  }
}

TEST_CASE("feynman-kac monte carlo") {
  semigroup::PathEnsemble small;
  small.count = 20000;
  small.seed = 99;

  SUBCASE("zero potential has zero variance") {
    const auto res = semigroup::feynman_kac_mc(PotentialSpec::zero(), {0, 0, 0}, 1.0, small);
    CHECK(res.estimate == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(res.stderr_ == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("repulsive bumps damp the estimate monotonically") {
    double prev = 1.0;
    for (double g : {1.0, 3.0, 9.0}) {
      const auto res =
          semigroup::feynman_kac_mc(PotentialSpec::ball_well(1.0, g), {0, 0, 0}, 1.0, small);
      CHECK(res.estimate < prev);
      prev = res.estimate;
    }
  }

  SUBCASE("matches the grid semigroup within error bars") {
    const auto grid = make_radial_grid(10.0, 300);
    for (double g : {0.5, -0.5}) {
      const auto v = PotentialSpec::ball_well(1.0, g);
      const auto h = DiscreteHamiltonian::radial(grid, v);
      const Eigen::VectorXd ones = Eigen::VectorXd::Ones(grid.size());
      const Eigen::VectorXd heat = semigroup::heat_apply(h, 1.0, ones);
      semigroup::PathEnsemble ens;
      ens.count = 60000;
      ens.seed = 7;
      const auto mc = semigroup::feynman_kac_mc(v, {grid.r[6], 0, 0}, 1.0, ens);
      CHECK(std::abs(mc.estimate - heat(6)) < 3.0 * mc.stderr_ + 2e-2);
    }
  }

  SUBCASE("reruns with the same seed reproduce exactly") {
    const auto v = PotentialSpec::ball_well(1.0, 0.7);
    const auto a = semigroup::feynman_kac_mc(v, {0.5, 0, 0}, 0.5, small);
    const auto b = semigroup::feynman_kac_mc(v, {0.5, 0, 0}, 0.5, small);
    CHECK(a.estimate == b.estimate);
    CHECK(a.stderr_ == b.stderr_);
  }
}

TEST_CASE("occupation kernel and khasminskii bound") {
  SUBCASE("closed form against direct time quadrature") {
    for (auto [rho, t] : {std::pair{0.5, 1.0}, {1.0, 0.3}, {2.0, 5.0}}) {
      double acc = 0.0;
      const int n = 200000;
      for (int k = 0; k < n; ++k) {
        const double s = (k + 0.5) * t / n;
        acc += std::pow(2.0 * M_PI * s, -1.5) * std::exp(-rho * rho / (2.0 * s)) * t / n;
      }
      CHECK(semigroup::occupation_kernel(rho, t) == doctest::Approx(acc).epsilon(1e-6));
    }
  }

  SUBCASE("long-time limit is the newton kernel over 2 pi") {
    for (double rho : {0.5, 1.0, 2.0}) {
      CHECK(semigroup::occupation_kernel(rho, 1e8) ==
            doctest::Approx(1.0 / (2.0 * M_PI * rho)).epsilon(1e-3));
      CHECK(semigroup::occupation_kernel(rho, 10.0) <= 1.0 / (2.0 * M_PI * rho));
    }
  }

  SUBCASE("zero negative part gives alpha 0 and unit moments") {
    const auto grid = make_radial_grid(6.0, 200);
    semigroup::PathEnsemble ens;
    ens.count = 2000;
    const auto chk =
        semigroup::qt_and_khasminskii(PotentialSpec::zero(), 1.0, {0.0, 1.0}, grid, ens);
    CHECK(chk.alpha == 0.0);
    CHECK(chk.applicable);
    for (double e : chk.exp_mc) CHECK(e == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(chk.identity_ok);
    CHECK(chk.bound_ok);
  }

  SUBCASE("half-depth well verifies the geometric bound") {
    const auto grid = make_radial_grid(6.0, 300);
    semigroup::PathEnsemble ens;
    ens.count = 30000;
    ens.seed = 13;
    const auto vminus = PotentialSpec::ball_well(1.0, 0.5);  // this is V_-, nonnegative
    const auto chk = semigroup::qt_and_khasminskii(vminus, 1.0, {0.0, 0.5, 1.0}, grid, ens);
    CHECK(chk.applicable);
    CHECK(chk.alpha_bound == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(chk.alpha <= chk.alpha_bound * (1.0 + 1e-6));
    CHECK(chk.exp_bound == doctest::Approx(2.0).epsilon(1e-2));
    CHECK(chk.identity_ok);
    CHECK(chk.bound_ok);
  }
}

TEST_CASE("functional calculus") {
  const auto grid = make_radial_grid(8.0, 320);
  const auto h = DiscreteHamiltonian::radial(grid, PotentialSpec::ball_well(1.0, -0.9));

  SUBCASE("constant profile gives the identity") {
    const Eigen::MatrixXd m = semigroup::functional_calculus(
        h, [](double) { return 1.0; }, 3.7);
    CHECK((m - Eigen::MatrixXd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() < 1e-9);
  }

  SUBCASE("L1 operator norms stay within one modest constant across theta") {
    // the domain must resolve the bump window mu in [1/(2 theta), 2/theta]
    // for every theta: infrared cutoff (pi/r_max)^2 sits below 1/32
    const auto wide = make_radial_grid(40.0, 400);
    const auto hw = DiscreteHamiltonian::radial(wide, PotentialSpec::ball_well(1.0, -0.9));
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
      const double theta = std::ldexp(1.0, e);
      const Eigen::MatrixXd m = semigroup::functional_calculus(hw, bump, theta);
      const double norm = hw.l1_to_l1_norm(m);
      lo = std::min(lo, norm);
      hi = std::max(hi, norm);
    }
    CHECK(hi / lo < 10.0);
  }

  SUBCASE("cross-block norms decay in j at fixed k") {
    const auto part = besov::build_partition(-4, 5);
    const auto h0 = DiscreteHamiltonian::radial(grid, PotentialSpec::zero());
    const int k = 0;
    double prev = 1e300;
    for (int j = 1; j <= 3; ++j) {
      const double norm = semigroup::cross_block_norm(
          h, h0, [&](double s) { return part.phi(j, s); },
          [&](double s) { return part.phi(k, s); });
      CHECK(norm < prev);
      prev = norm;
    }
  }
}
