#include "wavelab/scattering.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wavelab/resolvent.hpp"

namespace wavelab::scattering {

namespace {

double sup_norm(const Eigen::MatrixXcd& m) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) best = std::max(best, m.row(i).cwiseAbs().sum());
  return best;
}

}  // namespace

Inversion invert(const RadialGrid& grid, const PotentialSpec& v, const SpectralPoint& z,
                 double tau) {
  const KernelOperator r0v = resolvent::assemble_R0V(grid, v, z);
  const Eigen::Index n = r0v.entries().rows();
  const Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(n, n) + r0v.entries();

  InversionCertificate cert;
  cert.point = z;
  cert.r0v_norm = sup_norm(r0v.entries());
  cert.neumann_applicable = cert.r0v_norm < 1.0;
  cert.squared_norm = sup_norm(r0v.entries() * r0v.entries());
  cert.route = cert.neumann_applicable ? "neumann"
               : cert.squared_norm < 1.0 ? "squared-neumann"
                                         : "fredholm";
  auto [smax, smin] = extreme_singular_values(a);
  cert.sigma_min = smin;
  cert.condition = smax / smin;
  cert.near_singular = smin < tau * smax;

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  Eigen::MatrixXcd inv = lu.solve(Eigen::MatrixXcd::Identity(n, n));
  cert.inverse_norm = sup_norm(inv);

  // Inverse entries act on plain node values, no quadrature factor.
  return Inversion{KernelOperator(std::move(inv), std::vector<double>(n, 1.0),
                                  NormTag::SupToSup, z),
                   cert};
}

ResonanceScan resonance_scan(const RadialGrid& grid, const PotentialSpec& v,
                             const std::vector<double>& lambdas) {
  if (lambdas.empty() || !std::is_sorted(lambdas.begin(), lambdas.end()) || lambdas.front() < 0.0)
    throw std::invalid_argument("resonance scan needs ascending lambdas in [0, inf)");
  ResonanceScan scan;
  scan.lambda_cap = resolvent::lambda_resolution_cap(grid.dr);
  scan.lambdas.push_back(0.0);
  for (double l : lambdas) {
    if (l == 0.0) continue;
    if (l > scan.lambda_cap) {
      scan.truncated = true;
      continue;
    }
    scan.lambdas.push_back(l);
  }

  auto sigma_at = [&](double lambda) {
    const KernelOperator r0v = resolvent::assemble_R0V(grid, v, SpectralPoint{lambda, 0.0, +1});
    const Eigen::Index n = r0v.entries().rows();
    const Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(n, n) + r0v.entries();
    return extreme_singular_values(a);
  };

  for (double l : scan.lambdas) {
    const KernelOperator r0v = resolvent::assemble_R0V(grid, v, SpectralPoint{l, 0.0, +1});
    scan.neumann_norm.push_back(sup_norm(r0v.entries()));
    auto [smax, smin] = sigma_at(l);
    scan.sigma_min.push_back(smin);
    scan.condition.push_back(smax / smin);
  }

  std::vector<double> sorted = scan.sigma_min;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  scan.tau = 1e-3 * median;

  // Golden-section refinement of local dips below tau.
  const double gold = (std::sqrt(5.0) - 1.0) / 2.0;
  for (std::size_t i = 0; i < scan.lambdas.size(); ++i) {
    if (scan.sigma_min[i] >= scan.tau) continue;
    double lo = i > 0 ? scan.lambdas[i - 1] : scan.lambdas[i];
    double hi = i + 1 < scan.lambdas.size() ? scan.lambdas[i + 1] : scan.lambdas[i];
    double a = lo, b = hi;
    double x1 = b - gold * (b - a), x2 = a + gold * (b - a);
    double f1 = sigma_at(x1).second, f2 = sigma_at(x2).second;
    for (int it = 0; it < 24 && (b - a) > 1e-10 * std::max(1.0, hi); ++it) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gold * (b - a);
        f1 = sigma_at(x1).second;
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gold * (b - a);
        f2 = sigma_at(x2).second;
      }
    }
    const double lam = 0.5 * (a + b);
    scan.dips.push_back({lam, sigma_at(lam).second});
  }
  return scan;
}

PerturbedResolvent perturbed_resolvent(const RadialGrid& grid, const PotentialSpec& v,
                                       const SpectralPoint& z) {
  const KernelOperator r0 = resolvent::assemble_R0(grid, z);
  const KernelOperator r0v = resolvent::assemble_R0V(grid, v, z);
  const KernelOperator vr0 = resolvent::assemble_VR0(grid, v, z);
  const Eigen::Index n = r0.entries().rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);

  Eigen::PartialPivLU<Eigen::MatrixXcd> left(id + r0v.entries());
  Eigen::MatrixXcd via_left = left.solve(r0.entries());

  // R0 (I + V R0)^{-1} = ((I + V R0)^{-T} R0^T)^T
  Eigen::PartialPivLU<Eigen::MatrixXcd> right((id + vr0.entries()).transpose().eval());
  Eigen::MatrixXcd via_right = right.solve(r0.entries().transpose()).transpose();

  const double disagreement = (via_left - via_right).cwiseAbs().maxCoeff();
  PerturbedResolvent out{KernelOperator(std::move(via_left), grid.w, NormTag::SupToSup, z),
                         disagreement, false};
  auto [smax, smin] = extreme_singular_values(id + r0v.entries());
  out.near_singular = smin < 1e-8 * smax;
  return out;
}

KernelOperator spectral_measure_perturbed(const RadialGrid& grid, const PotentialSpec& v,
                                          double lambda, double eps) {
  const SpectralPoint plus{lambda, eps, +1};
  const SpectralPoint minus{lambda, eps, -1};
  const KernelOperator diff = resolvent::spectral_measure_free(grid, lambda, eps);
  const Eigen::Index n = diff.entries().rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);

  const KernelOperator r0v_minus = resolvent::assemble_R0V(grid, v, minus);
  Eigen::PartialPivLU<Eigen::MatrixXcd> left(id + r0v_minus.entries());
  Eigen::MatrixXcd mid = left.solve(diff.entries());

  const KernelOperator vr0_plus = resolvent::assemble_VR0(grid, v, plus);
  Eigen::PartialPivLU<Eigen::MatrixXcd> right((id + vr0_plus.entries()).transpose().eval());
  Eigen::MatrixXcd full = right.solve(mid.transpose()).transpose();

  return KernelOperator(std::move(full), grid.w, NormTag::L1ToLinf, plus);
}

KernelOperator perturbed_resolvent_squared(const RadialGrid& grid, const PotentialSpec& v,
                                           double lambda, double eps, int branch) {
  if (lambda == 0.0 && eps == 0.0)
    throw std::invalid_argument("perturbed squared resolvent undefined at (0, 0)");
  const SpectralPoint z{lambda, eps, branch};
  const KernelOperator r0sq = resolvent::assemble_R0_squared(grid, z);
  const Eigen::Index n = r0sq.entries().rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);

  const KernelOperator r0v = resolvent::assemble_R0V(grid, v, z);
  Eigen::PartialPivLU<Eigen::MatrixXcd> left(id + r0v.entries());
  Eigen::MatrixXcd mid = left.solve(r0sq.entries());

  const KernelOperator vr0 = resolvent::assemble_VR0(grid, v, z);
  Eigen::PartialPivLU<Eigen::MatrixXcd> right((id + vr0.entries()).transpose().eval());
  Eigen::MatrixXcd full = right.solve(mid.transpose()).transpose();

  return KernelOperator(std::move(full), grid.w, NormTag::L1ToLinf, z);
}

PerturbationBudget perturbation_budget(const RadialGrid& grid, const PotentialSpec& v1,
                                       double lambda_cap, std::size_t scan_points) {
  for (double r : grid.r)
    if (v1.eval_radius(r) < 0.0)
      throw std::invalid_argument("perturbation budget needs a nonnegative core potential");
  if (v1.decay_exponent() <= 3.0 && !std::isfinite(v1.support_radius()))
    throw std::invalid_argument("perturbation budget needs decay exponent > 3");

  const double resolution_cap = resolvent::lambda_resolution_cap(grid.dr);
  if (lambda_cap <= 0.0) {
    // Default split point: where the squared-term envelope drops below 1/2.
    lambda_cap = resolution_cap;
    for (double l = 0.25; l <= resolution_cap; l *= 2.0) {
      const KernelOperator r0v = resolvent::assemble_R0V(grid, v1, SpectralPoint{l, 0.0, +1});
      if (sup_norm(r0v.entries() * r0v.entries()) < 0.5) {
        lambda_cap = l;
        break;
      }
    }
  }
  lambda_cap = std::min(lambda_cap, resolution_cap);

  PerturbationBudget out;
  out.lambda_cap = lambda_cap;
  for (std::size_t k = 0; k < scan_points; ++k) {
    const double l = lambda_cap * static_cast<double>(k) / static_cast<double>(scan_points - 1);
    const Inversion inv = invert(grid, v1, SpectralPoint{l, 0.0, +1});
    if (inv.certificate.near_singular) {
      out.resonance_obstruction = true;
      return out;
    }
    out.c0 = std::max(out.c0, inv.certificate.inverse_norm);
  }
  out.budget = 4.0 * M_PI / out.c0;
  return out;
}

}  // namespace wavelab::scattering
