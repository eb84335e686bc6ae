#include "wavelab/kato.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wavelab::potential {

double kato_coupling_constant(int n) {
  return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n - 1.0);
}

double selfadjoint_threshold(int n) {
  return 2.0 * kato_coupling_constant(n);
}

namespace {

// eta(a; ball) for a radial potential sampled on the grid: angular reduction
// of int_{|x-y|<ball} |V(y)|/|x-y| dy at probe radius a. ball = +inf gives the
// full Kato integrand at a.
double radial_probe_integral(const std::vector<double>& absv, const RadialGrid& g,
                             double a, double ball) {
  double acc = 0.0;
  if (a == 0.0) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (g.r[j] < ball) acc += absv[j] * g.w[j] / g.r[j];
    }
    return acc;
  }
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double s = g.r[j];
    const double reach = std::min(ball, a + s) - std::abs(a - s);
    if (reach <= 0.0) continue;
    acc += absv[j] * g.w[j] * reach / (2.0 * a * s);
  }
  return acc;
}

std::vector<double> sample_abs(const PotentialSpec& v, const RadialGrid& g) {
  std::vector<double> a(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) a[i] = std::abs(v.eval_radius(g.r[i]));
  return a;
}

// Tail of the Kato integrand beyond the grid: the reduced kernel is 1/s for
// s larger than every probe, so the tail is 4 pi int_{r_max}^inf s |V(s)| ds.
double kato_tail_bound(const PotentialSpec& v, double r_max) {
  if (v.support_radius() <= r_max) return 0.0;
  const int n = 2000;
  const double r_ext = r_max * 64.0;
  const double h = (std::log(r_ext) - std::log(r_max)) / n;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = std::exp(std::log(r_max) + (i + 0.5) * h);
    acc += 4.0 * M_PI * s * std::abs(v.eval_radius(s)) * s * h;  // ds = s dlog
  }
  return acc;
}

}  // namespace

double kato_norm(const PotentialSpec& v, const RadialGrid& grid) {
  if (!v.is_radial()) throw std::invalid_argument("radial kato_norm needs a radial potential");
  const auto absv = sample_abs(v, grid);
  double best = radial_probe_integral(absv, grid, 0.0, kUnbounded);
  for (double a : grid.r) best = std::max(best, radial_probe_integral(absv, grid, a, kUnbounded));
  return best;
}

double kato_norm(const PotentialSpec& v, const CartesianGrid& grid) {
  const std::size_t n = grid.size();
  std::vector<double> absv(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = grid.nodes[i];
    absv[i] = std::abs(v.eval_radius(std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2])));
  }
  const double w = grid.cell_volume();
  const double diag = kCubeNewtonIntegral * grid.h * grid.h;
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    const auto& xi = grid.nodes[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) {
        acc += absv[j] * diag;
        continue;
      }
      const auto& yj = grid.nodes[j];
      const double dx = xi[0] - yj[0], dy = xi[1] - yj[1], dz = xi[2] - yj[2];
      acc += absv[j] * w / std::sqrt(dx * dx + dy * dy + dz * dz);
    }
    best = std::max(best, acc);
  }
  return best;
}

std::vector<std::pair<double, double>> kato_modulus(const PotentialSpec& v,
                                                    const RadialGrid& grid,
                                                    const std::vector<double>& radii) {
  if (radii.empty()) return {};
  if (!std::is_sorted(radii.begin(), radii.end()) || radii.front() <= 0.0)
    throw std::invalid_argument("kato_modulus needs positive ascending radii");
  const auto absv = sample_abs(v, grid);
  std::vector<std::pair<double, double>> out;
  out.reserve(radii.size());
  for (double ball : radii) {
    double best = radial_probe_integral(absv, grid, 0.0, ball);
    for (double a : grid.r) best = std::max(best, radial_probe_integral(absv, grid, a, ball));
    out.emplace_back(ball, best);
  }
  return out;
}

std::vector<std::pair<double, double>> kato_modulus(const PotentialSpec& v,
                                                    const CartesianGrid& grid,
                                                    const std::vector<double>& radii) {
  if (radii.empty()) return {};
  if (!std::is_sorted(radii.begin(), radii.end()) || radii.front() <= 0.0)
    throw std::invalid_argument("kato_modulus needs positive ascending radii");
  const std::size_t n = grid.size();
  std::vector<double> absv(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = grid.nodes[i];
    absv[i] = std::abs(v.eval_radius(std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2])));
  }
  const double w = grid.cell_volume();
  const double diag = kCubeNewtonIntegral * grid.h * grid.h;
  std::vector<std::pair<double, double>> out;
  out.reserve(radii.size());
  for (double ball : radii) {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      const auto& xi = grid.nodes[i];
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) {
          acc += absv[j] * diag;  // own cell sits inside every ball radius
          continue;
        }
        const auto& yj = grid.nodes[j];
        const double dx = xi[0] - yj[0], dy = xi[1] - yj[1], dz = xi[2] - yj[2];
        const double rho = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (rho < ball) acc += absv[j] * w / rho;
      }
      best = std::max(best, acc);
    }
    out.emplace_back(ball, best);
  }
  return out;
}

KatoReport kato_report(const PotentialSpec& v, const RadialGrid& grid,
                       const std::vector<double>& radii, double class_tol) {
  KatoReport rep;
  rep.kato_norm = kato_norm(v, grid);
  rep.modulus_samples = kato_modulus(v, grid, radii);
  rep.class_verdict = !rep.modulus_samples.empty() && rep.modulus_samples.front().second < class_tol;
  const RadialGrid fine = make_radial_grid(grid.r_max, 2 * grid.size());
  const double refined = kato_norm(v, fine);
  rep.refinement_delta = refined - rep.kato_norm;
  rep.converged = std::abs(rep.refinement_delta) <= 0.05 * std::max(refined, 1e-12);
  rep.tail_bound = kato_tail_bound(v, grid.r_max);
  return rep;
}

LorentzResult lorentz_321_norm(const PotentialSpec& v, const RadialGrid& grid, double tail_tol) {
  // Layer cake: int_0^inf mu{|V|>s}^{2/3} ds over the cell decomposition,
  // optionally extended by log-spaced virtual cells to control truncation.
  std::vector<std::pair<double, double>> cells;  // (|V|, cell volume)
  cells.reserve(grid.size() + 256);
  for (std::size_t i = 0; i < grid.size(); ++i)
    cells.emplace_back(std::abs(v.eval_radius(grid.r[i])), grid.w[i]);

  auto layer_cake = [](std::vector<std::pair<double, double>>& c) {
    std::sort(c.begin(), c.end(), [](auto& a, auto& b) { return a.first > b.first; });
    double acc = 0.0, cum = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      cum += c[k].second;
      const double next = (k + 1 < c.size()) ? c[k + 1].first : 0.0;
      acc += std::pow(cum, 2.0 / 3.0) * (c[k].first - next);
    }
    return acc;
  };

  LorentzResult res;
  res.value = layer_cake(cells);

  if (v.support_radius() > grid.r_max) {
    auto ext = cells;
    const int m = 256;
    const double r_ext = grid.r_max * 64.0;
    const double h = (std::log(r_ext) - std::log(grid.r_max)) / m;
    for (int i = 0; i < m; ++i) {
      const double lo = std::exp(std::log(grid.r_max) + i * h);
      const double hi = std::exp(std::log(grid.r_max) + (i + 1) * h);
      const double mid = std::sqrt(lo * hi);
      ext.emplace_back(std::abs(v.eval_radius(mid)),
                       4.0 * M_PI / 3.0 * (hi * hi * hi - lo * lo * lo));
    }
    res.tail_bound = layer_cake(ext) - res.value;
    res.tail_flagged = res.tail_bound > tail_tol * std::max(res.value, 1e-300);
  }
  return res;
}

std::pair<PotentialSpec, PotentialSpec> split_potential(const PotentialSpec& v, double R) {
  return {v.truncated(R, true), v.truncated(R, false)};
}

HypothesisReport check_hypotheses(const PotentialSpec& v, double split_radius,
                                  const RadialGrid& grid) {
  HypothesisReport rep;
  rep.split_radius = split_radius;
  auto [v1, v2] = split_potential(v, split_radius);
  rep.v_kato = kato_norm(v, grid);
  rep.v1_kato = kato_norm(v1, grid);
  rep.v2_kato = kato_norm(v2, grid) + kato_tail_bound(v2, grid.r_max);
  rep.vminus_kato = kato_norm(v.negated_negative_part(), grid);

  const double four_pi = selfadjoint_threshold();
  const double c3 = kato_coupling_constant();

  rep.selfadjoint_margin = four_pi - rep.vminus_kato;
  rep.selfadjoint_ok = rep.selfadjoint_margin > 0.0;
  rep.compact_part_ok = std::isfinite(v1.support_radius()) && std::isfinite(rep.v1_kato);
  rep.smallness_value = rep.v2_kato * (1.0 + rep.v1_kato / four_pi);
  rep.smallness_ok = rep.smallness_value < four_pi;
  rep.negative_part_margin = c3 - rep.vminus_kato;
  rep.negative_part_ok = rep.negative_part_margin > 0.0;
  rep.decay_shape_a = v.decay_exponent() > 2.0 || std::isfinite(v.support_radius());
  rep.decay_shape_b = v.decay_exponent() > 1.0 || std::isfinite(v.support_radius());
  rep.heat_semigroup_ok = rep.vminus_kato < c3;
  rep.heat_kernel_ok = rep.vminus_kato < 0.5 * c3;
  return rep;
}

double mollify_distance(const PotentialSpec& v, double eps, const RadialGrid& grid) {
  // ||V_eps - V||_K on the grid; the difference is not single-signed, so the
  // integrand is sampled directly.
  const PotentialSpec veps = v.mollified(eps);
  std::vector<double> diff(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    diff[i] = std::abs(veps.eval_radius(grid.r[i]) - v.eval_radius(grid.r[i]));
  double best = 0.0;
  {
    double acc = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) acc += diff[j] * grid.w[j] / grid.r[j];
    best = acc;
  }
  for (double a : grid.r) {
    double acc = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double s = grid.r[j];
      acc += diff[j] * grid.w[j] / std::max(a, s);
    }
    best = std::max(best, acc);
  }
  return best;
}

}  // namespace wavelab::potential
