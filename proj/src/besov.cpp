#include "wavelab/besov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wavelab/kato.hpp"

namespace wavelab::besov {

namespace {
double glue(double u) {  // 0 for u <= 0, 1 for u >= 1, smooth in between
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}
}  // namespace

double smooth_cutoff(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  return glue(2.0 - r);
}

double DyadicPartition::phi(int j, double r) const {
  const double u = std::ldexp(r, -j);  // 2^{-j} r
  return psi(u) - psi(2.0 * u);
}

double DyadicPartition::phi_tilde(int j, double r) const {
  return phi(j - 1, r) + phi(j, r) + phi(j + 1, r);
}

double DyadicPartition::psi0(double r) const { return psi(2.0 * r); }

double DyadicPartition::partition_sum(double r) const {
  double acc = 0.0;
  for (int j = j_min; j <= j_max; ++j) acc += phi(j, r);
  return acc;
}

std::vector<int> DyadicPartition::range() const {
  std::vector<int> out;
  for (int j = j_min; j <= j_max; ++j) out.push_back(j);
  return out;
}

DyadicPartition build_partition(int j_min, int j_max) {
  if (j_min >= j_max) throw std::invalid_argument("partition needs j_min < j_max");
  return DyadicPartition{j_min, j_max};
}

DyadicPartition partition_for_grid(double spacing, double r_max) {
  const int j_max = static_cast<int>(std::floor(std::log2(M_PI / spacing))) - 1;
  // the telescoped family sums to 1 on [2^{j_min}, 2^{j_max}]; flooring keeps
  // the lowest Dirichlet mode sqrt(mu_0) = pi/r_max inside that band
  const int j_min = static_cast<int>(std::floor(std::log2(M_PI / r_max)));
  return build_partition(j_min, j_max);
}

double BesovProfile::norm() const {
  const bool inf_q = !std::isfinite(q);
  double acc = 0.0;
  for (const auto& [j, c] : coefficients) {
    const double weighted = std::pow(2.0, j * s) * c;
    if (inf_q)
      acc = std::max(acc, weighted);
    else
      acc += std::pow(weighted, q);
  }
  double base = inf_q ? acc : std::pow(acc, 1.0 / q);
  if (!homogeneous) {
    if (inf_q)
      base = std::max(base, psi0_block);
    else
      base = std::pow(std::pow(base, q) + std::pow(psi0_block, q), 1.0 / q);
  }
  return base;
}

BesovProfile besov_norm(const DiscreteHamiltonian& h, const Eigen::VectorXd& f, double s,
                        double q, const DyadicPartition& part, bool homogeneous) {
  BesovProfile prof;
  prof.s = s;
  prof.q = q;
  prof.homogeneous = homogeneous;
  prof.j_min = part.j_min;
  prof.j_max = part.j_max;

  const int lo = homogeneous ? part.j_min : 0;
  for (int j = lo; j <= part.j_max; ++j) {
    const Eigen::VectorXd block = h.apply(
        [&](double mu) { return part.phi(j, std::sqrt(std::max(0.0, mu))); }, f);
    prof.coefficients.emplace_back(j, h.discrete_l1(block));
  }
  if (!homogeneous) {
    const Eigen::VectorXd low = h.apply(
        [&](double mu) { return part.psi0(std::sqrt(std::max(0.0, mu))); }, f);
    prof.psi0_block = h.discrete_l1(low);
  }

  double total = 0.0, edges = 0.0;
  for (const auto& [j, c] : prof.coefficients) {
    total += c;
    if (j == part.j_min || j == part.j_max) edges += c;
  }
  prof.edge_fraction = total > 0.0 ? edges / total : 0.0;
  prof.edge_flagged = prof.edge_fraction > 0.01;
  return prof;
}

EquivalenceScan equivalence_ratio(const RadialGrid& grid, const potential::PotentialSpec& v,
                                  const std::vector<Eigen::VectorXd>& test_set, double s,
                                  double q, const std::vector<double>& thetas) {
  EquivalenceScan scan;
  scan.thetas = thetas;
  const double vminus = potential::kato_norm(v.negated_negative_part(), grid);
  scan.hypothesis_ok = vminus < 0.5 * potential::kato_coupling_constant();
  if (!scan.hypothesis_ok) return scan;
  if (s <= 0.0 || s >= 2.0)
    throw std::invalid_argument("homogeneous equivalence scan needs 0 < s < 2");

  const DyadicPartition part = partition_for_grid(grid.dr, grid.r_max);
  const DiscreteHamiltonian free_h =
      DiscreteHamiltonian::radial(grid, potential::PotentialSpec::zero());
  std::vector<double> free_norms;
  free_norms.reserve(test_set.size());
  for (const auto& f : test_set)
    free_norms.push_back(besov_norm(free_h, f, s, q, part).norm());

  scan.c_low = std::numeric_limits<double>::infinity();
  scan.c_high = 0.0;
  for (double theta : thetas) {
    const DiscreteHamiltonian h = DiscreteHamiltonian::radial(grid, v.rescaled(theta));
    std::vector<double> row;
    for (std::size_t m = 0; m < test_set.size(); ++m) {
      const double pert = besov_norm(h, test_set[m], s, q, part).norm();
      const double ratio = pert / free_norms[m];
      row.push_back(ratio);
      scan.c_low = std::min(scan.c_low, ratio);
      scan.c_high = std::max(scan.c_high, ratio);
    }
    scan.ratios.push_back(std::move(row));
  }
  return scan;
}

RescaleCheck rescale_check(const RadialGrid& grid, const potential::PotentialSpec& v,
                           const std::function<double(double)>& radial_datum, double s,
                           double q, int k, const DyadicPartition& part) {
  RescaleCheck chk;
  const double lambda = std::ldexp(1.0, k);

  Eigen::VectorXd f(grid.size()), f_scaled(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    f(i) = radial_datum(grid.r[i]);
    f_scaled(i) = radial_datum(lambda * grid.r[i]);
  }

  const DiscreteHamiltonian h_v = DiscreteHamiltonian::radial(grid, v);
  const DiscreteHamiltonian h_resc =
      DiscreteHamiltonian::radial(grid, v.rescaled(1.0 / (lambda * lambda)));

  // Shift the block window with the rescaling so both sides use blocks that
  // the grid resolves.
  DyadicPartition left = part;
  const BesovProfile lhs = besov_norm(h_v, f_scaled, s, q, left);
  const BesovProfile rhs = besov_norm(h_resc, f, s, q, part);
  chk.lhs = lhs.norm();
  chk.rhs = std::pow(lambda, s - 3.0) * rhs.norm();
  chk.resolved = !lhs.edge_flagged && !rhs.edge_flagged;
  chk.residual = std::abs(chk.lhs - chk.rhs) / std::max(chk.rhs, 1e-300);
  return chk;
}

}  // namespace wavelab::besov
