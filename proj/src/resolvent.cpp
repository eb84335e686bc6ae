#include "wavelab/resolvent.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace wavelab::resolvent {

namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

void check_resolution(double spacing, const SpectralPoint& z) {
  const double le = z.lambda_eps();
  if (le <= 0.0) return;
  const double required = 2.0 * M_PI / std::sqrt(le) / 10.0;
  if (spacing > required) {
    std::ostringstream os;
    os << "grid spacing " << spacing << " does not resolve the oscillation at lambda_eps="
       << le << "; need spacing <= " << required;
    throw std::invalid_argument(os.str());
  }
}

std::vector<double> sample_potential(const PotentialSpec& v, const RadialGrid& g) {
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = v.eval_radius(g.r[i]);
  return out;
}

}  // namespace

double lambda_resolution_cap(double spacing) {
  const double root = 2.0 * M_PI / (10.0 * spacing);
  return root * root;
}

std::complex<double> free_kernel(const std::array<double, 3>& x,
                                 const std::array<double, 3>& y, const SpectralPoint& z) {
  const double dx = x[0] - y[0], dy = x[1] - y[1], dz = x[2] - y[2];
  const double rho = std::sqrt(dx * dx + dy * dy + dz * dz);
  if (rho == 0.0) throw std::invalid_argument("free kernel is singular at x == y");
  return std::exp(kI * z.xi() * rho) / (4.0 * M_PI * rho);
}

std::complex<double> radial_free_kernel(double r, double s, const SpectralPoint& z) {
  const cplx xi = z.xi();
  const double hi = std::max(r, s), lo = std::min(r, s);
  if (std::abs(xi) * hi < 1e-12) return cplx{1.0 / (4.0 * M_PI * hi), 0.0};
  if (lo == 0.0) return std::exp(kI * xi * hi) / (4.0 * M_PI * hi);
  // e^{i xi r>} sin(xi r<)/xi written through the two boundary exponentials;
  // both have modulus <= 1 for Im xi >= 0, so nothing overflows on the
  // negative axis. The gap factor switches to a series when it cancels.
  const double u = hi + lo, l = hi - lo;
  const cplx gap = kI * xi * (u - l);
  cplx expm1_gap;
  if (std::abs(gap) < 1e-5) {
    expm1_gap = gap * (1.0 + 0.5 * gap * (1.0 + gap / 3.0));
  } else {
    expm1_gap = std::exp(gap) - 1.0;
  }
  return std::exp(kI * xi * l) * expm1_gap / (2.0 * kI * xi) / (4.0 * M_PI * r * s);
}

KernelOperator assemble_R0(const RadialGrid& grid, const SpectralPoint& z) {
  check_resolution(grid.dr, z);
  const std::size_t n = grid.size();
  Eigen::MatrixXcd m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(i, j) = radial_free_kernel(grid.r[i], grid.r[j], z) * grid.w[j];
  return KernelOperator(std::move(m), grid.w, NormTag::SupToSup, z);
}

KernelOperator assemble_R0(const CartesianGrid& grid, const SpectralPoint& z) {
  check_resolution(grid.h, z);
  const std::size_t n = grid.size();
  const double w = grid.cell_volume();
  const cplx xi = z.xi();
  // Diagonal: exact cell integral of 1/rho plus the first oscillation term.
  const cplx diag = (kCubeNewtonIntegral * grid.h * grid.h + kI * xi * w) / (4.0 * M_PI);
  Eigen::MatrixXcd m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        m(i, j) = diag;
        continue;
      }
      m(i, j) = free_kernel(grid.nodes[i], grid.nodes[j], z) * w;
    }
  }
  return KernelOperator(std::move(m), std::vector<double>(n, w), NormTag::SupToSup, z);
}

KernelOperator assemble_R0V(const RadialGrid& grid, const PotentialSpec& v,
                            const SpectralPoint& z) {
  KernelOperator op = assemble_R0(grid, z);
  const auto vals = sample_potential(v, grid);
  for (std::size_t j = 0; j < grid.size(); ++j) op.entries().col(j) *= vals[j];
  return op;
}

KernelOperator assemble_VR0(const RadialGrid& grid, const PotentialSpec& v,
                            const SpectralPoint& z) {
  KernelOperator op = assemble_R0(grid, z);
  const auto vals = sample_potential(v, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) op.entries().row(i) *= vals[i];
  return op;
}

KernelOperator assemble_R0V(const CartesianGrid& grid, const PotentialSpec& v,
                            const SpectralPoint& z) {
  KernelOperator op = assemble_R0(grid, z);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto& p = grid.nodes[j];
    op.entries().col(j) *= v.eval_radius(std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]));
  }
  return op;
}

KernelOperator assemble_VR0(const CartesianGrid& grid, const PotentialSpec& v,
                            const SpectralPoint& z) {
  KernelOperator op = assemble_R0(grid, z);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& p = grid.nodes[i];
    op.entries().row(i) *= v.eval_radius(std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]));
  }
  return op;
}

namespace {

// Angular average of e^{i xi rho} between radii r and s:
// (2 r s)^{-1} int_{|r-s|}^{r+s} e^{i xi rho} rho d rho.
cplx angular_mean_exp(double r, double s, cplx xi) {
  const double u = r + s, l = std::abs(r - s);
  if (r == 0.0 || s == 0.0) return std::exp(kI * xi * std::max(r, s));
  if (std::abs(xi) * (u - l) < 1e-4) {
    const double mid = 0.5 * (u + l);
    const double gap = u - l;
    const cplx ix = kI * xi;
    return std::exp(ix * mid) * (1.0 + (ix * ix + 2.0 * ix / mid) * gap * gap / 24.0);
  }
  const cplx ix = kI * xi;
  auto F = [&](double rho) { return std::exp(ix * rho) * (rho / ix - 1.0 / (ix * ix)); };
  return (F(u) - F(l)) / (2.0 * r * s);
}

}  // namespace

KernelOperator assemble_R0_squared(const RadialGrid& grid, const SpectralPoint& z) {
  if (z.lambda == 0.0 && z.eps == 0.0)
    throw std::invalid_argument("squared resolvent undefined at (lambda, eps) = (0, 0)");
  check_resolution(grid.dr, z);
  const cplx xi = z.xi();
  // d/dz of the free kernel: i e^{i xi rho} / (8 pi xi), xi the branch root
  const cplx pref = kI / (8.0 * M_PI * xi);
  const std::size_t n = grid.size();
  Eigen::MatrixXcd m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(i, j) = pref * angular_mean_exp(grid.r[i], grid.r[j], xi) * grid.w[j];
  return KernelOperator(std::move(m), grid.w, NormTag::L1ToLinf, z);
}

KernelOperator assemble_R0_squared(const CartesianGrid& grid, const SpectralPoint& z) {
  if (z.lambda == 0.0 && z.eps == 0.0)
    throw std::invalid_argument("squared resolvent undefined at (lambda, eps) = (0, 0)");
  check_resolution(grid.h, z);
  const cplx xi = z.xi();
  const cplx pref = kI / (8.0 * M_PI * xi);
  const std::size_t n = grid.size();
  const double w = grid.cell_volume();
  Eigen::MatrixXcd m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto& a = grid.nodes[i];
      const auto& b = grid.nodes[j];
      const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
      const double rho = std::sqrt(dx * dx + dy * dy + dz * dz);
      m(i, j) = pref * std::exp(kI * xi * rho) * w;
    }
  return KernelOperator(std::move(m), std::vector<double>(n, w), NormTag::L1ToLinf, z);
}

namespace {

// Angular average of sin(beta rho) e^{-c rho} / rho between radii r and s.
cplx spectral_measure_kernel(double r, double s, double beta, double c) {
  if (beta == 0.0) return 0.0;
  const cplx e{-c, beta};  // exponent slope: e^{(i beta - c) rho} has Im = sin part
  if (r == 0.0 || s == 0.0) {
    const double hi = std::max(r, s);
    if (hi == 0.0) return kI * beta / (2.0 * M_PI);
    return kI / (2.0 * M_PI) * std::imag(std::exp(e * hi)) / hi;
  }
  const double u = r + s, l = std::abs(r - s);
  // int_l^u Im[e^{e rho}] d rho = Im[(e^{e u} - e^{e l})/e]
  const double integral = std::imag((std::exp(e * u) - std::exp(e * l)) / e);
  return kI / (2.0 * M_PI) * integral / (2.0 * r * s);
}

}  // namespace

KernelOperator spectral_measure_free(const RadialGrid& grid, double lambda, double eps) {
  const SpectralPoint zp{lambda, eps, +1};
  const double le = zp.lambda_eps();
  const std::size_t n = grid.size();
  if (le == 0.0) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    return KernelOperator(std::move(m), grid.w, NormTag::L1ToLinf, zp);
  }
  check_resolution(grid.dr, zp);
  const double beta = std::sqrt(le);
  const double c = eps > 0.0 ? 0.5 * eps / beta : 0.0;
  Eigen::MatrixXcd m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(i, j) = spectral_measure_kernel(grid.r[i], grid.r[j], beta, c) * grid.w[j];
  return KernelOperator(std::move(m), grid.w, NormTag::L1ToLinf, zp);
}

KernelOperator spectral_measure_free(const CartesianGrid& grid, double lambda, double eps) {
  const SpectralPoint zp{lambda, eps, +1};
  const double le = zp.lambda_eps();
  const std::size_t n = grid.size();
  const double w = grid.cell_volume();
  if (le == 0.0) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    return KernelOperator(std::move(m), std::vector<double>(n, w), NormTag::L1ToLinf, zp);
  }
  check_resolution(grid.h, zp);
  const double beta = std::sqrt(le);
  const double c = eps > 0.0 ? 0.5 * eps / beta : 0.0;
  Eigen::MatrixXcd m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        m(i, j) = kI * beta / (2.0 * M_PI) * w;  // finite diagonal limit
        continue;
      }
      const auto& a = grid.nodes[i];
      const auto& b = grid.nodes[j];
      const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
      const double rho = std::sqrt(dx * dx + dy * dy + dz * dz);
      m(i, j) = kI / (2.0 * M_PI) * std::sin(beta * rho) * std::exp(-c * rho) / rho * w;
    }
  return KernelOperator(std::move(m), std::vector<double>(n, w), NormTag::L1ToLinf, zp);
}

NegativeAxisFit negative_axis_diagnostic(const RadialGrid& grid, const PotentialSpec& v,
                                         const std::vector<double>& lambdas) {
  NegativeAxisFit fit;
  for (double lambda : lambdas) {
    if (lambda >= 0.0) throw std::invalid_argument("negative-axis diagnostic needs lambda < 0");
    const KernelOperator op = assemble_R0V(grid, v, SpectralPoint{lambda, 0.0, +1});
    fit.samples.emplace_back(lambda, op.opnorm_sup_to_sup());
  }
  // Least squares on the basis {1, 1/sqrt(|lambda|)} with nonnegative clamp.
  double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
  for (const auto& [lambda, norm] : fit.samples) {
    const double g = 1.0 / std::sqrt(-lambda);
    s11 += 1.0;
    s12 += g;
    s22 += g * g;
    b1 += norm;
    b2 += norm * g;
  }
  const double det = s11 * s22 - s12 * s12;
  if (det > 0.0) {
    fit.delta = (b1 * s22 - b2 * s12) / det;
    fit.c_delta = (s11 * b2 - s12 * b1) / det;
  }
  if (fit.delta < 0.0) {
    fit.delta = 0.0;
    fit.c_delta = s22 > 0.0 ? b2 / s22 : 0.0;
  }
  if (fit.c_delta < 0.0) {
    fit.c_delta = 0.0;
    fit.delta = s11 > 0.0 ? b1 / s11 : 0.0;
  }
  return fit;
}

double weighted_resolvent_norm(const RadialGrid& grid, const SpectralPoint& z, double s) {
  if (s <= 0.5) throw std::invalid_argument("weighted resolvent bound needs s > 1/2");
  KernelOperator op = assemble_R0(grid, z);
  const std::size_t n = grid.size();
  Eigen::MatrixXcd m = op.entries();
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = std::pow(1.0 + grid.r[i] * grid.r[i], -0.5 * s);
    m.row(i) *= wi;
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double wj = std::pow(1.0 + grid.r[j] * grid.r[j], -0.5 * s);
    m.col(j) *= wj;
  }
  // Symmetrize by the volume weights so the plain 2-norm is the weighted one.
  for (std::size_t i = 0; i < n; ++i) m.row(i) *= std::sqrt(grid.w[i]);
  for (std::size_t j = 0; j < n; ++j) m.col(j) /= std::sqrt(grid.w[j]);
  return extreme_singular_values(m).first;
}

}  // namespace wavelab::resolvent
