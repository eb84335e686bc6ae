#pragma once

#include <array>
#include <complex>
#include <vector>

#include "wavelab/grids.hpp"
#include "wavelab/kernel_operator.hpp"
#include "wavelab/potential.hpp"

namespace wavelab::resolvent {

using potential::PotentialSpec;

// Point value of the free resolvent kernel (1/4pi) e^{i xi |x-y|}/|x-y|.
// Throws for x == y; assembly routines use cell-averaged weights there.
std::complex<double> free_kernel(const std::array<double, 3>& x,
                                 const std::array<double, 3>& y, const SpectralPoint& z);

// Angular reduction of the free kernel to radial functions:
// k(r,s) = e^{i xi r_>} sin(xi r_<) / (4 pi xi r s), finite on the diagonal.
std::complex<double> radial_free_kernel(double r, double s, const SpectralPoint& z);

// Largest lambda the grid can resolve under the ten-points-per-wavelength
// rule; assembly refuses beyond it.
double lambda_resolution_cap(double spacing);

KernelOperator assemble_R0(const RadialGrid& grid, const SpectralPoint& z);
KernelOperator assemble_R0(const CartesianGrid& grid, const SpectralPoint& z);

KernelOperator assemble_R0V(const RadialGrid& grid, const PotentialSpec& v,
                            const SpectralPoint& z);
KernelOperator assemble_VR0(const RadialGrid& grid, const PotentialSpec& v,
                            const SpectralPoint& z);
KernelOperator assemble_R0V(const CartesianGrid& grid, const PotentialSpec& v,
                            const SpectralPoint& z);
KernelOperator assemble_VR0(const CartesianGrid& grid, const PotentialSpec& v,
                            const SpectralPoint& z);

// Square of the free resolvent, kernel (1/(8 pi xi)) e^{i xi |x-y|}; requires
// (lambda, eps) != (0,0).
KernelOperator assemble_R0_squared(const RadialGrid& grid, const SpectralPoint& z);
KernelOperator assemble_R0_squared(const CartesianGrid& grid, const SpectralPoint& z);

// R0(lambda + i eps) - R0(lambda - i eps): kernel
// (i/2pi) sin(sqrt(lambda_eps)|x-y|) e^{-eps|x-y|/2 sqrt(lambda_eps)}/|x-y|,
// finite diagonal value i sqrt(lambda_eps)/(2 pi).
KernelOperator spectral_measure_free(const RadialGrid& grid, double lambda, double eps);
KernelOperator spectral_measure_free(const CartesianGrid& grid, double lambda, double eps);

struct NegativeAxisFit {
  std::vector<std::pair<double, double>> samples;  // (lambda, sup-norm of R0(lambda)V)
  double delta = 0.0;    // fitted offset
  double c_delta = 0.0;  // fitted coefficient of 1/sqrt(|lambda|)
};

// Sup-norm of R0(lambda)V on a negative-lambda grid with the
// delta + C/sqrt(|lambda|) envelope fitted by least squares.
NegativeAxisFit negative_axis_diagnostic(const RadialGrid& grid, const PotentialSpec& v,
                                         const std::vector<double>& lambdas);

// Norm of <x>^{-s} R0(lambda +/- i eps) <x>^{-s} on the weighted discrete L2
// pairing (largest singular value after symmetrizing by the volume weights).
double weighted_resolvent_norm(const RadialGrid& grid, const SpectralPoint& z, double s);

}  // namespace wavelab::resolvent
