#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

namespace wavelab {

// Point lambda +/- i*eps in the spectral plane with branch bookkeeping.
struct SpectralPoint {
  double lambda = 0.0;
  double eps = 0.0;
  int branch = +1;  // +1 for lambda + i eps, -1 for lambda - i eps

  double lambda_eps() const;
  // Branch-consistent root: kernels carry exp(i*xi*|x-y|) with
  // xi = branch*sqrt(lambda_eps) + i*eps/(2*sqrt(lambda_eps)),
  // and xi = i*sqrt(-lambda) on the negative real axis.
  std::complex<double> xi() const;

  SpectralPoint conjugate() const { return {lambda, eps, -branch}; }
  std::complex<double> z() const { return {lambda, branch * eps}; }
};

double lambda_eps(double lambda, double eps);

// (sigma_max, sigma_min) through the spectrum of A^H A; accurate to the
// square root of machine precision, plenty for conditioning diagnostics.
std::pair<double, double> extreme_singular_values(const Eigen::MatrixXcd& a);

enum class NormTag { SupToSup, L1ToL1, L1ToLinf, WeightedL2 };

// Dense discretization of an integral operator: entries are kernel values
// times the quadrature weight of the source node, so apply() is plain
// matrix-vector. All operator norms are exact functions of the entries.
class KernelOperator {
 public:
  KernelOperator() = default;
  KernelOperator(Eigen::MatrixXcd entries, std::vector<double> weights, NormTag tag,
                 SpectralPoint z);

  const Eigen::MatrixXcd& entries() const { return entries_; }
  Eigen::MatrixXcd& entries() { return entries_; }
  const std::vector<double>& weights() const { return weights_; }
  NormTag norm_tag() const { return tag_; }
  const SpectralPoint& spectral_point() const { return z_; }

  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }
  std::complex<double> kernel(std::size_t i, std::size_t j) const {
    return entries_(i, j) / weights_[j];
  }

  double opnorm_sup_to_sup() const;   // max row sum of |entries|
  double opnorm_l1_to_l1() const;     // max_j sum_i |entries_ij| w_i / w_j
  double opnorm_l1_to_linf() const;   // max_ij |entries_ij| / w_j

  Eigen::VectorXcd apply(const Eigen::VectorXcd& f) const { return entries_ * f; }

  // Binary dump: row-major complex pairs, little-endian doubles, plus a JSON
  // sidecar holding dimensions, weights, spectral point and norm tag.
  void save(const std::string& path_base) const;
  static KernelOperator load(const std::string& path_base);

 private:
  Eigen::MatrixXcd entries_;
  std::vector<double> weights_;
  NormTag tag_ = NormTag::SupToSup;
  SpectralPoint z_;
};

}  // namespace wavelab
