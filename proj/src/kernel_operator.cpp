#include "wavelab/kernel_operator.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace wavelab {

double lambda_eps(double lambda, double eps) {
  return 0.5 * (lambda + std::hypot(lambda, eps));
}

double SpectralPoint::lambda_eps() const { return wavelab::lambda_eps(lambda, eps); }

std::pair<double, double> extreme_singular_values(const Eigen::MatrixXcd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.adjoint() * a,
                                                     Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double lo = std::sqrt(std::max(0.0, ev(0)));
  const double hi = std::sqrt(std::max(0.0, ev(ev.size() - 1)));
  return {hi, lo};
}

std::complex<double> SpectralPoint::xi() const {
  if (eps == 0.0) {
    if (lambda >= 0.0) return {branch * std::sqrt(lambda), 0.0};
    return {0.0, std::sqrt(-lambda)};
  }
  const double le = lambda_eps();
  const double root = std::sqrt(le);
  return {branch * root, 0.5 * eps / root};
}

KernelOperator::KernelOperator(Eigen::MatrixXcd entries, std::vector<double> weights,
                               NormTag tag, SpectralPoint z)
    : entries_(std::move(entries)), weights_(std::move(weights)), tag_(tag), z_(z) {
  if (entries_.rows() != entries_.cols() ||
      static_cast<std::size_t>(entries_.rows()) != weights_.size())
    throw std::invalid_argument("kernel operator needs a square matrix over the grid");
}

double KernelOperator::opnorm_sup_to_sup() const {
  double best = 0.0;
  for (Eigen::Index i = 0; i < entries_.rows(); ++i)
    best = std::max(best, entries_.row(i).cwiseAbs().sum());
  return best;
}

double KernelOperator::opnorm_l1_to_l1() const {
  double best = 0.0;
  for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < entries_.rows(); ++i)
      acc += std::abs(entries_(i, j)) * weights_[i];
    best = std::max(best, acc / weights_[j]);
  }
  return best;
}

double KernelOperator::opnorm_l1_to_linf() const {
  double best = 0.0;
  for (Eigen::Index j = 0; j < entries_.cols(); ++j)
    best = std::max(best, entries_.col(j).cwiseAbs().maxCoeff() / weights_[j]);
  return best;
}

namespace {
const char* tag_name(NormTag t) {
  switch (t) {
    case NormTag::SupToSup: return "sup-to-sup";
    case NormTag::L1ToL1: return "l1-to-l1";
    case NormTag::L1ToLinf: return "l1-to-linf";
    case NormTag::WeightedL2: return "weighted-l2";
  }
  return "unknown";
}

NormTag tag_from_name(const std::string& s) {
  if (s == "sup-to-sup") return NormTag::SupToSup;
  if (s == "l1-to-l1") return NormTag::L1ToL1;
  if (s == "l1-to-linf") return NormTag::L1ToLinf;
  if (s == "weighted-l2") return NormTag::WeightedL2;
  throw std::invalid_argument("unknown norm tag: " + s);
}
}  // namespace

void KernelOperator::save(const std::string& path_base) const {
  {
    std::ofstream bin(path_base + ".bin", std::ios::binary);
    if (!bin) throw std::runtime_error("cannot write " + path_base + ".bin");
    for (Eigen::Index i = 0; i < entries_.rows(); ++i)
      for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
        const double re = entries_(i, j).real(), im = entries_(i, j).imag();
        bin.write(reinterpret_cast<const char*>(&re), sizeof(double));
        bin.write(reinterpret_cast<const char*>(&im), sizeof(double));
      }
  }
  nlohmann::json j;
  j["rows"] = entries_.rows();
  j["cols"] = entries_.cols();
  j["weights"] = weights_;
  j["norm_tag"] = tag_name(tag_);
  j["spectral_point"] = {{"lambda", z_.lambda}, {"eps", z_.eps}, {"branch", z_.branch}};
  j["layout"] = "row-major complex<double> pairs, little-endian";
  std::ofstream side(path_base + ".json");
  side << j.dump(2) << "\n";
}

KernelOperator KernelOperator::load(const std::string& path_base) {
  std::ifstream side(path_base + ".json");
  if (!side) throw std::runtime_error("cannot read " + path_base + ".json");
  nlohmann::json j;
  side >> j;
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  std::vector<double> weights = j.at("weights").get<std::vector<double>>();
  SpectralPoint z{j["spectral_point"]["lambda"].get<double>(),
                  j["spectral_point"]["eps"].get<double>(),
                  j["spectral_point"]["branch"].get<int>()};
  Eigen::MatrixXcd m(rows, cols);
  std::ifstream bin(path_base + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot read " + path_base + ".bin");
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index jj = 0; jj < cols; ++jj) {
      double re = 0.0, im = 0.0;
      bin.read(reinterpret_cast<char*>(&re), sizeof(double));
      bin.read(reinterpret_cast<char*>(&im), sizeof(double));
      m(i, jj) = {re, im};
    }
  return KernelOperator(std::move(m), std::move(weights),
                        tag_from_name(j.at("norm_tag").get<std::string>()), z);
}

}  // namespace wavelab
