#pragma once

#include <array>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace wavelab::potential {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

// Symbolic description of a potential V on R^3, evaluable at any point.
// Profiles:
//   ball_well      V(x) = depth              for |x| < radius, else 0
//   gaussian       V(x) = amplitude * exp(-|x|^2 / width^2)
//   inverse_decay  V(x) = c / (|x|^{2+eps} + |x|^{2-eps})
//   sum            V = sum of children
//   truncated      V = child * indicator{|x| < R}   (or the complement)
//   rescaled       V(x) = theta * child(sqrt(theta) x)
//   mollified      V = child * rho_eps, rho the canonical radial bump
class PotentialSpec {
 public:
  enum class Kind { BallWell, Gaussian, InverseDecay, Sum, Truncated, Rescaled, Mollified };

  static PotentialSpec ball_well(double radius, double depth);
  static PotentialSpec gaussian(double width, double amplitude);
  static PotentialSpec inverse_decay(double c, double eps);
  static PotentialSpec sum(std::vector<PotentialSpec> parts);
  static PotentialSpec zero();  // empty sum

  Kind kind() const { return kind_; }
  bool is_radial() const { return is_radial_; }
  double support_radius() const { return support_radius_; }  // kUnbounded if none
  double decay_exponent() const { return decay_exponent_; }  // declared large-|x| power of |V|

  double operator()(const std::array<double, 3>& x) const { return eval_radius(norm3(x)); }
  // Radial evaluation; valid only when is_radial() (all catalog kinds are).
  double eval_radius(double r) const;

  double positive_part(double r) const { double v = eval_radius(r); return v > 0.0 ? v : 0.0; }
  double negative_part(double r) const { double v = eval_radius(r); return v < 0.0 ? -v : 0.0; }

  PotentialSpec negated_negative_part() const;  // spec for V_- = max(-V, 0)
  PotentialSpec absolute_part() const;          // spec for |V|

  // V restricted to {|x| < R} (inside=true) or its complement.
  PotentialSpec truncated(double R, bool inside) const;
  // V_theta(x) = theta * V(sqrt(theta) x).
  PotentialSpec rescaled(double theta) const;
  PotentialSpec mollified(double eps) const;

  // Scale amplitude: returns spec of a*V. Only used by tests and hypothesis scans.
  PotentialSpec scaled_amplitude(double a) const;

  const std::vector<PotentialSpec>& children() const { return children_; }
  double param(std::size_t i) const { return params_[i]; }

  std::string describe() const;

 private:
  PotentialSpec() = default;
  static double norm3(const std::array<double, 3>& x);

  Kind kind_ = Kind::Sum;
  std::array<double, 4> params_{};  // meaning depends on kind
  std::vector<PotentialSpec> children_;
  bool is_radial_ = true;
  double support_radius_ = 0.0;
  double decay_exponent_ = kUnbounded;
};

// Canonical mollifier rho(x) = c * exp(-1/(1-|x|^2)) on |x|<1, int rho = 1.
double mollifier_value(double r);
double mollifier_normalization();

// Catalog entry: {"kind": "ball-well", "radius": 1.0, "depth": -0.4, ...}.
PotentialSpec load_spec_json(const std::string& text);

}  // namespace wavelab::potential
