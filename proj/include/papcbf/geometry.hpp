#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <papcbf/linalg.hpp>

namespace papcbf {

inline constexpr double kFeasibilityTol = 1e-9;

// Per-antenna transmit power budgets p_i (watts).
class PowerConstraints {
 public:
  PowerConstraints() = default;

  explicit PowerConstraints(RealVector p) : p_(std::move(p)) {
    if (p_.size() == 0) {
      throw std::invalid_argument("power constraints: empty budget vector");
    }
    for (Eigen::Index i = 0; i < p_.size(); ++i) {
      if (!(p_[i] > 0.0) || !std::isfinite(p_[i])) {
        throw std::domain_error("power constraints: budget " + std::to_string(i) +
                                " must be finite and strictly positive");
      }
    }
    total_ = p_.sum();
    sqrt_p_ = p_.cwiseSqrt();
  }

  static PowerConstraints uniform(Eigen::Index n, double p = 1.0) {
    return PowerConstraints(RealVector::Constant(n, p));
  }

  Eigen::Index size() const { return p_.size(); }
  const RealVector& budgets() const { return p_; }
  const RealVector& sqrt_budgets() const { return sqrt_p_; }
  double operator[](Eigen::Index i) const { return p_[i]; }
  double total() const { return total_; }

  PowerConstraints scaled(double factor) const { return PowerConstraints(p_ * factor); }

 private:
  RealVector p_;
  RealVector sqrt_p_;
  double total_ = 0.0;
};

namespace detail {

inline void check_dim(Eigen::Index got, const PowerConstraints& pc, const char* what) {
  if (got != pc.size()) {
    throw std::invalid_argument(std::string(what) + ": dimension " + std::to_string(got) +
                                " does not match " + std::to_string(pc.size()) + " antennas");
  }
}

// Unit phasor of x; a zero component gets phase 0.
inline Complex unit_phasor(Complex x) {
  const double mag = std::abs(x);
  return mag > 0.0 ? x / mag : Complex(1.0, 0.0);
}

}  // namespace detail

// Closest point to x on the set {z : |z_i| = sqrt(p_i)}: keeps the phases of x
// and replaces the magnitudes.
inline ComplexVector p_projection(const ComplexVector& x, const PowerConstraints& pc) {
  detail::check_dim(x.size(), pc, "p_projection");
  ComplexVector z(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    z[i] = pc.sqrt_budgets()[i] * detail::unit_phasor(x[i]);
  }
  return z;
}

// sum_i sqrt(p_i) |x_i|
inline double p_norm(const ComplexVector& x, const PowerConstraints& pc) {
  detail::check_dim(x.size(), pc, "p_norm");
  return (pc.sqrt_budgets().array() * x.array().abs()).sum();
}

// p_i - |z_i|^2; negative entries mark violated antennas.
inline RealVector feasibility_margins(const ComplexVector& z, const PowerConstraints& pc) {
  detail::check_dim(z.size(), pc, "feasibility_margins");
  return pc.budgets() - z.cwiseAbs2();
}

// p_i - sum_k |z_{i,k}|^2
inline RealVector multicarrier_margins(std::span<const ComplexVector> Z,
                                       const PowerConstraints& pc) {
  RealVector used = RealVector::Zero(pc.size());
  for (const auto& z : Z) {
    detail::check_dim(z.size(), pc, "multicarrier_margins");
    used += z.cwiseAbs2();
  }
  return pc.budgets() - used;
}

inline bool is_feasible(const RealVector& margins, double tol = kFeasibilityTol) {
  return margins.size() == 0 || margins.minCoeff() >= -tol;
}

}  // namespace papcbf
