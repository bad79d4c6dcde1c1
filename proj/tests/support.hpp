#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <papcbf/geometry.hpp>
#include <papcbf/linalg.hpp>
#include <papcbf/multicarrier.hpp>
#include <papcbf/single_carrier.hpp>

// Random instance generation for tests. Uses the standard library engine so
// that test inputs do not depend on the generator under test.
namespace support {

using namespace papcbf;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(eng_);
  }

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

  Complex cnormal(double variance = 1.0) {
    std::normal_distribution<double> nd(0.0, std::sqrt(variance / 2.0));
    return {nd(eng_), nd(eng_)};
  }

  Complex phasor() {
    const double a = uniform(0.0, 2.0 * std::numbers::pi);
    return {std::cos(a), std::sin(a)};
  }

  ComplexVector vector(Eigen::Index n, double variance = 1.0) {
    ComplexVector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = cnormal(variance);
    return x;
  }

  ComplexMatrix matrix(Eigen::Index rows, Eigen::Index cols, double variance = 1.0) {
    ComplexMatrix A(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) A(i, j) = cnormal(variance);
    return A;
  }

  ComplexMatrix psd(Eigen::Index n) {
    const ComplexMatrix B = matrix(n, n);
    return B.adjoint() * B;
  }

  PowerConstraints budgets(Eigen::Index n, double lo = 0.1, double hi = 1.0) {
    RealVector p(n);
    for (Eigen::Index i = 0; i < n; ++i) p[i] = uniform(lo, hi);
    return PowerConstraints(p);
  }

  NoiseCovariance noise(Eigen::Index m, double lo = 0.05, double hi = 0.5) {
    RealVector v(m);
    for (Eigen::Index i = 0; i < m; ++i) v[i] = uniform(lo, hi);
    return NoiseCovariance(v);
  }

  // Uniform over the feasible set's boundary-inclusive interior: |z_i| <= sqrt(p_i).
  ComplexVector feasible(const PowerConstraints& pc) {
    ComplexVector z(pc.size());
    for (Eigen::Index i = 0; i < pc.size(); ++i) {
      z[i] = std::sqrt(pc[i] * uniform()) * phasor();
    }
    return z;
  }

  CarrierWeights feasible_carriers(const PowerConstraints& pc, std::size_t K) {
    CarrierWeights Z(K, ComplexVector(pc.size()));
    for (Eigen::Index i = 0; i < pc.size(); ++i) {
      std::vector<double> share(K);
      double total = 0.0;
      for (auto& s : share) total += (s = uniform());
      const double used = pc[i] * uniform();
      for (std::size_t k = 0; k < K; ++k) {
        Z[k][i] = std::sqrt(used * share[k] / total) * phasor();
      }
    }
    return Z;
  }

  LinkInstance link(Eigen::Index m, Eigen::Index n) {
    return LinkInstance(matrix(m, n), noise(m), budgets(n));
  }

  MultiCarrierLink multicarrier(Eigen::Index m, Eigen::Index n, std::size_t K) {
    std::vector<ComplexMatrix> hs;
    for (std::size_t k = 0; k < K; ++k) hs.push_back(matrix(m, n));
    return MultiCarrierLink(std::move(hs), noise(m), budgets(n));
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

// ||g||_P scaled to the requested value.
inline ComplexVector with_p_norm(ComplexVector g, const PowerConstraints& pc, double target) {
  return g * (target / p_norm(g, pc));
}

// Direct evaluation of |g^H z|^2 - 2 Re(g^H z) written out elementwise.
inline double objective_oracle(const ComplexVector& z, const ComplexVector& g) {
  Complex inner = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) inner += std::conj(g[i]) * z[i];
  return std::norm(inner) - 2.0 * inner.real();
}

}  // namespace support
