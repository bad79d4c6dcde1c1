#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace papcbf {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// Diagonal receiver noise covariance. Only the (real, positive) variances are
// stored; receivers are uncorrelated.
class NoiseCovariance {
 public:
  NoiseCovariance() = default;

  explicit NoiseCovariance(RealVector variances) : variances_(std::move(variances)) {
    if (variances_.size() == 0) {
      throw std::invalid_argument("noise covariance: empty");
    }
    for (Eigen::Index j = 0; j < variances_.size(); ++j) {
      if (!(variances_[j] > 0.0) || !std::isfinite(variances_[j])) {
        throw std::domain_error("noise covariance: variance " + std::to_string(j) +
                                " must be finite and strictly positive");
      }
    }
  }

  static NoiseCovariance identity(Eigen::Index m) {
    return NoiseCovariance(RealVector::Ones(m));
  }

  // Accepts a dense matrix as long as it is diagonal with a real positive diagonal.
  static NoiseCovariance from_matrix(const ComplexMatrix& R) {
    if (R.rows() != R.cols()) {
      throw std::invalid_argument("noise covariance: matrix must be square");
    }
    RealVector v(R.rows());
    for (Eigen::Index i = 0; i < R.rows(); ++i) {
      for (Eigen::Index j = 0; j < R.cols(); ++j) {
        if (i != j && R(i, j) != Complex(0.0)) {
          throw std::invalid_argument("noise covariance: matrix must be diagonal");
        }
      }
      if (R(i, i).imag() != 0.0) {
        throw std::domain_error("noise covariance: diagonal must be real");
      }
      v[i] = R(i, i).real();
    }
    return NoiseCovariance(std::move(v));
  }

  Eigen::Index size() const { return variances_.size(); }
  const RealVector& variances() const { return variances_; }
  double operator[](Eigen::Index j) const { return variances_[j]; }

  ComplexMatrix dense() const { return variances_.cast<Complex>().asDiagonal(); }

  // R_n^{-1} x
  ComplexVector solve(const ComplexVector& x) const {
    return (x.array() / variances_.array().cast<Complex>()).matrix();
  }

  // x^H R_n x
  double quadratic_form(const ComplexVector& x) const {
    return (x.array().abs2() * variances_.array()).sum();
  }

 private:
  RealVector variances_;
};

struct HermitianEigenResult {
  double value = 0.0;
  ComplexVector vector;
  std::size_t iterations = 0;
  bool converged = false;
};

namespace detail {

inline double hermitian_asymmetry(const ComplexMatrix& A) {
  const double scale = std::max(A.cwiseAbs().maxCoeff(), 1.0);
  return (A - A.adjoint()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace detail

// Rotates x so that its first nonzero component is real and positive.
inline void canonicalize_phase(ComplexVector& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double mag = std::abs(x[i]);
    if (mag > 0.0) {
      x *= std::conj(x[i]) / mag;
      x[i] = Complex(mag, 0.0);
      return;
    }
  }
}

/*
 * Largest eigenvalue and a unit eigenvector of a Hermitian PSD matrix by power
 * iteration from the normalized all-ones vector. Iteration stops once
 * ||A v - s v||_2 <= tol * trace(A). If the start vector lies in the null space of
 * A the iteration is restarted from e_1, e_2, ... in turn.
 */
inline HermitianEigenResult dominant_eigenpair(const ComplexMatrix& A, double tol = 1e-10,
                                               std::size_t max_iter = 10000) {
  if (A.rows() != A.cols() || A.rows() == 0) {
    throw std::invalid_argument("dominant_eigenpair: matrix must be square and nonempty");
  }
  if (!A.allFinite()) {
    throw std::invalid_argument("dominant_eigenpair: non-finite entries");
  }
  if (detail::hermitian_asymmetry(A) > 1e-10) {
    throw std::invalid_argument("dominant_eigenpair: matrix is not Hermitian");
  }
  const Eigen::Index n = A.rows();
  const double trace = A.diagonal().real().sum();

  HermitianEigenResult out;
  if (A.cwiseAbs().maxCoeff() == 0.0) {
    out.vector = ComplexVector::Unit(n, 0);
    out.converged = true;
    return out;
  }
  const double threshold = tol * std::max(trace, 0.0);

  for (Eigen::Index start = -1; start < n; ++start) {
    ComplexVector v = start < 0 ? ComplexVector(ComplexVector::Ones(n) / std::sqrt(double(n)))
                                : ComplexVector(ComplexVector::Unit(n, start));
    ComplexVector Av = A * v;
    if (Av.norm() == 0.0) {
      continue;
    }
    double value = 0.0;
    std::size_t it = 0;
    bool converged = false;
    for (; it < max_iter; ++it) {
      value = v.dot(Av).real();
      if ((Av - value * v).norm() <= threshold) {
        converged = true;
        break;
      }
      const double norm = Av.norm();
      if (norm == 0.0) {
        break;
      }
      v = Av / norm;
      Av.noalias() = A * v;
    }
    canonicalize_phase(v);
    out.value = std::max(value, 0.0);
    out.vector = std::move(v);
    out.iterations = it;
    out.converged = converged;
    return out;
  }
  // Unreachable for a nonzero Hermitian matrix: some e_i has A e_i != 0.
  out.vector = ComplexVector::Unit(n, 0);
  return out;
}

// H^H R_n^{-1} H
inline ComplexMatrix whitened_gram(const ComplexMatrix& H, const NoiseCovariance& noise) {
  if (H.rows() != noise.size()) {
    throw std::invalid_argument("whitened_gram: noise dimension does not match channel rows");
  }
  const RealVector inv = noise.variances().cwiseInverse();
  ComplexMatrix out = H.adjoint() * inv.cast<Complex>().asDiagonal() * H;
  // Exact Hermitian symmetry.
  out = (0.5 * (out + out.adjoint())).eval();
  return out;
}

// x~ = [Re x; Im x]
inline RealVector real_embedding(const ComplexVector& x) {
  RealVector out(2 * x.size());
  out << x.real(), x.imag();
  return out;
}

// A~ = [[Re A, -Im A], [Im A, Re A]]
inline RealMatrix real_embedding(const ComplexMatrix& A) {
  const Eigen::Index r = A.rows();
  const Eigen::Index c = A.cols();
  RealMatrix out(2 * r, 2 * c);
  out.topLeftCorner(r, c) = A.real();
  out.topRightCorner(r, c) = -A.imag();
  out.bottomLeftCorner(r, c) = A.imag();
  out.bottomRightCorner(r, c) = A.real();
  return out;
}

}  // namespace papcbf
