#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <papcbf/geometry.hpp>
#include <papcbf/linalg.hpp>

namespace papcbf {

// One narrowband link: s_hat = w^H H z s + w^H n, unit symbol variance.
struct LinkInstance {
  ComplexMatrix H;  // m x n
  NoiseCovariance noise;
  PowerConstraints pc;

  LinkInstance() = default;
  LinkInstance(ComplexMatrix channel, NoiseCovariance n, PowerConstraints p)
      : H(std::move(channel)), noise(std::move(n)), pc(std::move(p)) {
    if (H.rows() != noise.size()) {
      throw std::invalid_argument("link: noise dimension does not match receive antennas");
    }
    if (H.cols() != pc.size()) {
      throw std::invalid_argument("link: budget dimension does not match transmit antennas");
    }
  }

  Eigen::Index transmitters() const { return H.cols(); }
  Eigen::Index receivers() const { return H.rows(); }
};

struct BeamformerPair {
  ComplexVector z;
  ComplexVector w;
  double mse = 1.0;
  // Objective after each full cycle; entry 0 is the initialization.
  std::vector<double> trace;
  // Objective after every half step (transmit update, receive update, ...).
  std::vector<double> half_step_trace;
  std::size_t iterations = 0;
  bool converged = false;
};

struct MaxGainPair {
  ComplexVector z;
  ComplexVector w;
  double gain = 0.0;
  std::vector<double> trace;
  std::vector<double> half_step_trace;
  std::size_t iterations = 0;
  bool converged = false;
};

enum class PrecoderCase {
  ActiveProjection,    // ||g||_P <= 1: z = [g]^P, all constraints active
  InactiveWeighted,    // min |g_i| >= 1 / sum sqrt(p_k)
  InactiveUniform,     // |g_i| >= 1 / (n sqrt(p_i)) for all i
  ScaledProjection,    // ||g||_P > 1 otherwise: z = [g]^P / ||g||_P
};

inline std::string_view to_string(PrecoderCase c) {
  switch (c) {
    case PrecoderCase::ActiveProjection: return "active_projection";
    case PrecoderCase::InactiveWeighted: return "inactive_weighted";
    case PrecoderCase::InactiveUniform: return "inactive_uniform";
    case PrecoderCase::ScaledProjection: return "scaled_projection";
  }
  return "unknown";
}

struct PrecoderSolution {
  ComplexVector z;
  RealVector lambda;
  PrecoderCase which = PrecoderCase::ActiveProjection;
};

struct GaussSeidelOptions {
  std::size_t max_iter = 500;
  double tol = 1e-10;
};

// |w^H H z - 1|^2 + w^H R_n w
inline double mse(const ComplexVector& z, const ComplexVector& w, const ComplexMatrix& H,
                  const NoiseCovariance& noise) {
  const Complex forward = w.dot(H * z);
  return std::norm(forward - 1.0) + noise.quadratic_form(w);
}

inline double mse(const ComplexVector& z, const ComplexVector& w, const LinkInstance& link) {
  return mse(z, w, link.H, link.noise);
}

inline ComplexVector mmse_combiner(const ComplexVector& z, const ComplexMatrix& H,
                                   const NoiseCovariance& noise) {
  const ComplexVector Hz = H * z;
  const ComplexVector whitened = noise.solve(Hz);
  const double snr = Hz.dot(whitened).real();
  return whitened / (1.0 + snr);
}

inline ComplexVector mmse_combiner(const ComplexVector& z, const LinkInstance& link) {
  return mmse_combiner(z, link.H, link.noise);
}

// z^H H^H R_n^{-1} H z
inline double post_combining_snr(const ComplexVector& z, const ComplexMatrix& H,
                                 const NoiseCovariance& noise) {
  const ComplexVector Hz = H * z;
  return Hz.dot(noise.solve(Hz)).real();
}

// MSE with the MMSE combiner for z: 1 / (1 + z^H H^H R_n^{-1} H z).
inline double resultant_mse(const ComplexVector& z, const ComplexMatrix& H,
                            const NoiseCovariance& noise) {
  return 1.0 / (1.0 + post_combining_snr(z, H, noise));
}

inline double resultant_mse(const ComplexVector& z, const LinkInstance& link) {
  return resultant_mse(z, link.H, link.noise);
}

// sqrt(p_T) times the dominant eigenvector of H^H R_n^{-1} H.
inline ComplexVector unconstrained_precoder(const LinkInstance& link) {
  const auto eig = dominant_eigenpair(whitened_gram(link.H, link.noise));
  return std::sqrt(link.pc.total()) * eig.vector;
}

// Transmit-side objective for fixed combiner: |g^H z|^2 - 2 Re(z^H g).
inline double transmit_objective(const ComplexVector& z, const ComplexVector& g) {
  const Complex a = g.dot(z);
  return std::norm(a) - 2.0 * a.real();
}

/*
 * Minimizes |g^H z|^2 - 2 Re(z^H g) subject to |z_i|^2 <= p_i.
 *
 * The four cases are tried in order. The first three are the closed forms with
 * active constraints (||g||_P <= 1) or with all constraints slack. The last
 * covers every remaining g with ||g||_P > 1: the scaled projection
 * [g]^P / ||g||_P is strictly feasible and reaches g^H z = 1, the unconstrained
 * minimum, so lambda = 0 certifies it.
 */
inline PrecoderSolution papc_mmse_precoder(const ComplexVector& g, const PowerConstraints& pc) {
  detail::check_dim(g.size(), pc, "papc_mmse_precoder");
  if (!g.allFinite()) {
    throw std::invalid_argument("papc_mmse_precoder: non-finite channel");
  }
  const Eigen::Index n = g.size();
  const RealVector mag = g.cwiseAbs();
  if (mag.maxCoeff() == 0.0) {
    throw std::domain_error("papc_mmse_precoder: zero MISO channel has no phase information");
  }
  const double norm_p = p_norm(g, pc);
  PrecoderSolution out;

  if (norm_p <= 1.0) {
    out.which = PrecoderCase::ActiveProjection;
    out.z = p_projection(g, pc);
    out.lambda = mag.cwiseQuotient(pc.sqrt_budgets()) * (1.0 - norm_p);
    return out;
  }

  const double sum_sqrt_p = pc.sqrt_budgets().sum();
  if (mag.minCoeff() >= 1.0 / sum_sqrt_p) {
    out.which = PrecoderCase::InactiveWeighted;
    out.z.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      out.z[i] = pc.sqrt_budgets()[i] / (sum_sqrt_p * std::conj(g[i]));
    }
    out.lambda = RealVector::Zero(n);
    return out;
  }

  bool uniform_ok = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (mag[i] < 1.0 / (double(n) * pc.sqrt_budgets()[i])) {
      uniform_ok = false;
      break;
    }
  }
  if (uniform_ok) {
    out.which = PrecoderCase::InactiveUniform;
    out.z.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      out.z[i] = 1.0 / (double(n) * std::conj(g[i]));
    }
    out.lambda = RealVector::Zero(n);
    return out;
  }

  out.which = PrecoderCase::ScaledProjection;
  out.z = p_projection(g, pc) / norm_p;
  out.lambda = RealVector::Zero(n);
  return out;
}

struct KktResiduals {
  RealVector stationarity;    // |lambda_i z_i - g_i (1 - g^H z)|
  RealVector primal;          // max(|z_i|^2 - p_i, 0)
  RealVector slackness;       // |lambda_i (|z_i|^2 - p_i)|
  RealVector dual;            // max(-lambda_i, 0)

  double max() const {
    return std::max({stationarity.maxCoeff(), primal.maxCoeff(), slackness.maxCoeff(),
                     dual.maxCoeff()});
  }
};

inline KktResiduals kkt_residuals(const ComplexVector& z, const RealVector& lambda,
                                  const ComplexVector& g, const PowerConstraints& pc) {
  detail::check_dim(z.size(), pc, "kkt_residuals");
  detail::check_dim(g.size(), pc, "kkt_residuals");
  detail::check_dim(lambda.size(), pc, "kkt_residuals");
  const Complex slack = 1.0 - g.dot(z);
  const RealVector excess = z.cwiseAbs2() - pc.budgets();
  KktResiduals r;
  r.stationarity = (lambda.cast<Complex>().cwiseProduct(z) - g * slack).cwiseAbs();
  r.primal = excess.cwiseMax(0.0);
  r.slackness = lambda.cwiseProduct(excess).cwiseAbs();
  r.dual = (-lambda).cwiseMax(0.0);
  return r;
}

// Marginal MSE reduction per watt of extra budget at z = [g]^P; needs ||g||_P <= 1.
inline RealVector shadow_prices(const ComplexVector& g, const PowerConstraints& pc) {
  const double norm_p = p_norm(g, pc);
  if (norm_p > 1.0) {
    throw std::domain_error("shadow_prices: requires ||g||_P <= 1");
  }
  return g.cwiseAbs().cwiseQuotient(pc.sqrt_budgets()) * (1.0 - norm_p);
}

// Joint optimum for a single receive antenna. The channel is the row h^T, noise
// variance sigma2; the receive phase is fixed at zero.
inline BeamformerPair miso_solution(const ComplexVector& h, double sigma2,
                                    const PowerConstraints& pc) {
  detail::check_dim(h.size(), pc, "miso_solution");
  if (!(sigma2 > 0.0)) {
    throw std::domain_error("miso_solution: noise variance must be positive");
  }
  if (h.cwiseAbs().maxCoeff() == 0.0) {
    throw std::domain_error("miso_solution: zero channel");
  }
  const double hp = p_norm(h, pc);
  BeamformerPair out;
  out.w = ComplexVector::Constant(1, Complex(hp / (sigma2 + hp * hp), 0.0));
  out.z = p_projection(h.conjugate(), pc);
  out.mse = sigma2 / (sigma2 + hp * hp);
  out.trace = {out.mse};
  out.converged = true;
  return out;
}

/*
 * Alternating MMSE design: z <- [H^H w]^P, w <- MMSE combiner for z, starting from
 * z = [zeta]^P with zeta the dominant eigenvector of H^H R_n^{-1} H.
 *
 * When ||H^H w||_P > 1 the projection is optimal for the rescaled combiner
 * w / ||H^H w||_P rather than for w; the half-step trace records the MSE with that
 * rescaled combiner, which is the value the transmit update guarantees not to
 * increase. The combiner itself is never rescaled.
 */
inline BeamformerPair gauss_seidel_mmse(const LinkInstance& link,
                                        const GaussSeidelOptions& opts = {}) {
  const auto eig = dominant_eigenpair(whitened_gram(link.H, link.noise));
  BeamformerPair out;
  out.z = p_projection(eig.vector, link.pc);
  out.w = mmse_combiner(out.z, link);
  out.mse = resultant_mse(out.z, link);
  out.trace.push_back(out.mse);
  out.half_step_trace.push_back(out.mse);

  for (std::size_t it = 0; it < opts.max_iter; ++it) {
    const ComplexVector g = link.H.adjoint() * out.w;
    ComplexVector z = p_projection(g, link.pc);
    const double scale = std::max(1.0, p_norm(g, link.pc));
    out.half_step_trace.push_back(mse(z, out.w / scale, link));

    ComplexVector w = mmse_combiner(z, link);
    const double value = resultant_mse(z, link);
    out.half_step_trace.push_back(value);
    out.trace.push_back(value);

    const double delta = std::abs(out.mse - value);
    out.z = std::move(z);
    out.w = std::move(w);
    out.mse = value;
    out.iterations = it + 1;
    if (delta < opts.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

// |w^H H z|^2
inline double gain(const ComplexVector& z, const ComplexVector& w, const ComplexMatrix& H) {
  return std::norm(w.dot(H * z));
}

// Hz / ||Hz||_2
inline ComplexVector mrc_combiner(const ComplexVector& z, const ComplexMatrix& H) {
  const ComplexVector Hz = H * z;
  const double norm = Hz.norm();
  if (norm == 0.0) {
    throw std::domain_error("mrc_combiner: H z is zero");
  }
  return Hz / norm;
}

inline ComplexVector papc_maxgain_precoder(const ComplexVector& w, const ComplexMatrix& H,
                                           const PowerConstraints& pc) {
  return p_projection(H.adjoint() * w, pc);
}

// Alternates the projected transmit update and MRC, starting from the dominant
// left singular vector of H. Convergence is relative: |delta gain| < tol * max(1, gain).
inline MaxGainPair gauss_seidel_maxgain(const ComplexMatrix& H, const PowerConstraints& pc,
                                        const GaussSeidelOptions& opts = {}) {
  if (H.cols() != pc.size()) {
    throw std::invalid_argument("gauss_seidel_maxgain: budget dimension mismatch");
  }
  if (H.cwiseAbs().maxCoeff() == 0.0) {
    throw std::domain_error("gauss_seidel_maxgain: zero channel");
  }
  const ComplexMatrix HHh = H * H.adjoint();
  MaxGainPair out;
  out.w = dominant_eigenpair(0.5 * (HHh + HHh.adjoint())).vector;
  out.z = papc_maxgain_precoder(out.w, H, pc);
  out.gain = gain(out.z, out.w, H);
  out.trace.push_back(out.gain);
  out.half_step_trace.push_back(out.gain);

  for (std::size_t it = 0; it < opts.max_iter; ++it) {
    ComplexVector w = mrc_combiner(out.z, H);
    out.half_step_trace.push_back(gain(out.z, w, H));
    ComplexVector z = papc_maxgain_precoder(w, H, pc);
    const double value = gain(z, w, H);
    out.half_step_trace.push_back(value);
    out.trace.push_back(value);

    const double delta = std::abs(value - out.gain);
    out.z = std::move(z);
    out.w = std::move(w);
    out.gain = value;
    out.iterations = it + 1;
    if (delta < opts.tol * std::max(1.0, value)) {
      out.converged = true;
      break;
    }
  }
  // Leave w matched to the final z.
  out.w = mrc_combiner(out.z, H);
  out.gain = gain(out.z, out.w, H);
  return out;
}

}  // namespace papcbf
