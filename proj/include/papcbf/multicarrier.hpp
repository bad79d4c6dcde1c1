#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Cholesky>

#include <papcbf/geometry.hpp>
#include <papcbf/linalg.hpp>
#include <papcbf/single_carrier.hpp>

namespace papcbf {

using CarrierWeights = std::vector<ComplexVector>;

// K narrowband links sharing noise statistics and per-antenna budgets; the
// budget of antenna i bounds its power summed over carriers.
struct MultiCarrierLink {
  std::vector<ComplexMatrix> channels;
  NoiseCovariance noise;
  PowerConstraints pc;

  MultiCarrierLink() = default;
  MultiCarrierLink(std::vector<ComplexMatrix> hs, NoiseCovariance n, PowerConstraints p)
      : channels(std::move(hs)), noise(std::move(n)), pc(std::move(p)) {
    if (channels.empty()) {
      throw std::invalid_argument("multicarrier link: needs at least one carrier");
    }
    for (const auto& H : channels) {
      if (H.rows() != channels.front().rows() || H.cols() != channels.front().cols()) {
        throw std::invalid_argument("multicarrier link: carriers have different dimensions");
      }
    }
    if (channels.front().rows() != noise.size()) {
      throw std::invalid_argument("multicarrier link: noise dimension mismatch");
    }
    if (channels.front().cols() != pc.size()) {
      throw std::invalid_argument("multicarrier link: budget dimension mismatch");
    }
  }

  std::size_t carriers() const { return channels.size(); }
  Eigen::Index transmitters() const { return pc.size(); }
  Eigen::Index receivers() const { return noise.size(); }
};

// Thrown when a Lagrangian has no finite minimizer.
class UnboundedDirection : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {

inline void check_lambda(const RealVector& lambda, Eigen::Index n, const char* what) {
  if (lambda.size() != n) {
    throw std::invalid_argument(std::string(what) + ": multiplier dimension mismatch");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(lambda[i] >= 0.0) || !std::isfinite(lambda[i])) {
      throw std::domain_error(std::string(what) + ": multipliers must be finite and nonnegative");
    }
  }
}

inline Eigen::Index carrier_dim(std::span<const ComplexVector> G) {
  if (G.empty()) {
    throw std::invalid_argument("multicarrier: no carriers");
  }
  for (const auto& g : G) {
    if (g.size() != G.front().size()) {
      throw std::invalid_argument("multicarrier: carriers have different dimensions");
    }
  }
  return G.front().size();
}

// Real-valued view of the multicarrier dual: only |g_{k,i}|^2 matters in the
// interior of the orthant.
class DualEvaluator {
 public:
  DualEvaluator(std::span<const ComplexVector> G, const PowerConstraints& pc)
      : p_(pc.budgets()) {
    const Eigen::Index n = carrier_dim(G);
    check_dim(n, pc, "dual");
    gains_.resize(n, Eigen::Index(G.size()));
    for (std::size_t k = 0; k < G.size(); ++k) {
      gains_.col(Eigen::Index(k)) = G[k].cwiseAbs2();
    }
  }

  // Interior only (all lambda_i > 0).
  double value(const RealVector& lambda) const {
    const RealVector s = gains_.transpose() * lambda.cwiseInverse();
    return -(s.array() / (1.0 + s.array())).sum() - lambda.dot(p_);
  }

  double value_and_gradient(const RealVector& lambda, RealVector& gradient) const {
    const RealVector inv = lambda.cwiseInverse();
    const RealVector s = gains_.transpose() * inv;
    const RealVector weight = (1.0 + s.array()).square().inverse().matrix();
    gradient = (gains_ * weight).cwiseProduct(inv.cwiseAbs2()) - p_;
    return -(s.array() / (1.0 + s.array())).sum() - lambda.dot(p_);
  }

  // Negated Hessian of d (positive semidefinite on the open orthant).
  RealMatrix negative_hessian(const RealVector& lambda) const {
    const RealVector inv = lambda.cwiseInverse();
    const RealVector s = gains_.transpose() * inv;
    const RealVector c2 = (1.0 + s.array()).square().inverse().matrix();
    const RealVector c3 = (1.0 + s.array()).cube().inverse().matrix();
    const RealMatrix scaled = inv.cwiseAbs2().asDiagonal() * gains_;  // a_ik / lambda_i^2
    RealMatrix out = -2.0 * scaled * c3.asDiagonal() * scaled.transpose();
    out.diagonal() += 2.0 * (gains_ * c2).cwiseProduct(inv.array().cube().matrix());
    return out;
  }

 private:
  RealMatrix gains_;  // n x K
  RealVector p_;
};

}  // namespace detail

/*
 * Minimizers of the Lagrangian sum_k z_k^H (g_k g_k^H + Lambda) z_k - 2 Re(z_k^H g_k).
 *
 * Interior: z_k = Lambda^{-1} g_k / (1 + g_k^H Lambda^{-1} g_k).
 * Boundary: for the first index q with lambda_q = 0 and g_{k,q} != 0,
 * z_k = e_q / conj(g_{k,q}). When g_k vanishes on every zero-multiplier index the
 * carrier does not see those coordinates; they are set to zero and the interior
 * formula is applied to the rest.
 */
inline CarrierWeights lagrangian_minimizers(const RealVector& lambda,
                                            std::span<const ComplexVector> G) {
  const Eigen::Index n = detail::carrier_dim(G);
  detail::check_lambda(lambda, n, "lagrangian_minimizers");
  CarrierWeights Z;
  Z.reserve(G.size());
  for (const auto& g : G) {
    ComplexVector z = ComplexVector::Zero(n);
    Eigen::Index pivot = -1;
    for (Eigen::Index q = 0; q < n; ++q) {
      if (lambda[q] == 0.0 && g[q] != Complex(0.0)) {
        pivot = q;
        break;
      }
    }
    if (pivot >= 0) {
      z[pivot] = 1.0 / std::conj(g[pivot]);
    } else {
      double s = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (lambda[i] > 0.0) {
          z[i] = g[i] / lambda[i];
          s += std::norm(g[i]) / lambda[i];
        }
      }
      z /= (1.0 + s);
    }
    if (!z.allFinite()) {
      throw UnboundedDirection("lagrangian_minimizers: no finite minimizer");
    }
    Z.push_back(std::move(z));
  }
  return Z;
}

// d(lambda) = inf_Z L(Z, lambda).
inline double dual_value(const RealVector& lambda, std::span<const ComplexVector> G,
                         const PowerConstraints& pc) {
  const Eigen::Index n = detail::carrier_dim(G);
  detail::check_dim(n, pc, "dual_value");
  detail::check_lambda(lambda, n, "dual_value");
  if (lambda.minCoeff() > 0.0) {
    return detail::DualEvaluator(G, pc).value(lambda);
  }
  double value = -lambda.dot(pc.budgets());
  for (const auto& g : G) {
    bool pinned = false;
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (lambda[i] == 0.0) {
        pinned = pinned || g[i] != Complex(0.0);
      } else {
        s += std::norm(g[i]) / lambda[i];
      }
    }
    value -= pinned ? 1.0 : s / (1.0 + s);
  }
  return value;
}

// Gradient of d on the open orthant: sum_k |z*_{i,k}|^2 - p_i.
inline RealVector dual_gradient(const RealVector& lambda, std::span<const ComplexVector> G,
                                const PowerConstraints& pc) {
  const Eigen::Index n = detail::carrier_dim(G);
  detail::check_dim(n, pc, "dual_gradient");
  detail::check_lambda(lambda, n, "dual_gradient");
  if (!(lambda.minCoeff() > 0.0)) {
    throw std::domain_error("dual_gradient: dual is not differentiable on the orthant boundary");
  }
  RealVector gradient;
  detail::DualEvaluator(G, pc).value_and_gradient(lambda, gradient);
  return gradient;
}

// sum_k |g_k^H z_k|^2 - 2 Re(z_k^H g_k)
inline double multicarrier_transmit_objective(std::span<const ComplexVector> Z,
                                              std::span<const ComplexVector> G) {
  if (Z.size() != G.size()) {
    throw std::invalid_argument("multicarrier objective: carrier count mismatch");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < Z.size(); ++k) {
    total += transmit_objective(Z[k], G[k]);
  }
  return total;
}

enum class DualStep {
  // Projected Newton: Newton direction on the multipliers off the floor,
  // Armijo backtracking along the projection arc, gradient step as fallback.
  Newton,
  // Plain projected gradient, lambda <- [lambda + alpha grad d]^+.
  Gradient,
};

// KKT residuals of the multicarrier transmit problem. Stationarity is the largest
// |lambda_i z_{i,k} - g_{i,k} (1 - g_k^H z_k)| over carriers for each antenna.
inline KktResiduals multicarrier_kkt_residuals(std::span<const ComplexVector> Z,
                                               const RealVector& lambda,
                                               std::span<const ComplexVector> G,
                                               const PowerConstraints& pc) {
  if (Z.size() != G.size()) {
    throw std::invalid_argument("multicarrier_kkt_residuals: carrier count mismatch");
  }
  const Eigen::Index n = pc.size();
  detail::check_dim(lambda.size(), pc, "multicarrier_kkt_residuals");
  KktResiduals r;
  r.stationarity = RealVector::Zero(n);
  for (std::size_t k = 0; k < Z.size(); ++k) {
    const Complex slack = 1.0 - G[k].dot(Z[k]);
    r.stationarity = r.stationarity.cwiseMax(
        (lambda.cast<Complex>().cwiseProduct(Z[k]) - G[k] * slack).cwiseAbs());
  }
  const RealVector excess = -multicarrier_margins(Z, pc);
  r.primal = excess.cwiseMax(0.0);
  r.slackness = lambda.cwiseProduct(excess).cwiseAbs();
  r.dual = (-lambda).cwiseMax(0.0);
  return r;
}

struct DualOptions {
  DualStep step = DualStep::Newton;
  std::optional<RealVector> lambda0;  // defaults to K / p_T on every antenna
  std::size_t max_dual_iterations = 200;
  double grad_tol = -1.0;             // <= 0 selects 1e-9 * p_T
  double lambda_floor = 1e-12;
  double armijo = 1e-4;
  double shrink = 0.5;
  std::size_t max_backtracks = 40;
  double inactive_below = 1e-8;
};

enum class DualStatus { Converged, MaxIterations, LineSearchStalled };

inline std::string_view to_string(DualStatus s) {
  switch (s) {
    case DualStatus::Converged: return "converged";
    case DualStatus::MaxIterations: return "max_iterations";
    case DualStatus::LineSearchStalled: return "line_search_stalled";
  }
  return "unknown";
}

struct DualState {
  RealVector lambda;
  double value = 0.0;
  RealVector gradient;
  CarrierWeights Z;  // Lagrangian minimizers at lambda, before any repair
};

struct DualSolveResult {
  CarrierWeights Z;  // feasible precoders
  DualState state;
  RealVector pre_repair_margins;
  std::vector<bool> active;  // multiplier above the inactive threshold
  double primal_value = 0.0;
  double dual_gap = 0.0;
  double projected_gradient_norm = 0.0;
  std::size_t iterations = 0;
  DualStatus status = DualStatus::MaxIterations;
};

// Scales every antenna whose summed power exceeds its budget back onto the
// budget, uniformly across carriers.
inline void rescale_to_budget(CarrierWeights& Z, const PowerConstraints& pc) {
  const RealVector used = pc.budgets() - multicarrier_margins(Z, pc);
  for (Eigen::Index i = 0; i < pc.size(); ++i) {
    if (used[i] > pc[i]) {
      const double factor = std::sqrt(pc[i] / used[i]);
      for (auto& z : Z) {
        z[i] *= factor;
      }
    }
  }
}

/*
 * Maximizes the dual function over the nonnegative orthant by projected
 * gradient ascent with a backtracking (Armijo) line search along the projection
 * arc, then recovers the precoders from the final multipliers.
 *
 * Multipliers are kept at or above lambda_floor so the dual stays differentiable.
 * A truncated ascent can leave the recovered precoders slightly over budget;
 * those antennas are rescaled onto their budget and the margins before repair
 * are reported.
 */
inline DualSolveResult solve_papc_precoders(std::span<const ComplexVector> G,
                                            const PowerConstraints& pc,
                                            const DualOptions& opts = {}) {
  const Eigen::Index n = detail::carrier_dim(G);
  detail::check_dim(n, pc, "solve_papc_precoders");
  bool any_nonzero = false;
  for (const auto& g : G) {
    if (!g.allFinite()) {
      throw std::invalid_argument("solve_papc_precoders: non-finite channel");
    }
    any_nonzero = any_nonzero || g.cwiseAbs().maxCoeff() > 0.0;
  }
  if (!any_nonzero) {
    throw std::domain_error("solve_papc_precoders: all MISO channels are zero");
  }
  const double K = double(G.size());
  const double grad_tol = opts.grad_tol > 0.0 ? opts.grad_tol : 1e-9 * pc.total();
  const double floor = opts.lambda_floor;

  RealVector lambda = opts.lambda0 ? *opts.lambda0 : RealVector::Constant(n, K / pc.total());
  detail::check_lambda(lambda, n, "solve_papc_precoders");
  lambda = lambda.cwiseMax(floor);

  const detail::DualEvaluator dual(G, pc);
  RealVector gradient;
  double value = dual.value_and_gradient(lambda, gradient);

  auto projected_norm = [&](const RealVector& lam, const RealVector& grad) {
    double norm = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (lam[i] > floor || grad[i] > 0.0) {
        norm = std::max(norm, std::abs(grad[i]));
      }
    }
    return norm;
  };

  // Newton direction on the free set {lambda_i > floor or grad_i > 0}; zero
  // elsewhere. False when the reduced Hessian is not usable.
  auto newton_direction = [&](const RealVector& lam, const RealVector& grad, RealVector& dir) {
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (lam[i] > floor || grad[i] > 0.0) free.push_back(i);
    }
    if (free.empty()) return false;
    const RealMatrix full = dual.negative_hessian(lam);
    const Eigen::Index f = Eigen::Index(free.size());
    RealMatrix reduced(f, f);
    RealVector rhs(f);
    for (Eigen::Index a = 0; a < f; ++a) {
      rhs[a] = grad[free[std::size_t(a)]];
      for (Eigen::Index b = 0; b < f; ++b) {
        reduced(a, b) = full(free[std::size_t(a)], free[std::size_t(b)]);
      }
    }
    if (!reduced.allFinite()) return false;
    const Eigen::LDLT<RealMatrix> ldlt(reduced);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return false;
    const RealVector step = ldlt.solve(rhs);
    if (!step.allFinite() || step.dot(rhs) <= 0.0) return false;
    dir.setZero();
    for (Eigen::Index a = 0; a < f; ++a) dir[free[std::size_t(a)]] = step[a];
    return true;
  };

  // Armijo backtracking from alpha = 1 along lambda(alpha) = [lambda + alpha dir]^+.
  double candidate_value = value;
  auto try_step = [&](const RealVector& dir, RealVector& candidate) {
    double alpha = 1.0;
    for (std::size_t bt = 0; bt <= opts.max_backtracks; ++bt) {
      candidate = (lambda + alpha * dir).cwiseMax(floor);
      candidate_value = dual.value(candidate);
      const double predicted = gradient.dot(candidate - lambda);
      if (predicted > 0.0 && candidate_value >= value + opts.armijo * predicted) {
        return true;
      }
      alpha *= opts.shrink;
    }
    return false;
  };

  DualSolveResult out;
  out.status = DualStatus::MaxIterations;
  std::size_t it = 0;
  for (; it < opts.max_dual_iterations; ++it) {
    if (projected_norm(lambda, gradient) < grad_tol) {
      out.status = DualStatus::Converged;
      break;
    }
    RealVector direction = gradient;
    bool newton = false;
    if (opts.step == DualStep::Newton) {
      newton = newton_direction(lambda, gradient, direction);
    }
    RealVector candidate(n);
    bool accepted = try_step(direction, candidate);
    if (!accepted && newton) {
      direction = gradient;
      accepted = try_step(direction, candidate);
    }
    if (!accepted) {
      out.status = DualStatus::LineSearchStalled;
      break;
    }
    lambda = std::move(candidate);
    value = dual.value_and_gradient(lambda, gradient);
  }
  if (out.status == DualStatus::MaxIterations && projected_norm(lambda, gradient) < grad_tol) {
    out.status = DualStatus::Converged;
  }

  out.iterations = it;
  out.projected_gradient_norm = projected_norm(lambda, gradient);
  out.state.lambda = lambda;
  out.state.value = value;
  out.state.gradient = gradient;
  out.state.Z = lagrangian_minimizers(lambda, G);
  out.active.resize(std::size_t(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    out.active[std::size_t(i)] = lambda[i] >= opts.inactive_below;
  }

  out.Z = out.state.Z;
  out.pre_repair_margins = multicarrier_margins(out.Z, pc);
  rescale_to_budget(out.Z, pc);
  out.primal_value = multicarrier_transmit_objective(out.Z, G);
  out.dual_gap = out.primal_value - value;
  return out;
}

inline CarrierWeights mmse_combiners(const MultiCarrierLink& link, std::span<const ComplexVector> Z) {
  CarrierWeights W;
  W.reserve(Z.size());
  for (std::size_t k = 0; k < Z.size(); ++k) {
    W.push_back(mmse_combiner(Z[k], link.channels[k], link.noise));
  }
  return W;
}

inline RealVector per_carrier_mse(const MultiCarrierLink& link, std::span<const ComplexVector> Z,
                                  std::span<const ComplexVector> W) {
  RealVector out(static_cast<Eigen::Index>(Z.size()));
  for (std::size_t k = 0; k < Z.size(); ++k) {
    out[Eigen::Index(k)] = mse(Z[k], W[k], link.channels[k], link.noise);
  }
  return out;
}

// Sum-MSE when every carrier uses its MMSE combiner.
inline double sum_resultant_mse(const MultiCarrierLink& link, std::span<const ComplexVector> Z) {
  double total = 0.0;
  for (std::size_t k = 0; k < Z.size(); ++k) {
    total += resultant_mse(Z[k], link.channels[k], link.noise);
  }
  return total;
}

// z_k = K^{-1/2} [zeta_k]^P with zeta_k the dominant eigenvector of H_k^H R_n^{-1} H_k.
inline CarrierWeights projected_eigenvector_precoders(const MultiCarrierLink& link) {
  const double scale = 1.0 / std::sqrt(double(link.carriers()));
  CarrierWeights Z;
  Z.reserve(link.carriers());
  for (const auto& H : link.channels) {
    const auto eig = dominant_eigenpair(whitened_gram(H, link.noise));
    Z.push_back(scale * p_projection(eig.vector, link.pc));
  }
  return Z;
}

struct CyclicOptions {
  std::size_t max_cyclic_iterations = 20;
  DualOptions dual{};
  // Stop early once |delta sum-MSE| falls below tol; 0 runs every cycle.
  double tol = 0.0;
};

struct MultiCarrierSolution {
  CarrierWeights Z;
  CarrierWeights W;
  double sum_mse = 0.0;
  RealVector per_carrier_mse;
  double dual_gap = 0.0;
  // Sum-MSE with MMSE combiners; entry 0 is the initialization.
  std::vector<double> trace;
  std::vector<std::size_t> dual_iterations;
  std::vector<double> dual_gaps;
  CarrierWeights G;  // effective MISO channels of the last cycle
  DualSolveResult last_dual;
};

/*
 * Cyclic multicarrier precoder/combiner design. Starts from the equal-power
 * projected eigenvectors, then per cycle: MMSE combiners for every carrier,
 * effective MISO channels g_k = H_k^H w_k, and the precoders from the dual
 * solver (multipliers restart from lambda0 every cycle). The returned
 * combiners are the MMSE combiners of the final precoders.
 */
inline MultiCarrierSolution cyclic_multicarrier(const MultiCarrierLink& link,
                                                const CyclicOptions& opts = {}) {
  MultiCarrierSolution out;
  out.Z = projected_eigenvector_precoders(link);
  out.trace.push_back(sum_resultant_mse(link, out.Z));

  CarrierWeights G(link.carriers());
  for (std::size_t i = 0; i < opts.max_cyclic_iterations; ++i) {
    const CarrierWeights W = mmse_combiners(link, out.Z);
    for (std::size_t k = 0; k < link.carriers(); ++k) {
      G[k] = link.channels[k].adjoint() * W[k];
    }
    out.last_dual = solve_papc_precoders(G, link.pc, opts.dual);
    out.G = G;
    out.Z = out.last_dual.Z;
    out.dual_iterations.push_back(out.last_dual.iterations);
    out.dual_gaps.push_back(out.last_dual.dual_gap);
    const double value = sum_resultant_mse(link, out.Z);
    const double delta = std::abs(out.trace.back() - value);
    out.trace.push_back(value);
    if (opts.tol > 0.0 && delta < opts.tol) {
      break;
    }
  }
  out.W = mmse_combiners(link, out.Z);
  out.per_carrier_mse = per_carrier_mse(link, out.Z, out.W);
  out.sum_mse = out.per_carrier_mse.sum();
  out.dual_gap = out.last_dual.dual_gap;
  return out;
}

struct CarrierPairs {
  CarrierWeights Z;
  CarrierWeights W;
};

// Single-carrier Gauss-Seidel on every carrier with budgets p_i / K.
inline CarrierPairs percarrier_cyclic_precoders(const MultiCarrierLink& link,
                                                const GaussSeidelOptions& opts = {}) {
  const PowerConstraints share = link.pc.scaled(1.0 / double(link.carriers()));
  CarrierPairs out;
  for (const auto& H : link.channels) {
    auto pair = gauss_seidel_mmse(LinkInstance(H, link.noise, share), opts);
    out.Z.push_back(std::move(pair.z));
    out.W.push_back(std::move(pair.w));
  }
  return out;
}

/*
 * Power split q >= 0, sum q = p_T, minimizing sum_k 1 / (1 + q_k sigma_k).
 * KKT gives q_k = max(0, (mu sigma_k)^{-1/2} - 1 / sigma_k); mu is bracketed and
 * bisected, then recomputed in closed form on the resulting active set.
 */
inline RealVector water_filling_mse(const RealVector& sigma, double p_total) {
  if (!(p_total > 0.0)) {
    throw std::domain_error("water_filling_mse: total power must be positive");
  }
  if (sigma.size() == 0 || !(sigma.maxCoeff() > 0.0)) {
    throw std::domain_error("water_filling_mse: every carrier has zero gain");
  }
  auto allocate = [&](double mu) {
    RealVector q = RealVector::Zero(sigma.size());
    for (Eigen::Index k = 0; k < sigma.size(); ++k) {
      if (sigma[k] > 0.0) {
        q[k] = std::max(0.0, 1.0 / std::sqrt(mu * sigma[k]) - 1.0 / sigma[k]);
      }
    }
    return q;
  };
  const double smax = sigma.maxCoeff();
  double hi = smax;  // nothing allocated
  double lo = 1.0 / (smax * (p_total + 1.0 / smax) * (p_total + 1.0 / smax));
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (allocate(mid).sum() > p_total) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-16 * hi) {
      break;
    }
  }
  RealVector q = allocate(lo);
  // Closed-form multiplier for the active set found above.
  double num = p_total;
  double den = 0.0;
  for (Eigen::Index k = 0; k < sigma.size(); ++k) {
    if (q[k] > 0.0) {
      num += 1.0 / sigma[k];
      den += 1.0 / std::sqrt(sigma[k]);
    }
  }
  if (den > 0.0) {
    const double root = num / den;  // mu^{-1/2}
    RealVector exact = RealVector::Zero(sigma.size());
    bool consistent = true;
    for (Eigen::Index k = 0; k < sigma.size(); ++k) {
      if (q[k] > 0.0) {
        exact[k] = root / std::sqrt(sigma[k]) - 1.0 / sigma[k];
        consistent = consistent && exact[k] >= 0.0;
      }
    }
    if (consistent) {
      q = exact;
    }
  }
  return q;
}

// Optimal sum-MSE precoders under a single total power budget p_T (no
// per-antenna limits): z_k = sqrt(q_k) zeta_k with water-filled q.
inline CarrierWeights total_power_precoders(const MultiCarrierLink& link, double p_total) {
  if (!(p_total > 0.0)) {
    throw std::domain_error("total_power_precoders: total power must be positive");
  }
  const std::size_t K = link.carriers();
  CarrierWeights zeta;
  RealVector sigma(static_cast<Eigen::Index>(K));
  for (std::size_t k = 0; k < K; ++k) {
    auto eig = dominant_eigenpair(whitened_gram(link.channels[k], link.noise));
    sigma[Eigen::Index(k)] = eig.value;
    zeta.push_back(std::move(eig.vector));
  }
  if (!(sigma.maxCoeff() > 0.0)) {
    throw std::domain_error("total_power_precoders: degenerate channel on every carrier");
  }
  const RealVector q = water_filling_mse(sigma, p_total);
  CarrierWeights Z;
  Z.reserve(K);
  for (std::size_t k = 0; k < K; ++k) {
    Z.push_back(std::sqrt(q[Eigen::Index(k)]) * zeta[k]);
  }
  return Z;
}

inline CarrierWeights total_power_precoders(const MultiCarrierLink& link) {
  return total_power_precoders(link, link.pc.total());
}

// Total-power precoders with every over-budget antenna scaled onto its budget.
inline CarrierWeights naive_scaled_precoders(const MultiCarrierLink& link) {
  CarrierWeights Z = total_power_precoders(link);
  rescale_to_budget(Z, link.pc);
  return Z;
}

struct ViolationStats {
  int count = 0;
  double max_percent = 0.0;
};

inline ViolationStats violation_stats(std::span<const ComplexVector> Z, const PowerConstraints& pc) {
  const RealVector used = pc.budgets() - multicarrier_margins(Z, pc);
  ViolationStats out;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < pc.size(); ++i) {
    if (used[i] > pc[i] * (1.0 + 1e-9)) {
      ++out.count;
    }
    worst = std::max(worst, used[i] / pc[i] - 1.0);
  }
  out.max_percent = 100.0 * worst;
  return out;
}

}  // namespace papcbf
