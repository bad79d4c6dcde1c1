#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <papcbf/multicarrier.hpp>
#include <papcbf/rng.hpp>
#include <papcbf/single_carrier.hpp>

namespace papcbf {

enum class Method {
  CyclicMulticarrier,
  ProjectedEigenvector,
  PercarrierCyclic,
  TotalPower,
  NaiveScaled,
};

inline constexpr Method kAllMethods[] = {Method::CyclicMulticarrier, Method::ProjectedEigenvector,
                                         Method::PercarrierCyclic, Method::TotalPower,
                                         Method::NaiveScaled};

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::CyclicMulticarrier: return "cyclic_multicarrier";
    case Method::ProjectedEigenvector: return "projected_eigenvector";
    case Method::PercarrierCyclic: return "percarrier_cyclic";
    case Method::TotalPower: return "total_power";
    case Method::NaiveScaled: return "naive_scaled";
  }
  return "unknown";
}

inline std::optional<Method> method_from_string(std::string_view name) {
  for (Method m : kAllMethods) {
    if (to_string(m) == name) {
      return m;
    }
  }
  return std::nullopt;
}

// Experiment parameters. Defaults are the 20 x 10, 128-carrier Rayleigh setup.
struct ScenarioConfig {
  int n = 20;
  int m = 10;
  int K = 128;
  double bandwidth_hz = 10e6;
  double fc_hz = 2e9;
  double delay_spread_s = 4e-6;
  double p_min_w = 0.1;
  double p_max_w = 1.0;
  double noise_floor_dbw = -20.0;
  double noise_spread_db = 10.0;
  int trials = 400;
  int cyclic_iters = 20;
  int dual_iters = 200;
  std::uint64_t seed = 1;
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};

  // Throws std::invalid_argument naming the offending field.
  void validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
      throw std::invalid_argument(field + ": " + why);
    };
    if (n < 1) fail("n", "must be >= 1");
    if (m < 1) fail("m", "must be >= 1");
    if (K < 1) fail("K", "must be >= 1");
    if (trials < 1) fail("trials", "must be >= 1");
    if (cyclic_iters < 0) fail("cyclic_iters", "must be >= 0");
    if (dual_iters < 0) fail("dual_iters", "must be >= 0");
    if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz)) fail("bandwidth_hz", "must be > 0");
    if (!(fc_hz > 0.0) || !std::isfinite(fc_hz)) fail("fc_hz", "must be > 0");
    if (!(delay_spread_s >= 0.0) || !std::isfinite(delay_spread_s)) {
      fail("delay_spread_s", "must be >= 0");
    }
    if (!(p_min_w > 0.0) || !std::isfinite(p_min_w)) fail("p_min_w", "must be > 0");
    if (!(p_max_w >= p_min_w) || !std::isfinite(p_max_w)) fail("p_max_w", "must be >= p_min_w");
    if (!std::isfinite(noise_floor_dbw)) fail("noise_floor_dbw", "must be finite");
    if (!(noise_spread_db >= 0.0) || !std::isfinite(noise_spread_db)) {
      fail("noise_spread_db", "must be >= 0");
    }
    if (methods.empty()) fail("methods", "must list at least one method");
    if (std::llround(delay_spread_s * bandwidth_hz) > K) {
      fail("delay_spread_s", "delay spread exceeds the symbol support of K carriers");
    }
  }
};

// Independent random streams of one trial.
enum class StreamPurpose : std::uint64_t { Budgets = 0, Noise = 1, Channel = 2 };

inline CounterRng trial_stream(const ScenarioConfig& cfg, std::uint64_t trial, StreamPurpose p) {
  return CounterRng(CounterRng::stream_key(cfg.seed, trial, std::uint64_t(p)));
}

/*
 * Exponential power-delay profile sampled at the 1 / bandwidth tap spacing.
 * The delay spread is taken as the RMS spread, giving a decay constant of
 * l0 = delay_spread * bandwidth taps; the profile is truncated to
 * min(round(4 l0), K - 1) taps (at least one) and normalized to unit power.
 */
inline RealVector tap_profile(const ScenarioConfig& cfg) {
  const double l0 = cfg.delay_spread_s * cfg.bandwidth_hz;
  if (std::llround(l0) > cfg.K) {
    throw std::invalid_argument("delay_spread_s: delay spread exceeds the symbol support of K carriers");
  }
  const long long taps = std::max<long long>(1, std::min<long long>(std::llround(4.0 * l0), cfg.K - 1));
  RealVector rho(taps);
  for (long long l = 0; l < taps; ++l) {
    rho[l] = l0 > 0.0 ? std::exp(-double(l) / l0) : (l == 0 ? 1.0 : 0.0);
  }
  return rho / rho.sum();
}

// Per-carrier m x n channels from independent Rayleigh tapped delay lines.
inline std::vector<ComplexMatrix> generate_channel(const ScenarioConfig& cfg, CounterRng& rng) {
  const RealVector rho = tap_profile(cfg);
  const Eigen::Index L = rho.size();
  const int K = cfg.K;
  // twiddle(k, l) = exp(-j 2 pi k l / K)
  ComplexMatrix twiddle(K, L);
  for (int k = 0; k < K; ++k) {
    for (Eigen::Index l = 0; l < L; ++l) {
      const long long phase_index = (static_cast<long long>(k) * l) % K;
      const double angle = -2.0 * std::numbers::pi * double(phase_index) / double(K);
      twiddle(k, l) = Complex(std::cos(angle), std::sin(angle));
    }
  }
  std::vector<ComplexMatrix> H(std::size_t(K), ComplexMatrix(cfg.m, cfg.n));
  ComplexVector taps(L);
  for (int i = 0; i < cfg.n; ++i) {
    for (int j = 0; j < cfg.m; ++j) {
      for (Eigen::Index l = 0; l < L; ++l) {
        taps[l] = rng.complex_normal(rho[l]);
      }
      const ComplexVector response = twiddle * taps;
      for (int k = 0; k < K; ++k) {
        H[std::size_t(k)](j, i) = response[k];
      }
    }
  }
  return H;
}

struct Scenario {
  PowerConstraints pc;
  NoiseCovariance noise;
};

// Uniform budgets in [p_min, p_max]; noise variances uniform in dBW over
// [floor, floor + spread].
inline Scenario generate_scenario(const ScenarioConfig& cfg, CounterRng& budget_rng,
                                  CounterRng& noise_rng) {
  RealVector p(cfg.n);
  for (int i = 0; i < cfg.n; ++i) {
    p[i] = budget_rng.uniform(cfg.p_min_w, cfg.p_max_w);
  }
  RealVector var(cfg.m);
  for (int j = 0; j < cfg.m; ++j) {
    const double dbw = cfg.noise_floor_dbw + noise_rng.uniform(0.0, cfg.noise_spread_db);
    var[j] = std::pow(10.0, dbw / 10.0);
  }
  return {PowerConstraints(std::move(p)), NoiseCovariance(std::move(var))};
}

inline MultiCarrierLink generate_link(const ScenarioConfig& cfg, std::uint64_t trial) {
  auto budgets = trial_stream(cfg, trial, StreamPurpose::Budgets);
  auto noise = trial_stream(cfg, trial, StreamPurpose::Noise);
  auto channel = trial_stream(cfg, trial, StreamPurpose::Channel);
  Scenario sc = generate_scenario(cfg, budgets, noise);
  return MultiCarrierLink(generate_channel(cfg, channel), std::move(sc.noise), std::move(sc.pc));
}

// 10 log10(|w^H H z|^2 / (w^H R_n w))
inline double carrier_snr(const ComplexVector& z, const ComplexVector& w, const ComplexMatrix& H,
                          const NoiseCovariance& noise) {
  const double noise_power = noise.quadratic_form(w);
  if (!(noise_power > 0.0)) {
    throw std::domain_error("carrier_snr: combiner is zero");
  }
  return 10.0 * std::log10(std::norm(w.dot(H * z)) / noise_power);
}

struct MethodResult {
  Method method = Method::CyclicMulticarrier;
  std::vector<double> snr_db;  // one per carrier
  double sum_mse = 0.0;
  ViolationStats violations;
  double seconds = 0.0;
};

struct TrialResult {
  std::uint64_t trial = 0;
  std::vector<MethodResult> methods;  // in ScenarioConfig::methods order

  const MethodResult* find(Method m) const {
    for (const auto& r : methods) {
      if (r.method == m) return &r;
    }
    return nullptr;
  }
};

class TrialError : public std::runtime_error {
 public:
  TrialError(std::uint64_t trial, Method method, const std::string& what)
      : std::runtime_error("trial " + std::to_string(trial) + ", method " +
                           std::string(to_string(method)) + ": " + what),
        trial_(trial),
        method_(method) {}

  std::uint64_t trial() const { return trial_; }
  Method method() const { return method_; }

 private:
  std::uint64_t trial_;
  Method method_;
};

inline CyclicOptions cyclic_options(const ScenarioConfig& cfg) {
  CyclicOptions opts;
  opts.max_cyclic_iterations = std::size_t(cfg.cyclic_iters);
  opts.dual.max_dual_iterations = std::size_t(cfg.dual_iters);
  return opts;
}

// Precoders and combiners of one method on one link.
inline CarrierPairs design(Method method, const MultiCarrierLink& link, const ScenarioConfig& cfg) {
  CarrierPairs out;
  switch (method) {
    case Method::CyclicMulticarrier: {
      auto sol = cyclic_multicarrier(link, cyclic_options(cfg));
      out.Z = std::move(sol.Z);
      out.W = std::move(sol.W);
      return out;
    }
    case Method::ProjectedEigenvector:
      out.Z = projected_eigenvector_precoders(link);
      break;
    case Method::PercarrierCyclic:
      return percarrier_cyclic_precoders(link);
    case Method::TotalPower:
      out.Z = total_power_precoders(link);
      break;
    case Method::NaiveScaled:
      out.Z = naive_scaled_precoders(link);
      break;
  }
  out.W = mmse_combiners(link, out.Z);
  return out;
}

inline MethodResult evaluate(Method method, const MultiCarrierLink& link, const CarrierPairs& pairs) {
  MethodResult r;
  r.method = method;
  r.snr_db.reserve(link.carriers());
  for (std::size_t k = 0; k < link.carriers(); ++k) {
    r.snr_db.push_back(carrier_snr(pairs.Z[k], pairs.W[k], link.channels[k], link.noise));
    r.sum_mse += mse(pairs.Z[k], pairs.W[k], link.channels[k], link.noise);
  }
  r.violations = violation_stats(pairs.Z, link.pc);
  return r;
}

inline TrialResult run_trial(const ScenarioConfig& cfg, std::uint64_t trial_index) {
  const MultiCarrierLink link = generate_link(cfg, trial_index);
  TrialResult out;
  out.trial = trial_index;
  for (Method method : cfg.methods) {
    try {
      const auto start = std::chrono::steady_clock::now();
      const CarrierPairs pairs = design(method, link, cfg);
      MethodResult r = evaluate(method, link, pairs);
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      out.methods.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw TrialError(trial_index, method, e.what());
    }
  }
  return out;
}

struct CdfSeries {
  std::vector<double> values;         // nondecreasing
  std::vector<double> probabilities;  // i / N, ending at 1

  // Smallest sample whose cumulative probability reaches p.
  double quantile(double p) const {
    const auto it = std::lower_bound(probabilities.begin(), probabilities.end(), p);
    const auto idx = std::size_t(std::min<std::ptrdiff_t>(
        it - probabilities.begin(), std::ptrdiff_t(values.size()) - 1));
    return values[idx];
  }
};

inline CdfSeries empirical_cdf(std::vector<double> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("empirical_cdf: no samples");
  }
  std::sort(samples.begin(), samples.end());
  CdfSeries out;
  const double N = double(samples.size());
  out.probabilities.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out.probabilities.push_back(double(i + 1) / N);
  }
  out.values = std::move(samples);
  return out;
}

// Midpoint median (mean of the two central order statistics for even sizes).
inline double median(std::vector<double> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("median: no samples");
  }
  const std::size_t mid = samples.size() / 2;
  std::nth_element(samples.begin(), samples.begin() + std::ptrdiff_t(mid), samples.end());
  const double upper = samples[mid];
  if (samples.size() % 2 == 1) {
    return upper;
  }
  return 0.5 * (upper + *std::max_element(samples.begin(), samples.begin() + std::ptrdiff_t(mid)));
}

struct MethodSummary {
  Method method = Method::CyclicMulticarrier;
  CdfSeries snr_cdf;
  CdfSeries violation_count_cdf;
  CdfSeries violation_max_percent_cdf;
  double median_snr_db = 0.0;
  double median_sum_mse = 0.0;
  double median_violation_count = 0.0;
  double median_violation_max_percent = 0.0;
  double total_seconds = 0.0;
};

struct ResultSet {
  ScenarioConfig config;
  std::vector<TrialResult> trials;  // indexed by trial
  std::vector<MethodSummary> methods;

  const MethodSummary* find(Method m) const {
    for (const auto& s : methods) {
      if (s.method == m) return &s;
    }
    return nullptr;
  }
};

// Pools per-method samples over trials. Output depends only on the set of
// trial results, not on the order they were produced in.
inline ResultSet summarize(const ScenarioConfig& cfg, std::vector<TrialResult> trials) {
  std::sort(trials.begin(), trials.end(),
            [](const TrialResult& a, const TrialResult& b) { return a.trial < b.trial; });
  ResultSet out;
  out.config = cfg;
  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    std::vector<double> snr, sum_mse, count, pct;
    MethodSummary s;
    s.method = cfg.methods[mi];
    for (const auto& t : trials) {
      const MethodResult& r = t.methods.at(mi);
      snr.insert(snr.end(), r.snr_db.begin(), r.snr_db.end());
      sum_mse.push_back(r.sum_mse);
      count.push_back(double(r.violations.count));
      pct.push_back(r.violations.max_percent);
      s.total_seconds += r.seconds;
    }
    s.median_snr_db = median(snr);
    s.median_sum_mse = median(sum_mse);
    s.median_violation_count = median(count);
    s.median_violation_max_percent = median(pct);
    s.snr_cdf = empirical_cdf(std::move(snr));
    s.violation_count_cdf = empirical_cdf(std::move(count));
    s.violation_max_percent_cdf = empirical_cdf(std::move(pct));
    out.methods.push_back(std::move(s));
  }
  out.trials = std::move(trials);
  return out;
}

// Runs every trial, optionally on several threads. Each trial owns its random
// streams, so the result is identical for any thread count.
inline ResultSet monte_carlo(const ScenarioConfig& cfg, unsigned threads = 1) {
  cfg.validate();
  const std::size_t trials = std::size_t(cfg.trials);
  std::vector<TrialResult> results(trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= trials) return;
      try {
        results[t] = run_trial(cfg, t);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(trials);
        return;
      }
    }
  };

  threads = std::max(1u, std::min<unsigned>(threads, unsigned(trials)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return summarize(cfg, std::move(results));
}

}  // namespace papcbf
