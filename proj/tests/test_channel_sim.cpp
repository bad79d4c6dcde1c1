#include <gtest/gtest.h>

#include <papcbf/channel_sim.hpp>

#include "support.hpp"

using namespace papcbf;

namespace {

ScenarioConfig small_config() {
  ScenarioConfig cfg;
  cfg.n = 4;
  cfg.m = 2;
  cfg.K = 16;
  cfg.delay_spread_s = 0.3e-6;
  cfg.trials = 6;
  cfg.cyclic_iters = 5;
  return cfg;
}

}  // namespace

TEST(CounterRngTest, StreamsAreReproducibleAndDistinct) {
  CounterRng a(CounterRng::stream_key(1, 0, 0));
  CounterRng b(CounterRng::stream_key(1, 0, 0));
  CounterRng c(CounterRng::stream_key(1, 0, 1));
  CounterRng d(CounterRng::stream_key(1, 1, 0));
  CounterRng e(CounterRng::stream_key(2, 0, 0));
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
    EXPECT_NE(x, d.next());
    EXPECT_NE(x, e.next());
  }
}

TEST(CounterRngTest, UniformAndGaussianMoments) {
  CounterRng rng(CounterRng::stream_key(3, 4, 5));
  const int samples = 200000;
  double u_sum = 0.0, c_power = 0.0, n_sum = 0.0, n_sq = 0.0;
  double u_min = 1.0, u_max = 0.0;
  Complex c_sum = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double u = rng.uniform();
    u_min = std::min(u_min, u);
    u_max = std::max(u_max, u);
    u_sum += u;
    const Complex c = rng.complex_normal(2.0);
    c_sum += c;
    c_power += std::norm(c);
    const double x = rng.normal();
    n_sum += x;
    n_sq += x * x;
  }
  EXPECT_GE(u_min, 0.0);
  EXPECT_LT(u_max, 1.0);
  EXPECT_NEAR(u_sum / samples, 0.5, 0.005);
  EXPECT_NEAR(c_power / samples, 2.0, 0.03);
  EXPECT_NEAR(std::abs(c_sum) / samples, 0.0, 0.01);
  EXPECT_NEAR(n_sum / samples, 0.0, 0.01);
  EXPECT_NEAR(n_sq / samples, 1.0, 0.015);
}

TEST(ScenarioConfigTest, DefaultsMatchReferenceExperiment) {
  const ScenarioConfig cfg;
  EXPECT_EQ(cfg.n, 20);
  EXPECT_EQ(cfg.m, 10);
  EXPECT_EQ(cfg.K, 128);
  EXPECT_EQ(cfg.trials, 400);
  EXPECT_EQ(cfg.cyclic_iters, 20);
  EXPECT_EQ(cfg.dual_iters, 200);
  EXPECT_EQ(cfg.bandwidth_hz, 10e6);
  EXPECT_EQ(cfg.fc_hz, 2e9);
  EXPECT_EQ(cfg.delay_spread_s, 4e-6);
  EXPECT_EQ(cfg.p_min_w, 0.1);
  EXPECT_EQ(cfg.p_max_w, 1.0);
  EXPECT_EQ(cfg.noise_spread_db, 10.0);
  EXPECT_EQ(cfg.methods.size(), 5u);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(ScenarioConfigTest, ValidationNamesTheField) {
  auto expect_field = [](ScenarioConfig cfg, const std::string& field) {
    try {
      cfg.validate();
      FAIL() << "expected failure for " << field;
    } catch (const std::invalid_argument& e) {
      EXPECT_EQ(std::string(e.what()).rfind(field + ":", 0), 0u) << e.what();
    }
  };
  ScenarioConfig cfg;
  cfg.trials = 0;
  expect_field(cfg, "trials");
  cfg = {};
  cfg.n = 0;
  expect_field(cfg, "n");
  cfg = {};
  cfg.p_min_w = 0.0;
  expect_field(cfg, "p_min_w");
  cfg = {};
  cfg.noise_spread_db = -1.0;
  expect_field(cfg, "noise_spread_db");
  cfg = {};
  cfg.K = 16;  // 40 taps of delay spread do not fit
  expect_field(cfg, "delay_spread_s");
}

TEST(TapProfile, NormalizedAndTruncated) {
  ScenarioConfig cfg;
  const RealVector rho = tap_profile(cfg);
  EXPECT_EQ(rho.size(), 127);  // min(round(4 * 40), K - 1)
  EXPECT_NEAR(rho.sum(), 1.0, 1e-14);
  EXPECT_NEAR(rho[1] / rho[0], std::exp(-1.0 / 40.0), 1e-14);
  cfg.K = 1024;
  EXPECT_EQ(tap_profile(cfg).size(), 160);
  cfg.delay_spread_s = 0.0;
  EXPECT_EQ(tap_profile(cfg).size(), 1);
}

TEST(GenerateChannel, SingleTapIsFlat) {
  ScenarioConfig cfg = small_config();
  cfg.delay_spread_s = 0.0;
  CounterRng rng(7);
  const auto H = generate_channel(cfg, rng);
  ASSERT_EQ(H.size(), 16u);
  for (const auto& Hk : H) {
    EXPECT_EQ(Hk.rows(), 2);
    EXPECT_EQ(Hk.cols(), 4);
    EXPECT_EQ(Hk, H[0]);
  }
}

TEST(GenerateChannel, UnitAveragePower) {
  ScenarioConfig cfg = small_config();
  cfg.n = 1;
  cfg.m = 1;
  cfg.K = 8;
  CounterRng rng(8);
  double acc = 0.0;
  const int draws = 12500;
  for (int d = 0; d < draws; ++d) {
    for (const auto& Hk : generate_channel(cfg, rng)) acc += std::norm(Hk(0, 0));
  }
  EXPECT_NEAR(acc / (draws * 8.0), 1.0, 0.02);
}

TEST(GenerateChannel, NearbyCarriersAreMoreCorrelated) {
  ScenarioConfig cfg = small_config();
  cfg.n = 1;
  cfg.m = 1;
  cfg.K = 32;
  cfg.delay_spread_s = 0.4e-6;
  CounterRng rng(9);
  Complex adjacent = 0.0, far = 0.0;
  for (int d = 0; d < 10000; ++d) {
    const auto H = generate_channel(cfg, rng);
    adjacent += H[0](0, 0) * std::conj(H[1](0, 0));
    far += H[0](0, 0) * std::conj(H[16](0, 0));
  }
  EXPECT_GT(std::abs(adjacent), std::abs(far));
}

TEST(GenerateScenario, BudgetAndNoiseRanges) {
  ScenarioConfig cfg;
  CounterRng budgets(10), noise(11);
  double sum = 0.0;
  int count = 0;
  for (int d = 0; d < 5000; ++d) {
    const Scenario sc = generate_scenario(cfg, budgets, noise);
    for (int i = 0; i < cfg.n; ++i) {
      ASSERT_GE(sc.pc[i], 0.1);
      ASSERT_LE(sc.pc[i], 1.0);
      sum += sc.pc[i];
      ++count;
    }
    for (int j = 0; j < cfg.m; ++j) {
      const double dbw = 10.0 * std::log10(sc.noise[j]);
      ASSERT_GE(dbw, cfg.noise_floor_dbw - 1e-12);
      ASSERT_LE(dbw, cfg.noise_floor_dbw + cfg.noise_spread_db + 1e-12);
    }
  }
  EXPECT_NEAR(sum / count, 0.55, 0.55 * 0.01);
}

TEST(GenerateScenario, ZeroSpreadGivesEqualNoise) {
  ScenarioConfig cfg;
  cfg.noise_spread_db = 0.0;
  CounterRng budgets(12), noise(13);
  const Scenario sc = generate_scenario(cfg, budgets, noise);
  for (int j = 0; j < cfg.m; ++j) EXPECT_EQ(sc.noise[j], std::pow(10.0, cfg.noise_floor_dbw / 10.0));
}

TEST(CarrierSnr, ScalarAndScaleInvariance) {
  const ComplexMatrix H = ComplexMatrix::Ones(1, 1);
  const NoiseCovariance noise = NoiseCovariance::identity(1);
  EXPECT_NEAR(carrier_snr(ComplexVector::Ones(1), ComplexVector::Ones(1), H, noise), 0.0, 1e-15);
  support::Gen gen(14);
  const ComplexMatrix G = gen.matrix(3, 4);
  const NoiseCovariance nz = gen.noise(3);
  const ComplexVector z = gen.vector(4);
  const ComplexVector w = gen.vector(3);
  EXPECT_NEAR(carrier_snr(z, w, G, nz), carrier_snr(z, Complex(-2.0, 0.7) * w, G, nz), 1e-12);
  EXPECT_THROW(carrier_snr(z, ComplexVector::Zero(3), G, nz), std::domain_error);
}

TEST(CarrierSnr, MmseCombinerIdentity) {
  support::Gen gen(15);
  for (int trial = 0; trial < 100; ++trial) {
    const LinkInstance link = gen.link(gen.integer(1, 6), gen.integer(1, 6));
    const ComplexVector z = gen.feasible(link.pc);
    const double xi = resultant_mse(z, link);
    const double snr = carrier_snr(z, mmse_combiner(z, link), link.H, link.noise);
    EXPECT_NEAR(std::pow(10.0, snr / 10.0), 1.0 / xi - 1.0, 1e-9 * (1.0 / xi));
  }
}

TEST(RunTrial, DeterministicAndOrderedLikeConfig) {
  const ScenarioConfig cfg = small_config();
  const TrialResult a = run_trial(cfg, 3);
  const TrialResult b = run_trial(cfg, 3);
  ASSERT_EQ(a.methods.size(), cfg.methods.size());
  for (std::size_t i = 0; i < a.methods.size(); ++i) {
    EXPECT_EQ(a.methods[i].method, cfg.methods[i]);
    EXPECT_EQ(a.methods[i].snr_db, b.methods[i].snr_db);
    EXPECT_EQ(a.methods[i].sum_mse, b.methods[i].sum_mse);
    EXPECT_EQ(a.methods[i].snr_db.size(), std::size_t(cfg.K));
    for (double s : a.methods[i].snr_db) EXPECT_TRUE(std::isfinite(s));
  }
  const TrialResult c = run_trial(cfg, 4);
  EXPECT_NE(a.methods[0].snr_db, c.methods[0].snr_db);
}

TEST(RunTrial, CyclicImprovesOnItsInitialization) {
  const ScenarioConfig cfg = small_config();
  for (std::uint64_t t = 0; t < 4; ++t) {
    const TrialResult r = run_trial(cfg, t);
    EXPECT_LE(r.find(Method::CyclicMulticarrier)->sum_mse,
              r.find(Method::ProjectedEigenvector)->sum_mse + 1e-12);
    for (const auto& m : r.methods) {
      if (m.method != Method::TotalPower) {
        EXPECT_EQ(m.violations.count, 0);
      }
    }
  }
}

TEST(RunTrial, SnrMatchesMseForMmseCombiners) {
  const ScenarioConfig cfg = small_config();
  const MultiCarrierLink link = generate_link(cfg, 1);
  for (Method method : kAllMethods) {
    const CarrierPairs pairs = design(method, link, cfg);
    const MethodResult r = evaluate(method, link, pairs);
    for (std::size_t k = 0; k < link.carriers(); ++k) {
      const double xi = resultant_mse(pairs.Z[k], link.channels[k], link.noise);
      const double linear = std::pow(10.0, r.snr_db[k] / 10.0);
      EXPECT_NEAR(linear, 1.0 / xi - 1.0, 1e-9 * (1.0 / xi)) << to_string(method);
    }
  }
}

TEST(RunTrial, TotalPowerViolatesOnReferenceScenario) {
  ScenarioConfig cfg;
  cfg.methods = {Method::TotalPower};
  const TrialResult r = run_trial(cfg, 0);
  EXPECT_GE(r.methods[0].violations.count, 7);
}

TEST(RunTrial, TagsFailuresWithTrialAndMethod) {
  const TrialError e(5, Method::NaiveScaled, "boom");
  EXPECT_EQ(std::string(e.what()), "trial 5, method naive_scaled: boom");
  EXPECT_EQ(e.trial(), 5u);
}

TEST(EmpiricalCdf, SmallExamples) {
  const CdfSeries one = empirical_cdf({5.0});
  EXPECT_EQ(one.values, std::vector<double>{5.0});
  EXPECT_EQ(one.probabilities, std::vector<double>{1.0});
  const CdfSeries four = empirical_cdf({4.0, 1.0, 3.0, 2.0});
  EXPECT_EQ(four.values, (std::vector<double>{1.0, 2.0, 3.0, 4.0}));
  EXPECT_EQ(four.probabilities, (std::vector<double>{0.25, 0.5, 0.75, 1.0}));
  EXPECT_THROW(empirical_cdf({}), std::invalid_argument);
}

TEST(EmpiricalCdf, QuantileNearDirectMedian) {
  support::Gen gen(16);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> xs(std::size_t(gen.integer(1, 200)));
    for (auto& x : xs) x = gen.uniform(-5.0, 5.0);
    const CdfSeries cdf = empirical_cdf(xs);
    std::sort(xs.begin(), xs.end());
    const double direct = median(xs);
    double gap = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i) gap = std::max(gap, xs[i] - xs[i - 1]);
    EXPECT_LE(std::abs(cdf.quantile(0.5) - direct), gap + 1e-15);
    for (std::size_t i = 1; i < cdf.probabilities.size(); ++i) {
      EXPECT_GT(cdf.probabilities[i], cdf.probabilities[i - 1]);
      EXPECT_GE(cdf.values[i], cdf.values[i - 1]);
    }
  }
}

TEST(Median, MidpointConvention) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
  EXPECT_THROW(median({}), std::invalid_argument);
}

TEST(MonteCarlo, SingleTrialWrapsItsSamples) {
  ScenarioConfig cfg = small_config();
  cfg.trials = 1;
  const ResultSet rs = monte_carlo(cfg);
  const TrialResult direct = run_trial(cfg, 0);
  ASSERT_EQ(rs.methods.size(), cfg.methods.size());
  for (std::size_t i = 0; i < rs.methods.size(); ++i) {
    std::vector<double> sorted = direct.methods[i].snr_db;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(rs.methods[i].snr_cdf.values, sorted);
    EXPECT_EQ(rs.methods[i].median_sum_mse, direct.methods[i].sum_mse);
  }
}

TEST(MonteCarlo, IndependentOfTrialOrderAndThreadCount) {
  const ScenarioConfig cfg = small_config();
  const ResultSet serial = monte_carlo(cfg, 1);
  const ResultSet parallel = monte_carlo(cfg, 3);
  std::vector<TrialResult> shuffled = serial.trials;
  std::reverse(shuffled.begin(), shuffled.end());
  const ResultSet reordered = summarize(cfg, shuffled);
  for (std::size_t i = 0; i < serial.methods.size(); ++i) {
    EXPECT_EQ(serial.methods[i].snr_cdf.values, parallel.methods[i].snr_cdf.values);
    EXPECT_EQ(serial.methods[i].median_snr_db, parallel.methods[i].median_snr_db);
    EXPECT_EQ(serial.methods[i].snr_cdf.values, reordered.methods[i].snr_cdf.values);
    EXPECT_EQ(serial.methods[i].median_sum_mse, reordered.methods[i].median_sum_mse);
  }
}

TEST(MonteCarlo, InvalidConfigThrows) {
  ScenarioConfig cfg = small_config();
  cfg.trials = 0;
  EXPECT_THROW(monte_carlo(cfg), std::invalid_argument);
}
