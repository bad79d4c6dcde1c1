// Command-line front end: Monte-Carlo experiment and single-trial inspection.
//
//   papcbf simulate --config cfg.json --out results/ [--seed S] [--trials N]
//                   [--methods a,b,...] [--threads T]
//   papcbf single   --config cfg.json [--trial I] [--seed S] [--carrier-dump]
//
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include <papcbf/channel_sim.hpp>
#include <papcbf/config.hpp>
#include <papcbf/multicarrier.hpp>
#include <papcbf/report.hpp>
#include <papcbf/single_carrier.hpp>

namespace {

using namespace papcbf;

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::vector<std::string> methods;
};

ScenarioConfig resolve_config(const CommonFlags& flags) {
  ScenarioConfig cfg = flags.config_path.empty() ? ScenarioConfig{} : parse_config(flags.config_path);
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.trials) cfg.trials = *flags.trials;
  if (!flags.methods.empty()) cfg.methods = parse_methods(flags.methods, "--methods");
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

int cmd_simulate(const CommonFlags& flags, const std::string& out_dir, unsigned threads) {
  const ScenarioConfig cfg = resolve_config(flags);
  RunInfo info;
  info.threads = std::max(1u, threads);
  info.started_utc = utc_timestamp();
  const ResultSet results = monte_carlo(cfg, info.threads);
  info.finished_utc = utc_timestamp();
  const auto files = write_outputs(results, out_dir, info);

  std::printf("%-24s %14s %14s %10s %12s\n", "method", "median_snr_db", "median_sum_mse",
              "viol_cnt", "viol_max_pct");
  for (const auto& s : results.methods) {
    std::printf("%-24s %14.4f %14.6f %10.1f %12.2f\n", std::string(to_string(s.method)).c_str(),
                s.median_snr_db, s.median_sum_mse, s.median_violation_count,
                s.median_violation_max_percent);
  }
  for (const auto& f : files) {
    std::printf("wrote %s (%zu bytes, sha256 %s)\n", f.name.c_str(), f.bytes, f.sha256.c_str());
  }
  return 0;
}

void print_trace(const char* label, const std::vector<double>& trace) {
  std::printf("%s:", label);
  for (double v : trace) std::printf(" %.12g", v);
  std::printf("\n");
}

int cmd_single(const CommonFlags& flags, std::uint64_t trial, bool carrier_dump) {
  const ScenarioConfig cfg = resolve_config(flags);
  const MultiCarrierLink link = generate_link(cfg, trial);
  std::printf("trial %llu: n=%d m=%d K=%d seed=%llu\n", static_cast<unsigned long long>(trial),
              cfg.n, cfg.m, cfg.K, static_cast<unsigned long long>(cfg.seed));

  std::vector<MethodResult> rows;
  std::optional<MultiCarrierSolution> cyclic;
  for (Method method : cfg.methods) {
    CarrierPairs pairs;
    if (method == Method::CyclicMulticarrier) {
      cyclic = cyclic_multicarrier(link, cyclic_options(cfg));
      pairs.Z = cyclic->Z;
      pairs.W = cyclic->W;
    } else {
      pairs = design(method, link, cfg);
    }
    rows.push_back(evaluate(method, link, pairs));
  }

  std::printf("\n%-24s %14s %12s %12s %12s %8s %12s\n", "method", "sum_mse", "snr_min_db",
              "snr_med_db", "snr_max_db", "viol", "viol_max_pct");
  for (const auto& r : rows) {
    const auto [lo, hi] = std::minmax_element(r.snr_db.begin(), r.snr_db.end());
    std::printf("%-24s %14.8f %12.4f %12.4f %12.4f %8d %12.2f\n",
                std::string(to_string(r.method)).c_str(), r.sum_mse, *lo, median(r.snr_db), *hi,
                r.violations.count, r.violations.max_percent);
  }

  if (carrier_dump) {
    std::printf("\ncarrier");
    for (const auto& r : rows) std::printf(" %22s", std::string(to_string(r.method)).c_str());
    std::printf("\n");
    for (int k = 0; k < cfg.K; ++k) {
      std::printf("%7d", k);
      for (const auto& r : rows) std::printf(" %22.6f", r.snr_db[std::size_t(k)]);
      std::printf("\n");
    }
  }

  if (cyclic) {
    const DualSolveResult& dual = cyclic->last_dual;
    const KktResiduals kkt =
        multicarrier_kkt_residuals(dual.state.Z, dual.state.lambda, cyclic->G, link.pc);
    std::printf("\ncyclic_multicarrier final dual state\n");
    std::printf("  status %s after %zu iterations, projected gradient %.3e\n",
                std::string(to_string(dual.status)).c_str(), dual.iterations,
                dual.projected_gradient_norm);
    std::printf("  primal %.12g dual %.12g gap %.3e (relative %.3e)\n", dual.primal_value,
                dual.state.value, dual.dual_gap,
                dual.dual_gap / std::max(1.0, std::abs(dual.primal_value)));
    std::printf("  kkt stationarity %.3e primal %.3e slackness %.3e dual %.3e\n",
                kkt.stationarity.maxCoeff(), kkt.primal.maxCoeff(), kkt.slackness.maxCoeff(),
                kkt.dual.maxCoeff());
    std::printf("  min pre-repair margin %.3e\n", dual.pre_repair_margins.minCoeff());
    print_trace("  sum-MSE trace", cyclic->trace);
  }

  if (cfg.K == 1) {
    const LinkInstance single(link.channels.front(), link.noise, link.pc);
    const BeamformerPair gs = gauss_seidel_mmse(single);
    std::printf("\nsingle-carrier Gauss-Seidel: mse %.12g after %zu iterations (%s)\n", gs.mse,
                gs.iterations, gs.converged ? "converged" : "not converged");
    print_trace("  mse trace", gs.trace);
    if (cfg.m == 1) {
      const ComplexVector h = link.channels.front().row(0).transpose();
      const BeamformerPair miso = miso_solution(h, link.noise[0], link.pc);
      std::printf("closed-form MISO: |w| %.12g mse %.12g\n", std::abs(miso.w[0]), miso.mse);
      std::printf("Gauss-Seidel:     |w| %.12g mse %.12g\n", std::abs(gs.w[0]), gs.mse);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Per-antenna power constrained MMSE beamforming experiments"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string out_dir;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::uint64_t trial = 0;
  bool carrier_dump = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config_path, "JSON scenario configuration");
    sub->add_option("--seed", flags.seed, "Override the RNG seed");
    sub->add_option("--methods", flags.methods, "Comma-separated method list")->delimiter(',');
  };

  CLI::App* simulate = app.add_subcommand("simulate", "Run the Monte-Carlo experiment");
  add_common(simulate);
  simulate->add_option("--out", out_dir, "Output directory")->required();
  simulate->add_option("--trials", flags.trials, "Override the number of trials");
  simulate->add_option("--threads", threads, "Worker threads for trials");

  CLI::App* single = app.add_subcommand("single", "Solve one trial and print diagnostics");
  add_common(single);
  single->add_option("--trial", trial, "Trial index to draw");
  single->add_flag("--carrier-dump", carrier_dump, "Print the per-carrier SNR table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*simulate) return cmd_simulate(flags, out_dir, threads);
    return cmd_single(flags, trial, carrier_dump);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
