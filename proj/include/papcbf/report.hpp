#pragma once

#include <charconv>
#include <chrono>
#include <ctime>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include <papcbf/channel_sim.hpp>
#include <papcbf/config.hpp>

namespace papcbf {

inline constexpr const char* kVersion = "1.0.0";

// Shortest round-trip decimal form; independent of the C/C++ locale.
inline std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  if (res.ec != std::errc()) {
    throw std::runtime_error("format_number: conversion failed");
  }
  return std::string(buf, res.ptr);
}

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) {
    out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  }
  return out.str();
}

// CSV with header `method,<value_column>,cdf`, one row per sample.
template <class Select>
std::string cdf_csv(const ResultSet& results, const std::string& value_column, Select select) {
  std::string out = "method," + value_column + ",cdf\r\n";
  for (const auto& s : results.methods) {
    const CdfSeries& cdf = select(s);
    const std::string name(to_string(s.method));
    for (std::size_t i = 0; i < cdf.values.size(); ++i) {
      out += name;
      out += ',';
      out += format_number(cdf.values[i]);
      out += ',';
      out += format_number(cdf.probabilities[i]);
      out += "\r\n";
    }
  }
  return out;
}

inline nlohmann::ordered_json summary_json(const ResultSet& results) {
  nlohmann::ordered_json methods = nlohmann::ordered_json::object();
  for (const auto& s : results.methods) {
    methods[std::string(to_string(s.method))] = {
        {"median_snr_db", s.median_snr_db},
        {"median_sum_mse", s.median_sum_mse},
        {"median_violation_count", s.median_violation_count},
        {"median_violation_max_percent", s.median_violation_max_percent},
        {"snr_samples", s.snr_cdf.values.size()},
    };
  }
  nlohmann::ordered_json gaps = nlohmann::ordered_json::object();
  auto gap = [&](const char* key, Method a, Method b) {
    const auto* sa = results.find(a);
    const auto* sb = results.find(b);
    if (sa && sb) gaps[key] = sa->median_snr_db - sb->median_snr_db;
  };
  gap("cyclic_multicarrier_minus_projected_eigenvector_db", Method::CyclicMulticarrier,
      Method::ProjectedEigenvector);
  gap("total_power_minus_cyclic_multicarrier_db", Method::TotalPower, Method::CyclicMulticarrier);
  gap("percarrier_cyclic_minus_projected_eigenvector_db", Method::PercarrierCyclic,
      Method::ProjectedEigenvector);
  gap("naive_scaled_minus_projected_eigenvector_db", Method::NaiveScaled,
      Method::ProjectedEigenvector);

  nlohmann::ordered_json out;
  out["trials"] = results.trials.size();
  out["seed"] = results.config.seed;
  out["config"] = to_json(results.config);
  out["methods"] = std::move(methods);
  out["median_snr_gaps_db"] = std::move(gaps);
  return out;
}

struct OutputFile {
  std::string name;
  std::string sha256;
  std::size_t bytes = 0;
};

struct RunInfo {
  std::string started_utc;
  std::string finished_utc;
  unsigned threads = 1;
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace detail {

inline OutputFile write_file(const std::filesystem::path& dir, const std::string& name,
                             const std::string& content) {
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  out.write(content.data(), std::streamsize(content.size()));
  out.close();
  if (!out) {
    throw std::runtime_error("write failed for '" + path.string() + "'");
  }
  return {name, sha256_hex(content), content.size()};
}

}  // namespace detail

/*
 * Writes snr_cdf.csv, violations_count_cdf.csv, violations_maxpct_cdf.csv and
 * summary.json (all byte-reproducible for a given config), then manifest.json
 * listing their hashes together with the run's timing and timestamps.
 */
inline std::vector<OutputFile> write_outputs(const ResultSet& results,
                                             const std::filesystem::path& dir,
                                             const RunInfo& info) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory '" + dir.string() + "': " +
                             ec.message());
  }
  std::vector<OutputFile> files;
  files.push_back(detail::write_file(
      dir, "snr_cdf.csv",
      cdf_csv(results, "snr_db", [](const MethodSummary& s) -> const CdfSeries& { return s.snr_cdf; })));
  files.push_back(detail::write_file(
      dir, "violations_count_cdf.csv",
      cdf_csv(results, "count",
              [](const MethodSummary& s) -> const CdfSeries& { return s.violation_count_cdf; })));
  files.push_back(detail::write_file(
      dir, "violations_maxpct_cdf.csv",
      cdf_csv(results, "max_percent",
              [](const MethodSummary& s) -> const CdfSeries& { return s.violation_max_percent_cdf; })));
  files.push_back(detail::write_file(dir, "summary.json", summary_json(results).dump(2) + "\n"));

  nlohmann::ordered_json manifest;
  manifest["version"] = kVersion;
  manifest["seed"] = results.config.seed;
  manifest["config"] = to_json(results.config);
  manifest["started_utc"] = info.started_utc;
  manifest["finished_utc"] = info.finished_utc;
  manifest["threads"] = info.threads;
  nlohmann::ordered_json seconds = nlohmann::ordered_json::object();
  for (const auto& s : results.methods) {
    seconds[std::string(to_string(s.method))] = s.total_seconds;
  }
  manifest["method_seconds"] = std::move(seconds);
  nlohmann::ordered_json listed = nlohmann::ordered_json::array();
  for (const auto& f : files) {
    listed.push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  }
  manifest["files"] = std::move(listed);
  files.push_back(detail::write_file(dir, "manifest.json", manifest.dump(2) + "\n"));
  return files;
}

}  // namespace papcbf
