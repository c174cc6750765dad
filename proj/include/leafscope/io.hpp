#pragma once

#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace leafscope {

// Round-trippable decimal form (%.17g).
std::string format_double(double v);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(std::span<const double> values);
  void row(const std::vector<double>& values) { row(std::span<const double>(values)); }

 private:
  std::ofstream out_;
  std::size_t columns_;
};

void write_json(const std::string& path, const nlohmann::json& value);
nlohmann::json read_json(const std::string& path);

// FNV-1a over the canonical (sorted-key, compact) dump.
std::uint64_t config_hash(const nlohmann::json& config);
std::string hex64(std::uint64_t v);

inline constexpr const char* kVersion = "0.1.0";

// leafscope, Eigen, FFTW and compiler versions.
nlohmann::json build_versions();

}  // namespace leafscope
