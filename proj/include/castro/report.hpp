#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "castro/matrix.hpp"
#include "castro/metrics.hpp"
#include "castro/orchestrator.hpp"
#include "castro/problem.hpp"

namespace castro {

inline constexpr std::string_view kToolVersion = "0.1.0";

// SHA-256 of the bytes, lowercase hex.
std::string sha256_hex(std::string_view bytes);

// Header row of names, then one row per sample with fixed `decimals` places.
std::string format_csv(const SampleMatrix& rows, std::span<const std::string> names, int decimals);

struct LabeledTable {
  std::vector<std::string> columns;
  SampleMatrix rows;
};

LabeledTable parse_csv_table(std::string_view text, std::string_view source);
LabeledTable read_csv_table(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

nlohmann::ordered_json metrics_json(const MetricsTable& table);
std::string format_metrics_table(const MetricsTable& table);

// Everything needed to reproduce a run with the same binary.
nlohmann::ordered_json build_manifest(const ProblemSpec& spec, const RunOptions& options,
                                      const PipelineResult& result, std::size_t data_rows);

}  // namespace castro
