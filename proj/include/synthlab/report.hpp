#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "synthlab/stats.hpp"

namespace synthlab {

enum class ReportFormat { json, csv, table };

ReportFormat report_format_from_name(const std::string& name);

// One model row; absent metrics were skipped (e.g. no volume pairs given).
struct ModelMetricsRow {
  std::string name;
  std::optional<double> fid;
  std::optional<double> mmd;
  std::optional<double> ms_ssim;
  std::optional<double> psnr_db;
  std::string feature_source;  // provenance of FID/MMD features
  int n_volumes = 0;
};

struct TestResultRow {
  std::string name;
  double w = 0.0;
  double p = 0.0;
  int n = 0;
  std::string method;
};

// Per-pair spread for a metric, reported alongside the row means.
struct SummaryBlock {
  std::string model;
  std::string metric;
  double mean = 0.0;
  double stddev = 0.0;
  int n = 0;
};

struct MetricsReport {
  std::vector<ModelMetricsRow> models;
  std::vector<TestResultRow> tests;
  std::vector<SummaryBlock> summaries;

  // Tab-separated with direction markers; values at 3 decimals:
  // Model<TAB>FID (down)<TAB>MMD (down)<TAB>MS-SSIM (up)<TAB>PSNR (dB) (up)
  std::string to_table() const;
  std::string to_csv() const;
  std::string to_json() const;  // lossless; parse_report inverts it

  static MetricsReport parse_json(const std::string& text);
};

void emit_report(const MetricsReport& report, const std::filesystem::path& path, ReportFormat format);

}  // namespace synthlab
