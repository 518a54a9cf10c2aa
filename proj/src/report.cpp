#include "synthlab/report.hpp"

#include <charconv>
#include <cstdio>

#include <json.hpp>

#include "synthlab/volume_io.hpp"

namespace synthlab {

using json = nlohmann::json;

ReportFormat report_format_from_name(const std::string& name) {
  if (name == "json") return ReportFormat::json;
  if (name == "csv") return ReportFormat::csv;
  if (name == "table") return ReportFormat::table;
  throw Error(Errc::invalid_argument, "unknown report format \"" + name + "\"");
}

namespace {

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string cell3(const std::optional<double>& v) { return v ? fixed3(*v) : "-"; }

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

std::string MetricsReport::to_table() const {
  std::string out = "Model\tFID \xE2\x86\x93\tMMD \xE2\x86\x93\tMS-SSIM \xE2\x86\x91\tPSNR (dB) \xE2\x86\x91\n";
  for (const auto& m : models) {
    out += m.name + '\t' + cell3(m.fid) + '\t' + cell3(m.mmd) + '\t' + cell3(m.ms_ssim) + '\t' +
           cell3(m.psnr_db) + '\n';
  }
  if (!summaries.empty()) {
    out += '\n';
    for (const auto& s : summaries) {
      out += s.model + " " + s.metric + ": " + fixed3(s.mean) + " \xC2\xB1 " + fixed3(s.stddev) + " (n=" +
             std::to_string(s.n) + ")\n";
    }
  }
  if (!tests.empty()) {
    out += '\n';
    for (const auto& t : tests) {
      out += t.name + ": W=" + shortest(t.w) + ", p=" + shortest(t.p) + ", n=" + std::to_string(t.n) +
             ", method=" + t.method + "\n";
    }
  }
  return out;
}

std::string MetricsReport::to_csv() const {
  std::string out = "model,fid,mmd,ms_ssim,psnr_db,feature_source,n_volumes\n";
  for (const auto& m : models) {
    out += m.name + ',' + (m.fid ? shortest(*m.fid) : "") + ',' + (m.mmd ? shortest(*m.mmd) : "") + ',' +
           (m.ms_ssim ? shortest(*m.ms_ssim) : "") + ',' + (m.psnr_db ? shortest(*m.psnr_db) : "") + ',' +
           m.feature_source + ',' + std::to_string(m.n_volumes) + '\n';
  }
  for (const auto& t : tests) {
    out += "# test," + t.name + ",W=" + shortest(t.w) + ",p=" + shortest(t.p) + ",n=" + std::to_string(t.n) +
           ",method=" + t.method + '\n';
  }
  return out;
}

std::string MetricsReport::to_json() const {
  json models_json = json::array();
  for (const auto& m : models) {
    models_json.push_back({
        {"name", m.name},
        {"fid", opt_json(m.fid)},
        {"mmd", opt_json(m.mmd)},
        {"ms_ssim", opt_json(m.ms_ssim)},
        {"psnr_db", opt_json(m.psnr_db)},
        {"feature_source", m.feature_source},
        {"n_volumes", m.n_volumes},
    });
  }
  json tests_json = json::array();
  for (const auto& t : tests) {
    tests_json.push_back({{"name", t.name}, {"W", t.w}, {"p", t.p}, {"n", t.n}, {"method", t.method}});
  }
  json j = {{"models", std::move(models_json)}, {"tests", std::move(tests_json)}};
  if (!summaries.empty()) {
    json s_json = json::array();
    for (const auto& s : summaries) {
      s_json.push_back(
          {{"model", s.model}, {"metric", s.metric}, {"mean", s.mean}, {"stddev", s.stddev}, {"n", s.n}});
    }
    j["summaries"] = std::move(s_json);
  }
  return j.dump(2) + "\n";
}

MetricsReport MetricsReport::parse_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::invalid_argument, std::string("report: ") + e.what());
  }
  MetricsReport report;
  try {
    for (const json& m : j.at("models")) {
      ModelMetricsRow row;
      row.name = m.at("name").get<std::string>();
      row.fid = opt_from(m.at("fid"));
      row.mmd = opt_from(m.at("mmd"));
      row.ms_ssim = opt_from(m.at("ms_ssim"));
      row.psnr_db = opt_from(m.at("psnr_db"));
      row.feature_source = m.at("feature_source").get<std::string>();
      row.n_volumes = m.at("n_volumes").get<int>();
      report.models.push_back(std::move(row));
    }
    for (const json& t : j.at("tests")) {
      report.tests.push_back({t.at("name").get<std::string>(), t.at("W").get<double>(), t.at("p").get<double>(),
                              t.at("n").get<int>(), t.at("method").get<std::string>()});
    }
    if (j.contains("summaries")) {
      for (const json& s : j.at("summaries")) {
        report.summaries.push_back({s.at("model").get<std::string>(), s.at("metric").get<std::string>(),
                                    s.at("mean").get<double>(), s.at("stddev").get<double>(),
                                    s.at("n").get<int>()});
      }
    }
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_argument, std::string("report: ") + e.what());
  }
  return report;
}

void emit_report(const MetricsReport& report, const std::filesystem::path& path, ReportFormat format) {
  switch (format) {
    case ReportFormat::json: atomic_write_bytes(path, report.to_json()); break;
    case ReportFormat::csv: atomic_write_bytes(path, report.to_csv()); break;
    case ReportFormat::table: atomic_write_bytes(path, report.to_table()); break;
  }
}

}  // namespace synthlab
