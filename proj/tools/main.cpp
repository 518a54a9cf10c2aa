// lge-synthlab: composite label-map construction, cluster model selection,
// 3-D synthetic-image quality metrics, diffusion schedule math, segmentation
// losses, seeded augmentation and statistical reporting, as subcommands with
// machine-readable output.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "synthlab/augment.hpp"
#include "synthlab/cluster_metrics.hpp"
#include "synthlab/composite.hpp"
#include "synthlab/diffusion.hpp"
#include "synthlab/features.hpp"
#include "synthlab/fid.hpp"
#include "synthlab/metrics.hpp"
#include "synthlab/mmd.hpp"
#include "synthlab/parallel.hpp"
#include "synthlab/report.hpp"
#include "synthlab/smooth.hpp"
#include "synthlab/stats.hpp"
#include "synthlab/volume_io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace synthlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

enum class LogLevel { debug = 0, info, warn, error, off };

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("LGE_SYNTHLAB_LOG");
    if (!env) return LogLevel::warn;
    const std::string s(env);
    if (s == "debug") return LogLevel::debug;
    if (s == "info") return LogLevel::info;
    if (s == "warn") return LogLevel::warn;
    if (s == "error") return LogLevel::error;
    if (s == "off") return LogLevel::off;
    return LogLevel::warn;
  }();
  return level;
}

void log_line(LogLevel lvl, const std::string& msg) {
  static const char* names[] = {"debug", "info", "warn", "error"};
  if (lvl >= log_level() && lvl != LogLevel::off)
    std::cerr << "[" << names[static_cast<int>(lvl)] << "] " << msg << "\n";
}

std::string fmt_shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

struct ManifestEntry {
  fs::path real;
  fs::path synthetic;
  std::string id;
};

std::vector<ManifestEntry> load_manifest(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw Error(Errc::invalid_argument, path.string() + ": " + e.what());
  }
  if (!j.is_array()) throw Error(Errc::invalid_argument, path.string() + ": manifest must be a JSON array");
  std::vector<ManifestEntry> entries;
  for (const json& item : j) {
    for (const auto& [key, _] : item.items()) {
      if (key != "real" && key != "synthetic" && key != "id")
        throw Error(Errc::invalid_argument, path.string() + ": unknown manifest key \"" + key + "\"");
    }
    try {
      entries.push_back({fs::path(item.at("real").get<std::string>()),
                         fs::path(item.at("synthetic").get<std::string>()),
                         item.at("id").get<std::string>()});
    } catch (const json::exception& e) {
      throw Error(Errc::invalid_argument, path.string() + ": " + e.what());
    }
  }
  if (entries.empty()) throw Error(Errc::invalid_argument, path.string() + ": manifest is empty");
  return entries;
}

// ----------------------------------------------------------------------
// compose

int cmd_compose(const fs::path& volume_path, const fs::path& endo_path, const fs::path& wall_path,
                int k, double sigma, std::uint64_t seed, const fs::path& out_path,
                const fs::path& trace_path) {
  log_line(LogLevel::info, "loading " + volume_path.string());
  const Volume3D raw = load_volume(volume_path, format_from_path(volume_path));
  const MaskPair masks = MaskPair::from_labelmaps(load_labelmap(endo_path, format_from_path(endo_path)),
                                                  load_labelmap(wall_path, format_from_path(wall_path)));
  const Volume3D normalized = normalize_intensity(raw);
  const Volume3D smoothed = gaussian_smooth(normalized, sigma);
  log_line(LogLevel::info, "clustering k=" + std::to_string(k));
  const ClusterModel cluster = kmeans(smoothed, k, seed);
  const CompositeTrace trace = compose(normalized, masks, cluster);
  save_labelmap(trace.final, out_path, format_from_path(out_path));
  atomic_write_bytes(trace_path, trace.trace_json());
  log_line(LogLevel::info, "wrote " + out_path.string() + " and " + trace_path.string());
  return kExitOk;
}

// ----------------------------------------------------------------------
// sweep

int cmd_sweep(const fs::path& volume_path, int k_min, int k_max, std::uint64_t seed, double sigma,
              std::size_t sample_cap, const fs::path& out_path, const std::string& format) {
  const Volume3D raw = load_volume(volume_path, format_from_path(volume_path));
  const Volume3D smoothed = gaussian_smooth(normalize_intensity(raw), sigma);
  const KSweepReport report = sweep_k(smoothed, k_min, k_max, seed, sample_cap);
  if (format == "json") {
    atomic_write_bytes(out_path, report.to_json());
  } else if (format == "csv") {
    atomic_write_bytes(out_path, report.to_csv());
  } else {
    throw Error(Errc::invalid_argument, "sweep supports --format json or csv");
  }
  return kExitOk;
}

// ----------------------------------------------------------------------
// eval

struct EvalArgs {
  fs::path manifest;
  fs::path real_features;
  fs::path synthetic_features;
  std::string name = "model";
  std::string metrics = "fid,mmd,msssim,psnr";
  std::string mmd_kernel = "dot";
  double rbf_gamma = 1.0;
  bool normalize = false;
  bool renormalize_msssim = false;
  bool fid_regularize = false;
  fs::path out_path;
  std::string format = "json";
};

bool metric_requested(const std::string& list, const std::string& name) {
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (item == name) return true;
  return false;
}

int cmd_eval(const EvalArgs& args) {
  const bool have_manifest = !args.manifest.empty();
  const bool have_real_feat = !args.real_features.empty();
  const bool have_syn_feat = !args.synthetic_features.empty();
  if (have_real_feat != have_syn_feat)
    throw Error(Errc::invalid_argument, "feature files must be given for both sides or neither");
  if (!have_manifest && !have_real_feat)
    throw Error(Errc::invalid_argument, "eval needs --manifest and/or feature files");

  ModelMetricsRow row;
  row.name = args.name;
  MetricsReport report;

  std::vector<Volume3D> real_volumes, syn_volumes;
  if (have_manifest) {
    for (const ManifestEntry& e : load_manifest(args.manifest)) {
      Volume3D r = load_volume(e.real, format_from_path(e.real));
      Volume3D s = load_volume(e.synthetic, format_from_path(e.synthetic));
      if (args.normalize) {
        r = normalize_intensity(r);
        s = normalize_intensity(s);
      }
      real_volumes.push_back(std::move(r));
      syn_volumes.push_back(std::move(s));
    }
    row.n_volumes = static_cast<int>(real_volumes.size());
  }

  // Per-pair voxel metrics.
  if (have_manifest && metric_requested(args.metrics, "psnr")) {
    std::vector<double> values;
    int unbounded = 0;
    for (std::size_t i = 0; i < real_volumes.size(); ++i) {
      try {
        values.push_back(psnr(real_volumes[i], syn_volumes[i], 1.0));
      } catch (const Error& e) {
        if (e.code() != Errc::zero_mse) throw;
        ++unbounded;  // identical pair: no finite PSNR
      }
    }
    if (!values.empty()) {
      double mean = 0.0;
      for (double v : values) mean += v;
      row.psnr_db = mean / static_cast<double>(values.size());
      if (values.size() >= 2) {
        const Summary s = summarize(values);
        report.summaries.push_back({row.name, "psnr_db", s.mean, s.stddev, s.n});
      }
    }
    if (unbounded > 0)
      log_line(LogLevel::warn, std::to_string(unbounded) + " pair(s) identical: PSNR unbounded, skipped");
  }
  if (have_manifest && metric_requested(args.metrics, "msssim")) {
    MsSsimConfig cfg;
    cfg.renormalize_weights = args.renormalize_msssim;
    std::vector<double> values;
    for (std::size_t i = 0; i < real_volumes.size(); ++i)
      values.push_back(ms_ssim(real_volumes[i], syn_volumes[i], cfg));
    double mean = 0.0;
    for (double v : values) mean += v;
    row.ms_ssim = mean / static_cast<double>(values.size());
    if (values.size() >= 2) {
      const Summary s = summarize(values);
      report.summaries.push_back({row.name, "ms_ssim", s.mean, s.stddev, s.n});
    }
  }

  // Distributional metrics over features.
  const bool want_fid = metric_requested(args.metrics, "fid");
  const bool want_mmd = metric_requested(args.metrics, "mmd");
  if (want_fid || want_mmd) {
    std::optional<FeatureSet> real_fs, syn_fs;
    if (have_real_feat) {
      real_fs = load_features(args.real_features);
      syn_fs = load_features(args.synthetic_features);
      row.feature_source = "file:" + args.real_features.string() + ";" + args.synthetic_features.string();
    } else {
      // Built-in descriptor on normalized copies; no silent mixing of sources.
      std::vector<double> rrows, srows;
      for (const Volume3D& v : real_volumes) {
        const auto f = extract_features(args.normalize ? v : normalize_intensity(v));
        rrows.insert(rrows.end(), f.begin(), f.end());
      }
      for (const Volume3D& v : syn_volumes) {
        const auto f = extract_features(args.normalize ? v : normalize_intensity(v));
        srows.insert(srows.end(), f.begin(), f.end());
      }
      real_fs = FeatureSet::from_rows(static_cast<std::int64_t>(real_volumes.size()), kPyramidFeatureDim,
                                      std::move(rrows));
      syn_fs = FeatureSet::from_rows(static_cast<std::int64_t>(syn_volumes.size()), kPyramidFeatureDim,
                                     std::move(srows));
      row.feature_source = kBuiltinFeatureSource;
    }
    if (row.n_volumes == 0) row.n_volumes = static_cast<int>(real_fs->n);
    if (want_fid) {
      if (real_fs->n < 2 || syn_fs->n < 2) {
        log_line(LogLevel::warn, "fid skipped: needs at least 2 feature rows per side");
      } else {
        FidOptions opts;
        opts.regularize = args.fid_regularize;
        row.fid = fid(moments(*real_fs), moments(*syn_fs), opts);
        if (args.fid_regularize) row.feature_source += ";fid_eps=1e-6";
      }
    }
    if (want_mmd) {
      const MmdKernel kernel = args.mmd_kernel == "rbf" ? MmdKernel::rbf : MmdKernel::dot;
      row.mmd = mmd2(*real_fs, *syn_fs, kernel, args.rbf_gamma);
    }
  }

  report.models.push_back(std::move(row));
  emit_report(report, args.out_path, report_format_from_name(args.format));
  return kExitOk;
}

// ----------------------------------------------------------------------
// augment

int cmd_augment(const fs::path& volume_path, const fs::path& labels_path, const fs::path& config_path,
                std::uint64_t seed, const fs::path& replay_path, const fs::path& out_volume,
                const fs::path& out_labels, const fs::path& plan_out) {
  const Volume3D v = load_volume(volume_path, format_from_path(volume_path));
  std::optional<LabelMap3D> labels;
  if (!labels_path.empty()) labels = load_labelmap(labels_path, format_from_path(labels_path));

  AugmentPlan plan;
  if (!replay_path.empty()) {
    plan = AugmentPlan::from_json(read_text_file(replay_path));
  } else {
    AugmentConfig config;
    if (!config_path.empty()) config = AugmentConfig::from_json(read_text_file(config_path));
    plan = sample_plan(seed, config);
  }

  auto [vol_out, lab_out] = apply(plan, v, labels);
  save_volume(vol_out, out_volume, format_from_path(out_volume));
  if (lab_out && !out_labels.empty())
    save_labelmap(*lab_out, out_labels, format_from_path(out_labels));
  if (!plan_out.empty()) atomic_write_bytes(plan_out, plan.to_json());
  return kExitOk;
}

// ----------------------------------------------------------------------
// diff

int cmd_diff_schedule(int steps, double offset, const fs::path& out_path, const std::string& format) {
  const NoiseSchedule s = cosine_schedule(steps, offset);
  if (format == "csv") {
    std::string out = "t,beta,alpha_bar\n";
    for (int t = 1; t <= s.steps; ++t) {
      out += std::to_string(t) + ',' + fmt_shortest(s.beta[static_cast<std::size_t>(t)]) + ',' +
             fmt_shortest(s.alpha_bar[static_cast<std::size_t>(t)]) + '\n';
    }
    atomic_write_bytes(out_path, out);
  } else if (format == "json") {
    json rows = json::array();
    for (int t = 1; t <= s.steps; ++t)
      rows.push_back({{"t", t},
                      {"beta", s.beta[static_cast<std::size_t>(t)]},
                      {"alpha_bar", s.alpha_bar[static_cast<std::size_t>(t)]}});
    atomic_write_bytes(out_path, json{{"steps", s.steps}, {"rows", std::move(rows)}}.dump(2) + "\n");
  } else {
    throw Error(Errc::invalid_argument, "diff schedule supports --format csv or json");
  }
  return kExitOk;
}

// ----------------------------------------------------------------------
// test

std::vector<std::pair<double, double>> load_pairs_csv(const fs::path& path) {
  std::istringstream lines(read_text_file(path));
  std::vector<std::pair<double, double>> pairs;
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw Error(Errc::invalid_argument, path.string() + ": line " + std::to_string(lineno) +
                                              " needs two comma-separated values");
    try {
      pairs.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw Error(Errc::invalid_argument,
                  path.string() + ": cannot parse line " + std::to_string(lineno));
    }
  }
  if (pairs.empty()) throw Error(Errc::invalid_argument, path.string() + ": no score pairs");
  return pairs;
}

int cmd_test_wilcoxon(const fs::path& pairs_path, const std::string& alternative, const fs::path& out_path) {
  const auto pairs = load_pairs_csv(pairs_path);
  std::vector<double> baseline, treatment;
  for (const auto& [b, t] : pairs) {
    baseline.push_back(b);
    treatment.push_back(t);
  }
  const WilcoxonResult r = wilcoxon_signed_rank(PairedScores::create(std::move(baseline), std::move(treatment)),
                                                alternative_from_name(alternative));
  const json j = {{"name", "wilcoxon_signed_rank"},
                  {"alternative", alternative},
                  {"W", r.w_plus},
                  {"p", r.p},
                  {"n", r.n},
                  {"method", r.method}};
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    atomic_write_bytes(out_path, text);
  }
  return kExitOk;
}

int cmd_test_summarize(const fs::path& values_path, const fs::path& out_path) {
  std::istringstream lines(read_text_file(values_path));
  std::vector<double> values;
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    values.push_back(std::stod(line));
  }
  const Summary s = summarize(values);
  const json j = {{"mean", s.mean}, {"stddev", s.stddev}, {"n", s.n}};
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    atomic_write_bytes(out_path, text);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LGE SynthLab: composite semantic label maps and 3-D synthesis quality metrics"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "cap worker threads (default: all cores)");

  // compose
  auto* compose_cmd = app.add_subcommand("compose", "build a composite semantic label map");
  fs::path c_volume, c_endo, c_wall, c_out, c_trace;
  int c_k = 2;
  double c_sigma = 1.0;
  std::uint64_t c_seed = 0;
  compose_cmd->add_option("--volume", c_volume, "input MRI volume")->required();
  compose_cmd->add_option("--endo", c_endo, "endocardium binary mask")->required();
  compose_cmd->add_option("--wall", c_wall, "wall binary mask")->required();
  compose_cmd->add_option("--k", c_k, "cluster count")->check(CLI::Range(2, 5));
  compose_cmd->add_option("--sigma", c_sigma, "pre-clustering smoothing sigma (voxels)");
  compose_cmd->add_option("--seed", c_seed, "clustering seed");
  compose_cmd->add_option("--out", c_out, "output label map path")->required();
  compose_cmd->add_option("--trace", c_trace, "output JSON trace path")->required();

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "score k-means over a range of k");
  fs::path s_volume, s_out;
  int s_kmin = 2, s_kmax = 10;
  double s_sigma = 1.0;
  std::uint64_t s_seed = 0;
  std::size_t s_cap = kSilhouetteDefaultCap;
  std::string s_format = "csv";
  sweep_cmd->add_option("--volume", s_volume, "input MRI volume")->required();
  sweep_cmd->add_option("--k-min", s_kmin, "first k")->check(CLI::Range(2, 64));
  sweep_cmd->add_option("--k-max", s_kmax, "last k")->check(CLI::Range(2, 64));
  sweep_cmd->add_option("--sigma", s_sigma, "pre-clustering smoothing sigma (voxels)");
  sweep_cmd->add_option("--seed", s_seed, "clustering seed");
  sweep_cmd->add_option("--sample-cap", s_cap, "silhouette subsample cap");
  sweep_cmd->add_option("--out", s_out, "output report path")->required();
  sweep_cmd->add_option("--format", s_format, "json|csv");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "compute synthetic-image quality metrics");
  EvalArgs e;
  eval_cmd->add_option("--manifest", e.manifest, "JSON list of {real, synthetic, id} pairs");
  eval_cmd->add_option("--real-features", e.real_features, "FEAT/CSV features for real volumes");
  eval_cmd->add_option("--synthetic-features", e.synthetic_features, "FEAT/CSV features for synthetic volumes");
  eval_cmd->add_option("--name", e.name, "model name for the report row");
  eval_cmd->add_option("--metrics", e.metrics, "comma list from fid,mmd,msssim,psnr");
  eval_cmd->add_option("--mmd-kernel", e.mmd_kernel, "dot|rbf")->check(CLI::IsMember({"dot", "rbf"}));
  eval_cmd->add_option("--rbf-gamma", e.rbf_gamma, "rbf kernel gamma");
  eval_cmd->add_flag("--normalize", e.normalize, "min-max normalize volumes before metrics");
  eval_cmd->add_flag("--renormalize-msssim", e.renormalize_msssim, "rescale scale weights to sum 1");
  eval_cmd->add_flag("--fid-regularize", e.fid_regularize, "add 1e-6*I to covariances");
  eval_cmd->add_option("--out", e.out_path, "output report path")->required();
  eval_cmd->add_option("--format", e.format, "json|csv|table");

  // augment
  auto* augment_cmd = app.add_subcommand("augment", "seeded offline augmentation");
  fs::path a_volume, a_labels, a_config, a_replay, a_out_volume, a_out_labels, a_plan_out;
  std::uint64_t a_seed = 0;
  augment_cmd->add_option("--volume", a_volume, "input volume")->required();
  augment_cmd->add_option("--labels", a_labels, "optional label map transformed alongside");
  augment_cmd->add_option("--config", a_config, "JSON op probabilities and ranges");
  augment_cmd->add_option("--seed", a_seed, "plan sampling seed");
  augment_cmd->add_option("--replay", a_replay, "replay a recorded plan JSON instead of sampling");
  augment_cmd->add_option("--out-volume", a_out_volume, "output volume path")->required();
  augment_cmd->add_option("--out-labels", a_out_labels, "output label map path");
  augment_cmd->add_option("--plan-out", a_plan_out, "record the executed plan here");

  // diff
  auto* diff_cmd = app.add_subcommand("diff", "diffusion-process numerics");
  auto* sched_cmd = diff_cmd->add_subcommand("schedule", "emit a cosine noise schedule");
  int d_steps = 1000;
  double d_offset = kCosineDefaultOffset;
  fs::path d_out;
  std::string d_format = "csv";
  sched_cmd->add_option("--steps", d_steps, "step count T")->check(CLI::PositiveNumber);
  sched_cmd->add_option("--offset", d_offset, "cosine offset s");
  sched_cmd->add_option("--out", d_out, "output path")->required();
  sched_cmd->add_option("--format", d_format, "csv|json");

  auto* noise_cmd = diff_cmd->add_subcommand("noise", "forward-noise a latent tensor");
  fs::path n_latent, n_eps, n_out;
  int n_t = 0, n_steps = 1000;
  double n_offset = kCosineDefaultOffset;
  noise_cmd->add_option("--latent", n_latent, "LTNS input z")->required();
  noise_cmd->add_option("--eps", n_eps, "LTNS noise tensor")->required();
  noise_cmd->add_option("--t", n_t, "diffusion step")->required();
  noise_cmd->add_option("--steps", n_steps, "schedule length T");
  noise_cmd->add_option("--offset", n_offset, "cosine offset s");
  noise_cmd->add_option("--out", n_out, "LTNS output z_t")->required();

  auto* loss_cmd = diff_cmd->add_subcommand("loss", "denoising MSE between two tensors");
  fs::path l_true, l_pred, l_out;
  loss_cmd->add_option("--target", l_true, "LTNS true noise")->required();
  loss_cmd->add_option("--pred", l_pred, "LTNS predicted noise")->required();
  loss_cmd->add_option("--out", l_out, "JSON output (stdout when omitted)");

  auto* cfg_cmd = diff_cmd->add_subcommand("cfg", "classifier-free guidance blend");
  fs::path g_uncond, g_cond, g_out;
  double g_weight = 1.5;
  cfg_cmd->add_option("--uncond", g_uncond, "LTNS unconditional prediction")->required();
  cfg_cmd->add_option("--cond", g_cond, "LTNS conditional prediction")->required();
  cfg_cmd->add_option("--weight", g_weight, "guidance weight");
  cfg_cmd->add_option("--out", g_out, "LTNS output")->required();

  // test
  auto* test_cmd = app.add_subcommand("test", "statistical tests and summaries");
  auto* wilcoxon_cmd = test_cmd->add_subcommand("wilcoxon", "paired signed-rank test");
  fs::path w_pairs, w_out;
  std::string w_alt = "greater";
  wilcoxon_cmd->add_option("--pairs", w_pairs, "CSV of baseline,treatment per line")->required();
  wilcoxon_cmd->add_option("--alternative", w_alt, "greater|less|two-sided");
  wilcoxon_cmd->add_option("--out", w_out, "JSON output (stdout when omitted)");

  auto* summarize_cmd = test_cmd->add_subcommand("summarize", "mean and sample std of values");
  fs::path m_values, m_out;
  summarize_cmd->add_option("--values", m_values, "one value per line")->required();
  summarize_cmd->add_option("--out", m_out, "JSON output (stdout when omitted)");

  diff_cmd->require_subcommand(1);
  test_cmd->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    if (err.get_exit_code() == 0) return app.exit(err);  // --help
    app.exit(err);
    return kExitUsage;
  }

  if (threads > 0) par::set_threads(threads);

  try {
    if (compose_cmd->parsed())
      return cmd_compose(c_volume, c_endo, c_wall, c_k, c_sigma, c_seed, c_out, c_trace);
    if (sweep_cmd->parsed()) {
      if (s_kmax < s_kmin) throw CLI::ValidationError("--k-max must be >= --k-min");
      return cmd_sweep(s_volume, s_kmin, s_kmax, s_seed, s_sigma, s_cap, s_out, s_format);
    }
    if (eval_cmd->parsed()) return cmd_eval(e);
    if (augment_cmd->parsed())
      return cmd_augment(a_volume, a_labels, a_config, a_seed, a_replay, a_out_volume, a_out_labels,
                         a_plan_out);
    if (sched_cmd->parsed()) return cmd_diff_schedule(d_steps, d_offset, d_out, d_format);
    if (noise_cmd->parsed()) {
      const LatentTensor z = load_tensor(n_latent);
      const LatentTensor eps = load_tensor(n_eps);
      save_tensor(forward_noise(z, n_t, cosine_schedule(n_steps, n_offset), eps), n_out);
      return kExitOk;
    }
    if (loss_cmd->parsed()) {
      const double loss = denoise_loss(load_tensor(l_true), load_tensor(l_pred));
      const std::string text = json{{"denoise_mse", loss}}.dump(2) + "\n";
      if (l_out.empty())
        std::cout << text;
      else
        atomic_write_bytes(l_out, text);
      return kExitOk;
    }
    if (cfg_cmd->parsed()) {
      save_tensor(cfg_blend(load_tensor(g_uncond), load_tensor(g_cond), g_weight), g_out);
      return kExitOk;
    }
    if (wilcoxon_cmd->parsed()) return cmd_test_wilcoxon(w_pairs, w_alt, w_out);
    if (summarize_cmd->parsed()) return cmd_test_summarize(m_values, m_out);
    throw CLI::ValidationError("no subcommand selected");
  } catch (const CLI::ValidationError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitUsage;
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitData;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << "\n";
    return kExitInternal;
  }
}
