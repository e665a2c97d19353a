#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "netreplica/eval.hpp"
#include "netreplica/ingest.hpp"
#include "netreplica/manifest.hpp"
#include "netreplica/pipeline.hpp"
#include "netreplica/prep.hpp"
#include "netreplica/profile_io.hpp"
#include "netreplica/sim/simulator.hpp"
#include "netreplica/store.hpp"
#include "netreplica/version.hpp"

namespace netreplica::cli {

namespace fs = std::filesystem;

uint64_t resolve_seed(const std::optional<uint64_t>& flag_seed) {
  if (flag_seed) return *flag_seed;
  if (const char* env = std::getenv("NETREPLICA_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 0;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing input file: " + path);
  RunConfig cfg;
  std::string line;
  uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto strip = [](std::string s) {
      const auto begin = s.find_first_not_of(" \t\r");
      if (begin == std::string::npos) return std::string();
      const auto end = s.find_last_not_of(" \t\r");
      return s.substr(begin, end - begin + 1);
    };
    const std::string text = strip(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  " is not key = value");
    }
    cfg.values[strip(text.substr(0, eq))] = strip(text.substr(eq + 1));
  }
  return cfg;
}

std::string RunConfig::get(const std::string& key, const std::string& fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

bool RunConfig::has(const std::string& key) const { return values.contains(key); }

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto begin = item.find_first_not_of(" \t");
    if (begin == std::string::npos) continue;
    const auto end = item.find_last_not_of(" \t");
    out.push_back(item.substr(begin, end - begin + 1));
  }
  return out;
}

std::vector<double> split_doubles(const std::string& text, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw std::invalid_argument("config key '" + key + "' has non-numeric entry: " + item);
    }
  }
  return out;
}

double get_double(const RunConfig& cfg, const std::string& key, double fallback) {
  if (!cfg.has(key)) return fallback;
  try {
    return std::stod(cfg.get(key));
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "' is not numeric");
  }
}

sim::AqmPolicy parse_aqm_name(const std::string& name) {
  if (name == "pfifo") return sim::AqmPolicy::Pfifo;
  if (name == "codel") return sim::AqmPolicy::Codel;
  if (name == "fq_codel") return sim::AqmPolicy::FqCodel;
  throw std::invalid_argument("config key 'aqms' names unknown policy: " + name);
}

struct StageFailure : std::runtime_error {
  StageFailure(const std::string& stage, const std::string& what, int code)
      : std::runtime_error("stage " + stage + " failed: " + what), exit_code(code) {}
  int exit_code;
};

template <typename Fn>
auto run_stage(const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const ingest::ParseError& e) {
    throw StageFailure(name, e.what(), kValidationError);
  } catch (const store::QueryError& e) {
    throw StageFailure(name, e.what(), kValidationError);
  } catch (const std::invalid_argument& e) {
    throw StageFailure(name, e.what(), kValidationError);
  } catch (const std::exception& e) {
    throw StageFailure(name, e.what(), kIoError);
  }
}

double percentile(std::vector<double> xs, double q) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const auto rank = static_cast<size_t>(std::ceil(q * static_cast<double>(xs.size())));
  return xs[std::max<size_t>(rank, 1) - 1];
}

}  // namespace

namespace {

int cmd_run_impl(const RunOptions& opts) {
  const RunConfig cfg = RunConfig::load(opts.config_path);

  const std::string out_dir = !opts.out_dir.empty() ? opts.out_dir : cfg.get("out_dir");
  if (out_dir.empty()) throw std::invalid_argument("out_dir missing (config key or --out-dir)");
  fs::create_directories(out_dir);
  fs::create_directories(out_dir + "/traces");
  fs::create_directories(out_dir + "/eval");

  const std::string trace = cfg.get("trace");
  if (trace.empty()) throw std::invalid_argument("config key 'trace' is required");

  // Grid parameters are validated before any stage runs.
  std::vector<double> rates_bps;
  for (const double mbps : split_doubles(cfg.get("rates_mbps", "4,6,8,10"), "rates_mbps")) {
    rates_bps.push_back(mbps * 1e6);
  }
  if (!cfg.has("latencies_ms")) {
    throw std::invalid_argument("config key 'latencies_ms' is required (comma-separated list)");
  }
  const std::vector<double> latencies = split_doubles(cfg.get("latencies_ms"), "latencies_ms");
  std::vector<std::pair<std::string, sim::AqmPolicy>> aqms;
  for (const auto& name : split_list(cfg.get("aqms", "pfifo"))) {
    aqms.emplace_back(name, parse_aqm_name(name));
  }
  if (rates_bps.empty() || latencies.empty() || aqms.empty()) {
    throw std::invalid_argument("rates_mbps, latencies_ms, and aqms must be non-empty");
  }

  const double duration_s = get_double(cfg, "duration_s", 30.0);
  const auto telemetry_ms = static_cast<uint32_t>(get_double(cfg, "telemetry_ms", 100));
  const auto queue_pkts = static_cast<uint32_t>(get_double(cfg, "queue_pkts", 1000));
  uint64_t seed = static_cast<uint64_t>(get_double(cfg, "seed", -1));
  if (!cfg.has("seed")) seed = resolve_seed(std::nullopt);
  const unsigned jobs =
      opts.jobs.value_or(static_cast<unsigned>(get_double(cfg, "jobs", 1)));

  // --- transform ---
  const std::string profiles_path = out_dir + "/profiles.jsonl";
  run_stage("transform", [&]() {
    const auto t0 = std::chrono::steady_clock::now();
    if (!fs::exists(trace)) throw std::runtime_error("missing input file: " + trace);
    const auto format = cfg.get("format", "auto") == "pcap" ? ingest::TraceFormat::Pcap
                        : cfg.get("format", "auto") == "csv"
                            ? ingest::TraceFormat::PacketCsv
                            : ingest::guess_format(trace);
    ingest::IngestConfig icfg;
    for (const auto& text : split_list(cfg.get("internal_prefix"))) {
      const auto prefix = CidrPrefix::parse(text);
      if (!prefix) throw std::invalid_argument("bad internal_prefix: " + text);
      icfg.internal_prefixes.push_back(*prefix);
    }
    if (icfg.internal_prefixes.empty()) {
      throw std::invalid_argument("config key 'internal_prefix' is required");
    }
    const auto records = ingest::parse_trace(trace, format);
    const auto decomposition = ingest::decompose(records, icfg);
    std::vector<CrossTrafficProfile> profiles;
    if (!records.empty() && !decomposition.groups.empty()) {
      const auto bin_ms = static_cast<uint32_t>(get_double(cfg, "bin_ms", 100));
      const auto hosts = ctp::build_host_series(decomposition, bin_ms,
                                                records.front().timestamp,
                                                records.back().timestamp);
      const auto tree = ctp::build_prefix_tree(hosts);
      ctp::WindowConfig wcfg;
      wcfg.durations_s = split_doubles(cfg.get("window_s", "60"), "window_s");
      wcfg.stride_s = get_double(cfg, "stride_s", 10.0);
      profiles = ctp::extract_windows(*tree, wcfg, fs::path(trace).filename().string());
    }
    write_profiles_jsonl(profiles_path, profiles);
    RunManifest m;
    m.tool_version = NETREPLICA_VERSION;
    m.subcommand = "run/transform";
    m.parameters["trace"] = trace;
    m.add_input(trace);
    m.add_output(profiles_path);
    m.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    m.write(profiles_path);
    return 0;
  });

  // --- select ---
  const std::string selected_path = out_dir + "/selected.jsonl";
  run_stage("select", [&]() {
    const auto t0 = std::chrono::steady_clock::now();
    store::ProfileStore db(profiles_path);
    const auto query = store::ProfileQuery::parse(
        cfg.get("filter", "mean_throughput_bps>=0"),
        cfg.has("select_limit")
            ? std::optional<uint64_t>(static_cast<uint64_t>(get_double(cfg, "select_limit", 0)))
            : std::nullopt,
        cfg.get("order_by", ""));
    write_profiles_jsonl(selected_path, db.select(query));
    RunManifest m;
    m.tool_version = NETREPLICA_VERSION;
    m.subcommand = "run/select";
    m.parameters["filter"] = cfg.get("filter", "mean_throughput_bps>=0");
    m.add_input(profiles_path);
    m.add_output(selected_path);
    m.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    m.write(selected_path);
    return 0;
  });

  // --- trim ---
  const std::string trimmed_path = out_dir + "/trimmed.jsonl";
  const double max_rate = *std::max_element(rates_bps.begin(), rates_bps.end());
  const double trim_threshold = get_double(cfg, "trim_threshold_bps", max_rate);
  run_stage("trim", [&]() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto profiles = read_profiles_jsonl(selected_path);
    std::vector<CrossTrafficProfile> trimmed;
    std::string reports;
    for (const auto& p : profiles) {
      auto [t, rep] = prep::trim_profile(p, trim_threshold);
      nlohmann::ordered_json r;
      r["profile_id"] = rep.profile_id;
      r["scale_factor"] = rep.scale_factor;
      r["original_peak_bps"] = rep.original_peak_bps;
      r["threshold_bps"] = rep.threshold_bps;
      reports += r.dump() + "\n";
      trimmed.push_back(std::move(t));
    }
    write_profiles_jsonl(trimmed_path, trimmed);
    std::ofstream rep_out(trimmed_path + ".reports.jsonl", std::ios::trunc);
    rep_out << reports;
    RunManifest m;
    m.tool_version = NETREPLICA_VERSION;
    m.subcommand = "run/trim";
    m.parameters["threshold_bps"] = std::to_string(trim_threshold);
    m.add_input(selected_path);
    m.add_output(trimmed_path);
    m.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    m.write(trimmed_path);
    return 0;
  });

  // --- sample ---
  const std::string sampled_path = out_dir + "/sampled.jsonl";
  run_stage("sample", [&]() {
    const auto t0 = std::chrono::steady_clock::now();
    prep::SamplingPlan plan;
    plan.on_threshold_bps = get_double(cfg, "on_threshold_bps", 3e6);
    plan.segment_ms = static_cast<uint32_t>(get_double(cfg, "segment_ms", 100));
    plan.toggle_min = static_cast<uint32_t>(get_double(cfg, "toggle_min", 1));
    plan.toggle_max = static_cast<uint32_t>(get_double(cfg, "toggle_max", 100));
    plan.per_bucket = static_cast<uint64_t>(get_double(cfg, "per_bucket", 50));
    plan.seed = seed;
    const auto profiles = read_profiles_jsonl(trimmed_path);
    const auto result = prep::stratified_sample(profiles, plan);
    write_profiles_jsonl(sampled_path, result.profiles);
    RunManifest m;
    m.tool_version = NETREPLICA_VERSION;
    m.subcommand = "run/sample";
    m.parameters["seed"] = std::to_string(plan.seed);
    m.parameters["per_bucket"] = std::to_string(plan.per_bucket);
    m.add_input(trimmed_path);
    m.add_output(sampled_path);
    m.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    m.write(sampled_path);
    return 0;
  });

  // --- simulate grid ---
  const auto sampled = read_profiles_jsonl(sampled_path);
  if (sampled.empty()) {
    std::cerr << "warning: empty sample set; simulate stage skipped\n";
    std::cout << "traces: 0\n";
    return kOk;
  }

  struct GridPoint {
    double rate_bps;
    double latency_ms;
    std::string aqm_name;
    sim::AqmPolicy aqm;
    std::string ctp_id;
  };
  std::vector<GridPoint> grid;
  std::vector<sim::BatchItem> items;
  for (const double rate : rates_bps) {
    for (const double latency : latencies) {
      for (const auto& [aqm_name, aqm] : aqms) {
        for (const auto& p : sampled) {
          sim::BatchItem item;
          item.bottleneck.shaping_rate_bps = rate;
          item.bottleneck.base_latency_ms = latency;
          item.bottleneck.queue_capacity_pkts = queue_pkts;
          item.bottleneck.aqm = aqm;
          item.app.duration_s = duration_s;
          item.app.seed = seed;
          item.telemetry_bin_ms = telemetry_ms;
          item.ctp = p;
          items.push_back(std::move(item));
          grid.push_back({rate, latency, aqm_name, aqm, p.id});
        }
      }
    }
  }

  const auto results = run_stage("simulate", [&]() { return sim::run_batch(items, jobs); });

  uint64_t failures = 0;
  std::vector<std::pair<GridPoint, const sim::SimTrace*>> completed;
  for (size_t i = 0; i < results.size(); ++i) {
    const auto& g = grid[i];
    if (!results[i].error.empty()) {
      ++failures;
      std::cerr << "simulate item " << i << " failed: " << results[i].error << "\n";
      continue;
    }
    std::ostringstream name;
    name << "trace_" << std::setfill('0') << std::setw(4) << i << "_r"
         << static_cast<int64_t>(g.rate_bps) << "_l" << static_cast<int64_t>(g.latency_ms)
         << "_" << g.aqm_name << "_" << g.ctp_id.substr(0, 8) << ".json";
    const std::string path = out_dir + "/traces/" + name.str();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << results[i].trace->to_json().dump() << "\n";
    out.close();
    RunManifest m;
    m.tool_version = NETREPLICA_VERSION;
    m.subcommand = "run/simulate";
    m.parameters["rate_bps"] = std::to_string(g.rate_bps);
    m.parameters["latency_ms"] = std::to_string(g.latency_ms);
    m.parameters["aqm"] = g.aqm_name;
    m.parameters["ctp_id"] = g.ctp_id;
    m.parameters["seed"] = std::to_string(seed);
    m.add_input(sampled_path);
    m.add_output(path);
    m.write(path);
    completed.emplace_back(g, &*results[i].trace);
  }

  // --- eval ---
  run_stage("eval", [&]() {
    nlohmann::ordered_json report;
    report["traces"] = completed.size();
    report["failures"] = failures;

    // Per-configuration DTW consistency across the sampled CTPs.
    auto groups = nlohmann::ordered_json::array();
    std::map<std::string, std::vector<const sim::SimTrace*>> by_config;
    std::map<std::string, std::vector<std::string>> group_ids;
    for (const auto& [g, trace] : completed) {
      std::ostringstream key;
      key << static_cast<int64_t>(g.rate_bps) << "bps_" << static_cast<int64_t>(g.latency_ms)
          << "ms_" << g.aqm_name;
      by_config[key.str()].push_back(trace);
      group_ids[key.str()].push_back(g.ctp_id);
    }
    for (const auto& [key, traces] : by_config) {
      nlohmann::ordered_json entry;
      entry["configuration"] = key;
      entry["traces"] = traces.size();
      if (traces.size() >= 2) {
        std::vector<std::vector<double>> series;
        series.reserve(traces.size());
        for (const auto* t : traces) series.push_back(t->throughput_bps);
        const auto summary = eval::pairwise_consistency(series, group_ids[key]);
        entry["dtw_throughput_mean"] = summary.mean;
        entry["dtw_throughput_std"] = summary.stddev;
      }
      groups.push_back(std::move(entry));
    }
    report["configurations"] = std::move(groups);

    // Feature matrix for external coverage analysis.
    std::ostringstream features;
    features.precision(10);
    for (const auto& [g, t] : completed) {
      std::vector<double> thr = t->throughput_bps;
      std::vector<double> rtt;
      for (const double v : t->rtt_ms) {
        if (!std::isnan(v)) rtt.push_back(v);
      }
      const double mean_thr =
          std::accumulate(thr.begin(), thr.end(), 0.0) / static_cast<double>(thr.size());
      const double mean_rtt =
          rtt.empty() ? 0.0
                      : std::accumulate(rtt.begin(), rtt.end(), 0.0) /
                            static_cast<double>(rtt.size());
      uint64_t drops = 0;
      for (const uint64_t d : t->drops) drops += d;
      features << g.rate_bps << ',' << g.latency_ms << ','
               << static_cast<int>(g.aqm) << ',' << mean_thr << ','
               << percentile(thr, 0.95) << ',' << mean_rtt << ',' << percentile(rtt, 0.95)
               << ',' << t->totals.min_rtt_ms << ',' << drops << '\n';
    }
    const std::string features_path = out_dir + "/eval/features.csv";
    std::ofstream fout(features_path, std::ios::trunc);
    fout << features.str();
    fout.close();

    const std::string report_path = out_dir + "/eval/report.json";
    std::ofstream rout(report_path, std::ios::trunc);
    rout << report.dump(2) << "\n";
    rout.close();
    RunManifest m;
    m.tool_version = NETREPLICA_VERSION;
    m.subcommand = "run/eval";
    m.add_input(sampled_path);
    m.add_output(report_path);
    m.add_output(features_path);
    m.write(report_path);
    return 0;
  });

  std::cout << "traces: " << completed.size() << "\n"
            << "failures: " << failures << "\n"
            << "out_dir: " << out_dir << "\n";
  return kOk;
}

}  // namespace

int cmd_run(const RunOptions& opts) {
  try {
    return cmd_run_impl(opts);
  } catch (const StageFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code;
  }
}

}  // namespace netreplica::cli
