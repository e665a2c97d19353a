#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

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

namespace fs = std::filesystem;
using namespace netreplica;
using cli::kIoError;
using cli::kOk;
using cli::kValidationError;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int classify_exception() {
  try {
    throw;
  } catch (const ingest::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const store::QueryError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  }
}

void require_input(const std::string& path) {
  if (!fs::exists(path)) throw std::runtime_error("missing input file: " + path);
}

std::vector<double> read_float_csv_flat(const std::string& path) {
  require_input(path);
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<double> out;
  std::string cell;
  while (std::getline(in, cell)) {
    size_t start = 0;
    while (start <= cell.size()) {
      const size_t comma = cell.find(',', start);
      const std::string field =
          cell.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (!field.empty()) {
        try {
          out.push_back(std::stod(field));
        } catch (const std::exception&) {
          throw std::invalid_argument("non-numeric value '" + field + "' in " + path);
        }
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  if (out.empty()) throw std::invalid_argument("no values in " + path);
  return out;
}

std::vector<std::vector<double>> read_float_csv_rows(const std::string& path) {
  require_input(path);
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    size_t start = 0;
    while (start <= line.size()) {
      const size_t comma = line.find(',', start);
      const std::string field =
          line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (!field.empty()) {
        try {
          row.push_back(std::stod(field));
        } catch (const std::exception&) {
          throw std::invalid_argument("non-numeric value '" + field + "' in " + path);
        }
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("no rows in " + path);
  return rows;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

// --- transform --------------------------------------------------------------

struct TransformOptions {
  std::string trace;
  std::string format = "auto";
  std::vector<std::string> prefixes;
  uint32_t bin_ms = 100;
  std::vector<double> windows_s = {60.0};
  double stride_s = 10.0;
  bool keep_non_crossing = false;
  std::string out;
};

int cmd_transform(const TransformOptions& opt) {
  Stopwatch timer;
  require_input(opt.trace);

  ingest::TraceFormat format;
  if (opt.format == "pcap") {
    format = ingest::TraceFormat::Pcap;
  } else if (opt.format == "csv") {
    format = ingest::TraceFormat::PacketCsv;
  } else if (opt.format == "auto") {
    format = ingest::guess_format(opt.trace);
  } else {
    throw std::invalid_argument("format must be pcap, csv, or auto");
  }

  ingest::IngestConfig cfg;
  cfg.drop_non_crossing = !opt.keep_non_crossing;
  for (const auto& text : opt.prefixes) {
    const auto prefix = CidrPrefix::parse(text);
    if (!prefix) throw std::invalid_argument("bad CIDR prefix: " + text);
    cfg.internal_prefixes.push_back(*prefix);
  }
  if (cfg.internal_prefixes.empty()) {
    throw std::invalid_argument("at least one --internal-prefix is required");
  }

  uint64_t non_ip = 0;
  const auto records = ingest::parse_trace(opt.trace, format, &non_ip);
  const auto decomposition = ingest::decompose(records, cfg);

  std::vector<CrossTrafficProfile> profiles;
  if (!records.empty() && !decomposition.groups.empty()) {
    const double start = records.front().timestamp;
    const double end = records.back().timestamp;
    const auto hosts = ctp::build_host_series(decomposition, opt.bin_ms, start, end);
    const auto tree = ctp::build_prefix_tree(hosts);
    ctp::WindowConfig wcfg;
    wcfg.durations_s = opt.windows_s;
    wcfg.stride_s = opt.stride_s;
    profiles = ctp::extract_windows(*tree, wcfg, fs::path(opt.trace).filename().string());
  }
  write_profiles_jsonl(opt.out, profiles);

  RunManifest manifest;
  manifest.tool_version = NETREPLICA_VERSION;
  manifest.subcommand = "transform";
  manifest.parameters["trace"] = opt.trace;
  manifest.parameters["format"] = opt.format;
  for (size_t i = 0; i < cfg.internal_prefixes.size(); ++i) {
    manifest.parameters["internal_prefix." + std::to_string(i)] =
        cfg.internal_prefixes[i].to_string();
  }
  manifest.parameters["bin_ms"] = std::to_string(opt.bin_ms);
  for (size_t i = 0; i < opt.windows_s.size(); ++i) {
    manifest.parameters["window_s." + std::to_string(i)] = std::to_string(opt.windows_s[i]);
  }
  manifest.parameters["stride_s"] = std::to_string(opt.stride_s);
  manifest.parameters["drop_non_crossing"] = cfg.drop_non_crossing ? "true" : "false";
  manifest.add_input(opt.trace);
  manifest.add_output(opt.out);
  manifest.duration_s = timer.seconds();
  manifest.write(opt.out);

  std::cout << "profiles: " << profiles.size() << "\n"
            << "records: " << records.size() << "\n"
            << "dropped_packets: " << decomposition.dropped.packets() << "\n"
            << "non_ip_frames: " << non_ip << "\n";
  return kOk;
}

// --- select -----------------------------------------------------------------

struct SelectOptions {
  std::string store;
  std::string filter;
  std::optional<uint64_t> limit;
  std::string order_by;
  std::string out;
};

int cmd_select(const SelectOptions& opt) {
  Stopwatch timer;
  require_input(opt.store);
  store::ProfileStore db(opt.store);
  const auto query = store::ProfileQuery::parse(opt.filter, opt.limit, opt.order_by);
  const auto rows = db.select(query);
  write_profiles_jsonl(opt.out, rows);

  RunManifest manifest;
  manifest.tool_version = NETREPLICA_VERSION;
  manifest.subcommand = "select";
  manifest.parameters["store"] = opt.store;
  manifest.parameters["filter"] = opt.filter;
  if (opt.limit) manifest.parameters["limit"] = std::to_string(*opt.limit);
  if (!opt.order_by.empty()) manifest.parameters["order_by"] = opt.order_by;
  manifest.add_input(opt.store);
  manifest.add_output(opt.out);
  manifest.duration_s = timer.seconds();
  manifest.write(opt.out);

  std::cout << "selected: " << rows.size() << "\n";
  return kOk;
}

// --- trim -------------------------------------------------------------------

struct TrimOptions {
  std::string in;
  double threshold_bps = 0.0;
  std::string out;
  std::string reports;
};

int cmd_trim(const TrimOptions& opt) {
  Stopwatch timer;
  require_input(opt.in);
  const auto profiles = read_profiles_jsonl(opt.in);

  std::vector<CrossTrafficProfile> trimmed;
  trimmed.reserve(profiles.size());
  nlohmann::ordered_json reports = nlohmann::ordered_json::array();
  std::string reports_text;
  for (const auto& p : profiles) {
    auto [t, report] = prep::trim_profile(p, opt.threshold_bps);
    trimmed.push_back(std::move(t));
    nlohmann::ordered_json r;
    r["profile_id"] = report.profile_id;
    r["scale_factor"] = report.scale_factor;
    r["original_peak_bps"] = report.original_peak_bps;
    r["threshold_bps"] = report.threshold_bps;
    reports_text += r.dump() + "\n";
  }
  write_profiles_jsonl(opt.out, trimmed);
  const std::string reports_path =
      opt.reports.empty() ? opt.out + ".reports.jsonl" : opt.reports;
  write_text(reports_path, reports_text);

  RunManifest manifest;
  manifest.tool_version = NETREPLICA_VERSION;
  manifest.subcommand = "trim";
  manifest.parameters["in"] = opt.in;
  manifest.parameters["threshold_bps"] = std::to_string(opt.threshold_bps);
  manifest.add_input(opt.in);
  manifest.add_output(opt.out);
  manifest.add_output(reports_path);
  manifest.duration_s = timer.seconds();
  manifest.write(opt.out);

  std::cout << "trimmed: " << trimmed.size() << "\n";
  return kOk;
}

// --- sample -----------------------------------------------------------------

struct SampleOptions {
  std::string in;
  std::string out;
  prep::SamplingPlan plan;
  std::optional<uint64_t> seed_flag;
};

int cmd_sample(const SampleOptions& opt) {
  Stopwatch timer;
  require_input(opt.in);
  prep::SamplingPlan plan = opt.plan;
  plan.seed = cli::resolve_seed(opt.seed_flag);

  const auto profiles = read_profiles_jsonl(opt.in);
  const auto result = prep::stratified_sample(profiles, plan);
  write_profiles_jsonl(opt.out, result.profiles);

  RunManifest manifest;
  manifest.tool_version = NETREPLICA_VERSION;
  manifest.subcommand = "sample";
  manifest.parameters["in"] = opt.in;
  manifest.parameters["on_threshold_bps"] = std::to_string(plan.on_threshold_bps);
  manifest.parameters["segment_ms"] = std::to_string(plan.segment_ms);
  manifest.parameters["toggle_min"] = std::to_string(plan.toggle_min);
  manifest.parameters["toggle_max"] = std::to_string(plan.toggle_max);
  manifest.parameters["per_bucket"] = std::to_string(plan.per_bucket);
  manifest.parameters["seed"] = std::to_string(plan.seed);
  manifest.add_input(opt.in);
  manifest.add_output(opt.out);
  manifest.duration_s = timer.seconds();
  manifest.write(opt.out);

  uint64_t short_buckets = 0;
  for (const auto& [value, available] : result.bucket_available) {
    if (available < plan.per_bucket) ++short_buckets;
  }
  std::cout << "sampled: " << result.profiles.size() << "\n"
            << "buckets: " << result.bucket_available.size() << "\n"
            << "short_buckets: " << short_buckets << "\n";
  return kOk;
}

// --- simulate ----------------------------------------------------------------

struct SimulateOptions {
  sim::BottleneckConfig bottleneck;
  std::string aqm = "pfifo";
  std::optional<uint32_t> burst;
  std::string ctp;    // id or path
  std::string store;  // id lookup source
  double duration_s = 30.0;
  uint32_t telemetry_ms = 100;
  std::optional<uint64_t> seed_flag;
  uint32_t cwnd = 10;
  uint32_t ssthresh = 64;
  std::string out;
  std::string csv;
};

sim::AqmPolicy parse_aqm(const std::string& name) {
  if (name == "pfifo") return sim::AqmPolicy::Pfifo;
  if (name == "codel") return sim::AqmPolicy::Codel;
  if (name == "fq_codel") return sim::AqmPolicy::FqCodel;
  throw std::invalid_argument("unknown aqm: " + name + " (want pfifo, codel, or fq_codel)");
}

int cmd_simulate(const SimulateOptions& opt) {
  Stopwatch timer;
  sim::BottleneckConfig bcfg = opt.bottleneck;
  bcfg.aqm = parse_aqm(opt.aqm);
  bcfg.token_bucket_burst_bytes = opt.burst.value_or(2 * bcfg.mtu_bytes);

  sim::AppFlowConfig app;
  app.duration_s = opt.duration_s;
  app.seed = cli::resolve_seed(opt.seed_flag);
  app.initial_cwnd_pkts = opt.cwnd;
  app.init_ssthresh_pkts = opt.ssthresh;

  std::optional<CrossTrafficProfile> ctp;
  std::string ctp_input;
  if (!opt.ctp.empty()) {
    if (fs::exists(opt.ctp)) {
      const auto profiles = read_profiles_jsonl(opt.ctp);
      if (profiles.empty()) throw std::invalid_argument("no profiles in " + opt.ctp);
      ctp = profiles.front();
      ctp_input = opt.ctp;
    } else if (!opt.store.empty()) {
      require_input(opt.store);
      store::ProfileStore db(opt.store);
      ctp = db.find_by_id(opt.ctp);
      if (!ctp) throw std::invalid_argument("profile id not in store: " + opt.ctp);
      ctp_input = opt.store;
    } else {
      throw std::runtime_error("missing input file: " + opt.ctp);
    }
  }

  const auto trace = sim::simulate(bcfg, app, ctp ? &*ctp : nullptr, opt.telemetry_ms);
  write_text(opt.out, trace.to_json().dump() + "\n");
  if (!opt.csv.empty()) write_text(opt.csv, trace.to_csv());

  RunManifest manifest;
  manifest.tool_version = NETREPLICA_VERSION;
  manifest.subcommand = "simulate";
  manifest.parameters["rate_bps"] = std::to_string(bcfg.shaping_rate_bps);
  manifest.parameters["latency_ms"] = std::to_string(bcfg.base_latency_ms);
  manifest.parameters["queue_pkts"] = std::to_string(bcfg.queue_capacity_pkts);
  manifest.parameters["aqm"] = opt.aqm;
  manifest.parameters["duration_s"] = std::to_string(app.duration_s);
  manifest.parameters["telemetry_ms"] = std::to_string(opt.telemetry_ms);
  manifest.parameters["seed"] = std::to_string(app.seed);
  if (ctp) manifest.parameters["ctp_id"] = ctp->id;
  if (!ctp_input.empty()) manifest.add_input(ctp_input);
  manifest.add_output(opt.out);
  if (!opt.csv.empty()) manifest.add_output(opt.csv);
  manifest.duration_s = timer.seconds();
  manifest.write(opt.out);

  std::cout << "delivered_app_mbps_mean: "
            << trace.totals.app_bytes_delivered * 8.0 / app.duration_s / 1e6 << "\n";
  return kOk;
}

// --- eval ---------------------------------------------------------------------

int cmd_eval_dtw(const std::vector<std::string>& trace_paths, const std::string& out) {
  if (trace_paths.size() < 2) throw std::invalid_argument("eval dtw needs at least two traces");
  std::vector<std::vector<double>> series;
  std::vector<std::string> labels;
  for (const auto& path : trace_paths) {
    series.push_back(read_float_csv_flat(path));
    labels.push_back(fs::path(path).filename().string());
  }
  const auto summary = eval::pairwise_consistency(series, labels);

  nlohmann::ordered_json j;
  j["labels"] = summary.matrix.labels;
  j["matrix"] = summary.matrix.values;
  j["mean"] = summary.mean;
  j["stddev"] = summary.stddev;
  j["pairs"] = series.size() * (series.size() - 1) / 2;
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text(out, text);
  }
  return kOk;
}

int cmd_eval_jensen(const std::string& a, const std::string& b, int bins,
                    const std::string& out) {
  const auto xs = read_float_csv_flat(a);
  const auto ys = read_float_csv_flat(b);
  nlohmann::ordered_json j;
  j["jensen_distance"] = eval::jensen_distance(xs, ys, bins);
  j["bins"] = bins;
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text(out, text);
  }
  return kOk;
}

int cmd_eval_coverage(const std::string& reference, const std::string& candidates,
                      std::vector<double> thresholds, double ridge, const std::string& out) {
  if (thresholds.empty()) thresholds = {10.0};
  const auto ref = read_float_csv_rows(reference);
  const auto cand = read_float_csv_rows(candidates);
  const auto report = eval::mahalanobis_coverage(ref, cand, ridge, thresholds);

  nlohmann::ordered_json j;
  j["dimensions"] = report.reference_mean.size();
  j["reference_rows"] = ref.size();
  j["candidate_rows"] = cand.size();
  j["median"] = report.median;
  nlohmann::ordered_json fracs;
  for (const auto& [thr, frac] : report.frac_above) {
    fracs[std::to_string(thr)] = frac;
  }
  j["frac_above"] = fracs;
  j["distances"] = report.distances;
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text(out, text);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cross-traffic profile toolchain with a bottleneck-link simulator"};
  app.set_version_flag("--version", NETREPLICA_VERSION);
  app.require_subcommand(1);

  // transform
  TransformOptions topt;
  auto* transform = app.add_subcommand("transform", "raw packet trace -> CTP JSONL");
  transform->add_option("--trace", topt.trace, "input trace path")->required();
  transform->add_option("--format", topt.format, "pcap|csv|auto (default auto)");
  transform->add_option("--internal-prefix", topt.prefixes, "internal CIDR prefix (repeatable)")
      ->required();
  transform->add_option("--bin-ms", topt.bin_ms, "series bin width in ms (default 100)");
  transform->add_option("--window-s", topt.windows_s,
                        "window duration seconds, repeatable (default 60)");
  transform->add_option("--stride-s", topt.stride_s, "window stride seconds (default 10)");
  transform->add_flag("--keep-non-crossing", topt.keep_non_crossing,
                      "keep both-internal packets instead of dropping them");
  transform->add_option("--out", topt.out, "output JSONL path")->required();

  // select
  SelectOptions sopt;
  auto* select = app.add_subcommand("select", "query a profile store");
  select->add_option("--store", sopt.store, "profile JSONL store")->required();
  select->add_option("--filter", sopt.filter, "conjunctive filter expression")->required();
  select->add_option("--limit", sopt.limit, "max results");
  select->add_option("--order-by", sopt.order_by, "attribute[:asc|desc]");
  select->add_option("--out", sopt.out, "output JSONL path")->required();

  // trim
  TrimOptions tropt;
  auto* trim = app.add_subcommand("trim", "scale profiles to fit a peak threshold");
  trim->add_option("--in", tropt.in, "input JSONL")->required();
  trim->add_option("--threshold-bps", tropt.threshold_bps, "peak throughput threshold")
      ->required();
  trim->add_option("--out", tropt.out, "output JSONL path")->required();
  trim->add_option("--reports", tropt.reports, "trim report JSONL (default <out>.reports.jsonl)");

  // sample
  SampleOptions smopt;
  auto* sample = app.add_subcommand("sample", "toggle-stratified profile sampling");
  sample->add_option("--in", smopt.in, "input JSONL")->required();
  sample->add_option("--out", smopt.out, "output JSONL path")->required();
  sample->add_option("--per-bucket", smopt.plan.per_bucket, "profiles per toggle count (50)");
  sample->add_option("--toggle-min", smopt.plan.toggle_min, "lowest toggle bucket (1)");
  sample->add_option("--toggle-max", smopt.plan.toggle_max, "highest toggle bucket (100)");
  sample->add_option("--on-threshold-bps", smopt.plan.on_threshold_bps,
                     "ON threshold in bps (3e6)");
  sample->add_option("--segment-ms", smopt.plan.segment_ms, "segment width in ms (100)");
  sample->add_option("--seed", smopt.seed_flag, "sampling seed (env NETREPLICA_SEED fallback)");

  // simulate
  SimulateOptions simopt;
  auto* simulate = app.add_subcommand("simulate", "run the bottleneck simulator");
  simulate->add_option("--rate-bps", simopt.bottleneck.shaping_rate_bps, "shaping rate (1e7)");
  simulate->add_option("--latency-ms", simopt.bottleneck.base_latency_ms,
                       "base round-trip latency (100)");
  simulate->add_option("--queue-pkts", simopt.bottleneck.queue_capacity_pkts,
                       "queue capacity in packets (1000)");
  simulate->add_option("--aqm", simopt.aqm, "pfifo|codel|fq_codel (pfifo)");
  simulate->add_option("--burst-bytes", simopt.burst, "token bucket burst (2xMTU)");
  simulate->add_option("--mtu", simopt.bottleneck.mtu_bytes, "MTU in bytes (1500)");
  simulate->add_option("--ctp", simopt.ctp, "cross-traffic profile id or JSONL path");
  simulate->add_option("--store", simopt.store, "store for --ctp id lookups");
  simulate->add_option("--duration-s", simopt.duration_s, "run duration (30)");
  simulate->add_option("--telemetry-ms", simopt.telemetry_ms, "telemetry bin: 10|100|1000");
  simulate->add_option("--seed", simopt.seed_flag, "simulation seed");
  simulate->add_option("--cwnd", simopt.cwnd, "initial congestion window (10)");
  simulate->add_option("--ssthresh", simopt.ssthresh, "initial ssthresh (64)");
  simulate->add_option("--out", simopt.out, "output trace JSON")->required();
  simulate->add_option("--csv", simopt.csv, "optional CSV export");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "fidelity and coverage metrics");
  eval_cmd->require_subcommand(1);

  std::vector<std::string> dtw_traces;
  std::string dtw_out;
  auto* eval_dtw = eval_cmd->add_subcommand("dtw", "pairwise DTW consistency");
  eval_dtw->add_option("--traces", dtw_traces, "two or more float CSV series")->required();
  eval_dtw->add_option("--out", dtw_out, "output JSON (default stdout)");

  std::string jensen_a, jensen_b, jensen_out;
  int jensen_bins = 20;
  auto* eval_jensen = eval_cmd->add_subcommand("jensen", "Jensen distance between samples");
  eval_jensen->add_option("--a", jensen_a, "sample A, float CSV")->required();
  eval_jensen->add_option("--b", jensen_b, "sample B, float CSV")->required();
  eval_jensen->add_option("--bins", jensen_bins, "histogram bins (20)");
  eval_jensen->add_option("--out", jensen_out, "output JSON (default stdout)");

  std::string cov_ref, cov_cand, cov_out;
  std::vector<double> cov_thresholds;
  double cov_ridge = 1e-6;
  auto* eval_cov = eval_cmd->add_subcommand("coverage", "Mahalanobis coverage report");
  eval_cov->add_option("--reference", cov_ref, "reference points, float CSV rows")->required();
  eval_cov->add_option("--candidates", cov_cand, "candidate points, float CSV rows")->required();
  eval_cov->add_option("--thresholds", cov_thresholds, "distance thresholds (10)");
  eval_cov->add_option("--ridge", cov_ridge, "covariance ridge (1e-6)");
  eval_cov->add_option("--out", cov_out, "output JSON (default stdout)");

  // run
  cli::RunOptions ropt;
  auto* run = app.add_subcommand("run", "end-to-end pipeline from a config file");
  run->add_option("--config", ropt.config_path, "flat key = value config")->required();
  run->add_option("--out-dir", ropt.out_dir, "output directory (overrides config)");
  run->add_option("--jobs", ropt.jobs, "simulation parallelism (overrides config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidationError;
  }

  try {
    if (transform->parsed()) return cmd_transform(topt);
    if (select->parsed()) return cmd_select(sopt);
    if (trim->parsed()) return cmd_trim(tropt);
    if (sample->parsed()) return cmd_sample(smopt);
    if (simulate->parsed()) return cmd_simulate(simopt);
    if (eval_cmd->parsed()) {
      if (eval_dtw->parsed()) return cmd_eval_dtw(dtw_traces, dtw_out);
      if (eval_jensen->parsed()) return cmd_eval_jensen(jensen_a, jensen_b, jensen_bins, jensen_out);
      if (eval_cov->parsed()) {
        return cmd_eval_coverage(cov_ref, cov_cand, cov_thresholds, cov_ridge, cov_out);
      }
    }
    if (run->parsed()) return cli::cmd_run(ropt);
  } catch (...) {
    return classify_exception();
  }
  return kValidationError;
}
