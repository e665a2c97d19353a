#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "netreplica/profile_io.hpp"

using testutil::TempDir;

namespace {

// Tests that drive the installed binary need its path from ctest.
const char* binary() { return std::getenv("NETREPLICA_BIN"); }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(binary()) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string ten_second_trace() {
  std::vector<testutil::CsvPacket> packets;
  for (int i = 0; i < 100; ++i) {
    const double t = i * 0.1;
    packets.push_back({t, "10.0.0.5", "1.2.3.4", 1000, 80, "TCP", 1200});
    packets.push_back({t + 0.05, "1.2.3.4", "10.0.1.7", 80, 2000, "TCP", 900});
  }
  return testutil::build_packet_csv(packets);
}

// Active on even seconds, silent on odd ones; 5 s windows then carry several
// ON/OFF transitions for the sampling stages.
std::string bursty_trace() {
  std::vector<testutil::CsvPacket> packets;
  for (int sec = 0; sec < 10; ++sec) {
    if (sec % 2 == 1 && sec != 9) continue;
    for (int k = 0; k < 10; ++k) {
      const double t = sec + k * 0.1;
      packets.push_back({t, "10.0.0.5", "1.2.3.4", 1000, 80, "TCP", 1200});
      packets.push_back({t + 0.04, "1.2.3.4", "10.0.1.7", 80, 2000, "TCP", 900});
    }
  }
  return testutil::build_packet_csv(packets);
}

}  // namespace

TEST_CASE("cli transform produces expected window counts and a manifest") {
  REQUIRE(binary() != nullptr);
  TempDir dir;
  const std::string trace = dir.file("trace.csv");
  testutil::write_file(trace, ten_second_trace());
  const std::string out = dir.file("profiles.jsonl");

  const int rc = run_cli("transform --trace " + trace +
                         " --internal-prefix 10.0.0.0/8 --bin-ms 100 --window-s 5 "
                         "--stride-s 5 --out " +
                         out);
  REQUIRE(rc == 0);

  const auto profiles = netreplica::read_profiles_jsonl(out);
  // 10 s series, 5 s windows, 5 s stride -> floor((10-5)/5)+1 = 2 windows per
  // node and direction. Hosts 10.0.0.5 and 10.0.1.7 share /16, /8, root:
  // nodes = 2x/32 + 2x/24 + /16 + /8 + root = 7; 7 * 2 dirs * 2 windows.
  CHECK(profiles.size() == 7 * 2 * 2);

  std::ifstream manifest(out + ".manifest.json");
  REQUIRE(manifest.good());
  nlohmann::json m;
  manifest >> m;
  CHECK(m.at("subcommand") == "transform");
  CHECK(m.at("outputs").size() == 1);

  SUBCASE("rerun is byte-identical") {
    const std::string first = testutil::read_file(out);
    REQUIRE(run_cli("transform --trace " + trace +
                    " --internal-prefix 10.0.0.0/8 --bin-ms 100 --window-s 5 "
                    "--stride-s 5 --out " +
                    out) == 0);
    CHECK(testutil::read_file(out) == first);
  }
}

TEST_CASE("cli exit codes distinguish validation from I/O") {
  REQUIRE(binary() != nullptr);
  TempDir dir;
  // missing input file -> 2
  CHECK(run_cli("transform --trace " + dir.file("nope.csv") +
                " --internal-prefix 10.0.0.0/8 --out " + dir.file("x.jsonl")) == 2);
  // bad flag value -> 1
  const std::string trace = dir.file("trace.csv");
  testutil::write_file(trace, ten_second_trace());
  CHECK(run_cli("transform --trace " + trace + " --internal-prefix banana --out " +
                dir.file("x.jsonl")) == 1);
  // unknown aqm -> 1
  CHECK(run_cli("simulate --aqm wrong --out " + dir.file("t.json")) == 1);
}

TEST_CASE("cli select/trim/sample/simulate chain works end to end") {
  REQUIRE(binary() != nullptr);
  TempDir dir;
  const std::string trace = dir.file("trace.csv");
  testutil::write_file(trace, bursty_trace());
  const std::string profiles = dir.file("profiles.jsonl");
  REQUIRE(run_cli("transform --trace " + trace +
                  " --internal-prefix 10.0.0.0/8 --window-s 5 --stride-s 1 --out " +
                  profiles) == 0);

  const std::string selected = dir.file("selected.jsonl");
  REQUIRE(run_cli("select --store " + profiles +
                  " --filter \"mean_throughput_bps>0 && direction=DOWN\" --order-by "
                  "mean_throughput_bps:desc --limit 5 --out " +
                  selected) == 0);
  const auto rows = netreplica::read_profiles_jsonl(selected);
  CHECK(!rows.empty());
  CHECK(rows.size() <= 5);
  for (const auto& p : rows) CHECK(p.direction == netreplica::Direction::Down);

  const std::string trimmed = dir.file("trimmed.jsonl");
  REQUIRE(run_cli("trim --in " + selected + " --threshold-bps 50000 --out " + trimmed) == 0);
  for (const auto& p : netreplica::read_profiles_jsonl(trimmed)) {
    CHECK(p.metrics.max_throughput_bps <= 50000.0);
  }

  const std::string sampled = dir.file("sampled.jsonl");
  REQUIRE(run_cli("sample --in " + trimmed +
                  " --per-bucket 3 --toggle-min 1 --toggle-max 100 --on-threshold-bps 1 "
                  "--segment-ms 100 --seed 7 --out " +
                  sampled) == 0);

  const std::string trace_out = dir.file("sim.json");
  REQUIRE(run_cli("simulate --rate-bps 1e7 --latency-ms 20 --queue-pkts 100 --aqm codel "
                  "--ctp " +
                  trimmed + " --duration-s 2 --telemetry-ms 100 --seed 1 --out " + trace_out +
                  " --csv " + dir.file("sim.csv")) == 0);
  std::ifstream in(trace_out);
  nlohmann::json j;
  in >> j;
  CHECK(j.at("telemetry_bin_ms") == 100);
  CHECK(j.at("throughput_bps").size() == 20);
}

TEST_CASE("cli eval subcommands emit JSON summaries") {
  REQUIRE(binary() != nullptr);
  TempDir dir;
  testutil::write_file(dir.file("a.csv"), "0\n0\n");
  testutil::write_file(dir.file("b.csv"), "1\n1\n");
  const std::string dtw_out = dir.file("dtw.json");
  REQUIRE(run_cli("eval dtw --traces " + dir.file("a.csv") + " " + dir.file("b.csv") +
                  " --out " + dtw_out) == 0);
  {
    std::ifstream in(dtw_out);
    nlohmann::json j;
    in >> j;
    CHECK(j.at("mean") == 2.0);
    CHECK(j.at("pairs") == 1);
  }

  const std::string jensen_out = dir.file("jensen.json");
  REQUIRE(run_cli("eval jensen --a " + dir.file("a.csv") + " --b " + dir.file("a.csv") +
                  " --bins 20 --out " + jensen_out) == 0);
  {
    std::ifstream in(jensen_out);
    nlohmann::json j;
    in >> j;
    CHECK(j.at("jensen_distance") == 0.0);
  }

  // 2-D whitened reference; candidate at distance 2
  testutil::write_file(dir.file("ref.csv"),
                       "1.4142135623730951,0\n-1.4142135623730951,0\n"
                       "0,1.4142135623730951\n0,-1.4142135623730951\n");
  testutil::write_file(dir.file("cand.csv"), "2,0\n0,0\n");
  const std::string cov_out = dir.file("cov.json");
  REQUIRE(run_cli("eval coverage --reference " + dir.file("ref.csv") + " --candidates " +
                  dir.file("cand.csv") + " --thresholds 1 --ridge 0 --out " + cov_out) == 0);
  {
    std::ifstream in(cov_out);
    nlohmann::json j;
    in >> j;
    CHECK(j.at("median") == doctest::Approx(1.0));
    CHECK(j.at("distances")[0] == doctest::Approx(2.0));
    CHECK(j.at("frac_above").at("1.000000") == doctest::Approx(0.5));
  }

  // missing input -> 2
  CHECK(run_cli("eval jensen --a " + dir.file("missing.csv") + " --b " + dir.file("a.csv")) ==
        2);
}

TEST_CASE("NETREPLICA_SEED is the seed fallback") {
  REQUIRE(binary() != nullptr);
  TempDir dir;
  const std::string trace = dir.file("trace.csv");
  testutil::write_file(trace, bursty_trace());
  const std::string profiles = dir.file("p.jsonl");
  REQUIRE(run_cli("transform --trace " + trace +
                  " --internal-prefix 10.0.0.0/8 --window-s 5 --stride-s 1 --out " +
                  profiles) == 0);

  const auto sample_with = [&](const std::string& envprefix, const std::string& flags,
                               const std::string& out) {
    const std::string cmd = envprefix + std::string(binary()) + " sample --in " + profiles +
                            " --per-bucket 2 --toggle-min 1 --toggle-max 100 "
                            "--on-threshold-bps 1 --segment-ms 100 " +
                            flags + " --out " + out + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
  };
  REQUIRE(sample_with("NETREPLICA_SEED=99 ", "", dir.file("env.jsonl")) == 0);
  REQUIRE(sample_with("", "--seed 99", dir.file("flag.jsonl")) == 0);
  REQUIRE(sample_with("NETREPLICA_SEED=7 ", "--seed 99", dir.file("override.jsonl")) == 0);
  CHECK(testutil::read_file(dir.file("env.jsonl")) == testutil::read_file(dir.file("flag.jsonl")));
  CHECK(testutil::read_file(dir.file("override.jsonl")) ==
        testutil::read_file(dir.file("flag.jsonl")));
}

TEST_CASE("cli run executes the pipeline from a config file") {
  REQUIRE(binary() != nullptr);
  TempDir dir;
  const std::string trace = dir.file("trace.csv");
  testutil::write_file(trace, bursty_trace());

  const std::string config = dir.file("run.conf");
  testutil::write_file(config, "trace = " + trace + "\n" +
                                   "internal_prefix = 10.0.0.0/8\n"
                                   "window_s = 5\n"
                                   "stride_s = 1\n"
                                   "rates_mbps = 4,6\n"
                                   "latencies_ms = 10,50\n"
                                   "aqms = pfifo\n"
                                   "duration_s = 1\n"
                                   "per_bucket = 2\n"
                                   "toggle_min = 1\n"
                                   "toggle_max = 100\n"
                                   "on_threshold_bps = 1\n"
                                   "seed = 5\n");
  const std::string out_dir = dir.file("run_out");
  REQUIRE(run_cli("run --config " + config + " --out-dir " + out_dir + " --jobs 2") == 0);

  namespace fs = std::filesystem;
  CHECK(fs::exists(out_dir + "/profiles.jsonl"));
  CHECK(fs::exists(out_dir + "/selected.jsonl"));
  CHECK(fs::exists(out_dir + "/trimmed.jsonl"));
  CHECK(fs::exists(out_dir + "/sampled.jsonl"));
  CHECK(fs::exists(out_dir + "/eval/report.json"));
  CHECK(fs::exists(out_dir + "/eval/features.csv"));

  const auto sampled = netreplica::read_profiles_jsonl(out_dir + "/sampled.jsonl");
  size_t traces = 0;
  for (const auto& entry : fs::directory_iterator(out_dir + "/traces")) {
    const auto name = entry.path().filename().string();
    if (name.starts_with("trace_") && name.ends_with(".json") &&
        !name.ends_with(".manifest.json")) {
      ++traces;
    }
  }
  // grid: 2 rates x 2 latencies x 1 aqm x |sampled|
  CHECK(traces == 2 * 2 * 1 * sampled.size());
  // every trace has a manifest
  for (const auto& entry : fs::directory_iterator(out_dir + "/traces")) {
    const auto name = entry.path().filename().string();
    if (name.starts_with("trace_") && name.ends_with(".json") &&
        !name.ends_with(".manifest.json")) {
      CHECK(fs::exists(entry.path().string() + ".manifest.json"));
    }
  }

  SUBCASE("unknown aqm in the config fails with exit 1") {
    testutil::write_file(config, "trace = " + trace + "\n" +
                                     "internal_prefix = 10.0.0.0/8\n"
                                     "latencies_ms = 10\n"
                                     "aqms = red\n");
    CHECK(run_cli("run --config " + config + " --out-dir " + dir.file("bad_out")) == 1);
  }

  SUBCASE("empty sample set skips the simulate stage with exit 0") {
    // constant-rate trace -> zero toggles everywhere -> nothing to sample
    const std::string flat = dir.file("flat.csv");
    testutil::write_file(flat, ten_second_trace());
    testutil::write_file(config, "trace = " + flat + "\n" +
                                     "internal_prefix = 10.0.0.0/8\n"
                                     "window_s = 5\n"
                                     "stride_s = 1\n"
                                     "latencies_ms = 10\n"
                                     "on_threshold_bps = 1\n");
    const std::string empty_out = dir.file("empty_out");
    CHECK(run_cli("run --config " + config + " --out-dir " + empty_out) == 0);
    CHECK(netreplica::read_profiles_jsonl(empty_out + "/sampled.jsonl").empty());
    CHECK(!fs::exists(empty_out + "/eval/report.json"));
  }
}
