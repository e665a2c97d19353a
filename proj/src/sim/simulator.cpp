#include "netreplica/sim/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "netreplica/hash.hpp"

namespace netreplica::sim {

namespace {

constexpr uint32_t kAckBytes = 64;
constexpr uint32_t kMinTrailerBytes = 64;  // smallest standalone replay packet

const char* aqm_name(AqmPolicy p) {
  switch (p) {
    case AqmPolicy::Pfifo:
      return "pfifo";
    case AqmPolicy::Codel:
      return "codel";
    case AqmPolicy::FqCodel:
      return "fq_codel";
  }
  return "?";
}

AqmPolicy aqm_from_name(const std::string& name) {
  if (name == "pfifo") return AqmPolicy::Pfifo;
  if (name == "codel") return AqmPolicy::Codel;
  if (name == "fq_codel") return AqmPolicy::FqCodel;
  throw std::invalid_argument("unknown aqm policy: " + name);
}

}  // namespace

void BottleneckConfig::validate() const {
  if (shaping_rate_bps <= 0) throw std::invalid_argument("shaping_rate_bps must be > 0");
  if (base_latency_ms < 0) throw std::invalid_argument("base_latency_ms must be >= 0");
  if (queue_capacity_pkts < 1) throw std::invalid_argument("queue_capacity_pkts must be >= 1");
  if (mtu_bytes < kMinTrailerBytes) throw std::invalid_argument("mtu_bytes too small");
  if (token_bucket_burst_bytes < mtu_bytes) {
    throw std::invalid_argument("token bucket burst must cover at least one MTU");
  }
}

void AppFlowConfig::validate() const {
  if (duration_s <= 0) throw std::invalid_argument("duration_s must be > 0");
  if (initial_cwnd_pkts < 1) throw std::invalid_argument("initial_cwnd_pkts must be >= 1");
  if (init_ssthresh_pkts < 2) throw std::invalid_argument("init_ssthresh_pkts must be >= 2");
}

std::vector<Emission> replay_schedule(const CrossTrafficProfile& ctp, uint32_t mtu_bytes) {
  if (mtu_bytes < kMinTrailerBytes) throw std::invalid_argument("mtu too small");
  std::vector<Emission> out;
  const Ns bin_ns = static_cast<Ns>(ctp.series.bin_width_ms) * kMsNs;
  for (size_t bin = 0; bin < ctp.series.bins.size(); ++bin) {
    const uint64_t bytes = ctp.series.bins[bin];
    if (bytes == 0) continue;
    uint64_t full = bytes / mtu_bytes;
    const uint64_t rem = bytes % mtu_bytes;

    std::vector<uint32_t> sizes(full, mtu_bytes);
    if (rem > 0) {
      if (rem >= kMinTrailerBytes || full == 0) {
        sizes.push_back(static_cast<uint32_t>(rem));
      } else {
        sizes.back() += static_cast<uint32_t>(rem);  // merge short trailer
      }
    }
    const Ns base = static_cast<Ns>(bin) * bin_ns;
    const auto count = static_cast<Ns>(sizes.size());
    for (size_t k = 0; k < sizes.size(); ++k) {
      out.push_back({base + static_cast<Ns>(k) * bin_ns / count, sizes[k]});
    }
  }
  return out;
}

namespace {

enum class EvKind : uint8_t { CrossArrival, ServiceReady, Delivery, AckArrival, Rto };

struct Event {
  Ns time = 0;
  uint64_t order = 0;
  EvKind kind = EvKind::ServiceReady;
  QueuedPacket pkt;
  uint64_t cum_seq = 0;  // AckArrival
  Ns rtt_probe_send = -1;
  uint64_t epoch = 0;  // Rto
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.order > b.order;
  }
};

class Engine {
 public:
  Engine(const BottleneckConfig& bcfg, const AppFlowConfig& app, const CrossTrafficProfile* ctp,
         uint32_t telemetry_bin_ms)
      : bcfg_(bcfg), app_(app), telemetry_bin_ms_(telemetry_bin_ms) {
    bcfg_.validate();
    app_.validate();
    if (telemetry_bin_ms != 10 && telemetry_bin_ms != 100 && telemetry_bin_ms != 1000) {
      throw std::invalid_argument("telemetry_bin_ms must be 10, 100, or 1000");
    }

    end_ns_ = static_cast<Ns>(std::llround(app_.duration_s * 1e9));
    half_latency_ns_ = static_cast<Ns>(std::llround(bcfg_.base_latency_ms * 0.5 * kMsNs));

    AqmParams params;
    params.queue_capacity_pkts = bcfg_.queue_capacity_pkts;
    params.mtu_bytes = bcfg_.mtu_bytes;
    params.fq_quantum = bcfg_.mtu_bytes + 14;
    aqm_ = make_aqm(bcfg_.aqm, params);

    tokens_ = bcfg_.token_bucket_burst_bytes;

    if (ctp && !ctp->series.bins.empty()) {
      schedule_ = replay_schedule(*ctp, bcfg_.mtu_bytes);
      period_ns_ = static_cast<Ns>(ctp->series.bins.size()) *
                   static_cast<Ns>(ctp->series.bin_width_ms) * kMsNs;
      cross_flow_key_ = fnv1a64(ctp->id);
      ctp_id_ = ctp->id;
    }

    const auto bin_count = static_cast<size_t>(
        (end_ns_ + telemetry_bin_ns() - 1) / telemetry_bin_ns());
    trace_.telemetry_bin_ms = telemetry_bin_ms;
    trace_.throughput_bps.assign(bin_count, 0.0);
    trace_.rtt_ms.assign(bin_count, std::numeric_limits<double>::quiet_NaN());
    trace_.mean_qlen_pkts.assign(bin_count, 0.0);
    trace_.drops.assign(bin_count, 0);
    rtt_sum_.assign(bin_count, 0.0);
    rtt_count_.assign(bin_count, 0);
    qlen_integral_.assign(bin_count, 0.0);
    delivered_bytes_.assign(bin_count, 0);

    cwnd_ = app_.initial_cwnd_pkts;
    ssthresh_ = app_.init_ssthresh_pkts;
  }

  SimTrace run() {
    if (!schedule_.empty()) schedule_cross(0);
    send_data(0);

    while (!events_.empty()) {
      const Event ev = events_.top();
      events_.pop();
      if (ev.time >= end_ns_) continue;  // run the horizon dry
      switch (ev.kind) {
        case EvKind::CrossArrival:
          on_cross_arrival(ev);
          break;
        case EvKind::ServiceReady:
          on_service_ready(ev.time);
          break;
        case EvKind::Delivery:
          on_delivery(ev);
          break;
        case EvKind::AckArrival:
          on_ack(ev);
          break;
        case EvKind::Rto:
          on_rto(ev);
          break;
      }
    }

    advance_qlen(end_ns_);
    finalize_trace();
    return std::move(trace_);
  }

 private:
  Ns telemetry_bin_ns() const { return static_cast<Ns>(telemetry_bin_ms_) * kMsNs; }

  size_t bin_of(Ns t) const {
    const auto idx = static_cast<size_t>(t / telemetry_bin_ns());
    return std::min(idx, trace_.drops.size() - 1);
  }

  void push(Event ev) {
    ev.order = next_order_++;
    events_.push(std::move(ev));
  }

  // --- token bucket -------------------------------------------------------

  void refill(Ns now) {
    if (now <= last_refill_) return;
    tokens_ += static_cast<double>(now - last_refill_) * bcfg_.shaping_rate_bps / 8e9;
    tokens_ = std::min(tokens_, static_cast<double>(bcfg_.token_bucket_burst_bytes));
    last_refill_ = now;
  }

  void kick_service(Ns now) {
    if (service_scheduled_) return;
    refill(now);
    if (!stage_) {
      if (aqm_->packets() == 0) return;
      advance_qlen(now);
      std::vector<QueuedPacket> dropped;
      auto p = aqm_->dequeue(now, &dropped);
      for (const auto& d : dropped) account_drop(d, now);
      if (!p) return;
      stage_ = *p;
    }
    Ns ready = now;
    const double size = stage_->size_bytes;
    if (tokens_ < size) {
      ready = now + static_cast<Ns>(std::ceil((size - tokens_) * 8e9 / bcfg_.shaping_rate_bps));
    }
    service_scheduled_ = true;
    Event ev;
    ev.time = ready;
    ev.kind = EvKind::ServiceReady;
    push(std::move(ev));
  }

  void on_service_ready(Ns now) {
    service_scheduled_ = false;
    if (!stage_) {
      kick_service(now);
      return;
    }
    refill(now);
    const double size = stage_->size_bytes;
    if (tokens_ < size - 1e-6) {  // fp residue; wait out the remainder
      kick_service(now);
      return;
    }
    tokens_ -= size;
    Event ev;
    ev.time = now + half_latency_ns_;
    ev.kind = EvKind::Delivery;
    ev.pkt = *stage_;
    push(std::move(ev));
    stage_.reset();
    kick_service(now);
  }

  // --- bookkeeping --------------------------------------------------------

  void advance_qlen(Ns now) {
    if (now <= qlen_last_ || trace_.drops.empty()) {
      qlen_last_ = std::max(qlen_last_, now);
      return;
    }
    const Ns bin_ns = telemetry_bin_ns();
    Ns t = qlen_last_;
    const auto qlen = static_cast<double>(aqm_->packets());
    while (t < now) {
      const size_t bin = bin_of(t);
      const Ns bin_end = std::min<Ns>((static_cast<Ns>(bin) + 1) * bin_ns, end_ns_);
      const Ns chunk_end = std::min(now, std::max(bin_end, t + 1));
      qlen_integral_[bin] += qlen * static_cast<double>(chunk_end - t);
      t = chunk_end;
    }
    qlen_last_ = now;
  }

  void account_drop(const QueuedPacket& p, Ns now) {
    ++trace_.drops[bin_of(now)];
    if (p.kind == PacketKind::App) {
      trace_.totals.app_bytes_dropped += p.size_bytes;
      app_in_flight_ -= p.size_bytes;
    } else {
      trace_.totals.cross_bytes_dropped += p.size_bytes;
      cross_in_flight_ -= p.size_bytes;
    }
  }

  void enqueue_bottleneck(QueuedPacket p, Ns now) {
    p.enqueue_ns = now;
    if (p.kind == PacketKind::App) {
      trace_.totals.app_bytes_sent += p.size_bytes;
    } else {
      trace_.totals.cross_bytes_sent += p.size_bytes;
    }
    advance_qlen(now);
    const uint32_t size = p.size_bytes;
    const PacketKind kind = p.kind;
    std::vector<QueuedPacket> evicted;
    const bool accepted = aqm_->enqueue(std::move(p), now, &evicted);
    for (const auto& victim : evicted) account_drop(victim, now);
    if (accepted) {
      if (kind == PacketKind::App) {
        app_in_flight_ += size;
      } else {
        cross_in_flight_ += size;
      }
      kick_service(now);
    } else {
      // dropped on arrival: never entered the network
      ++trace_.drops[bin_of(now)];
      if (kind == PacketKind::App) {
        trace_.totals.app_bytes_dropped += size;
      } else {
        trace_.totals.cross_bytes_dropped += size;
      }
    }
  }

  // --- cross traffic ------------------------------------------------------

  void schedule_cross(size_t index) {
    const size_t i = index % schedule_.size();
    const Ns cycle = static_cast<Ns>(index / schedule_.size());
    const Ns when = cycle * period_ns_ + schedule_[i].offset_ns;
    if (when >= end_ns_) return;
    Event ev;
    ev.time = when;
    ev.kind = EvKind::CrossArrival;
    ev.pkt.kind = PacketKind::Cross;
    ev.pkt.size_bytes = schedule_[i].size_bytes;
    ev.pkt.flow_key = cross_flow_key_;
    ev.epoch = index;
    push(std::move(ev));
  }

  void on_cross_arrival(const Event& ev) {
    enqueue_bottleneck(ev.pkt, ev.time);
    schedule_cross(static_cast<size_t>(ev.epoch) + 1);
  }

  // --- delivery and acks --------------------------------------------------

  void on_delivery(const Event& ev) {
    const QueuedPacket& p = ev.pkt;
    if (p.kind == PacketKind::Cross) {
      trace_.totals.cross_bytes_delivered += p.size_bytes;
      cross_in_flight_ -= p.size_bytes;
      return;
    }
    trace_.totals.app_bytes_delivered += p.size_bytes;
    app_in_flight_ -= p.size_bytes;
    delivered_bytes_[bin_of(ev.time)] += p.size_bytes;

    // Receiver: cumulative ack with out-of-order buffering.
    if (p.seq == rcv_cum_ + 1) {
      ++rcv_cum_;
      while (!rcv_ooo_.empty() && *rcv_ooo_.begin() == rcv_cum_ + 1) {
        ++rcv_cum_;
        rcv_ooo_.erase(rcv_ooo_.begin());
      }
    } else if (p.seq > rcv_cum_) {
      rcv_ooo_.insert(p.seq);
    }

    Event ack;
    ack.time = ev.time + half_latency_ns_;
    ack.kind = EvKind::AckArrival;
    ack.cum_seq = rcv_cum_;
    // Echo the send time for RTT sampling (Karn: retransmits carry none).
    if (!p.retransmit && p.seq == rcv_cum_) ack.rtt_probe_send = send_time_lookup(p.seq);
    push(std::move(ack));
  }

  Ns send_time_lookup(uint64_t seq) const {
    const auto it = send_times_.find(seq);
    return it == send_times_.end() ? -1 : it->second;
  }

  void on_ack(const Event& ev) {
    const uint64_t cum = ev.cum_seq;
    const Ns now = ev.time;
    if (cum > snd_cum_) {
      if (ev.rtt_probe_send >= 0) {
        const double sample_ms = static_cast<double>(now - ev.rtt_probe_send) / kMsNs;
        record_rtt(sample_ms, now);
        if (srtt_ms_ < 0) {
          srtt_ms_ = sample_ms;
          rttvar_ms_ = sample_ms / 2;
        } else {
          rttvar_ms_ = 0.75 * rttvar_ms_ + 0.25 * std::fabs(srtt_ms_ - sample_ms);
          srtt_ms_ = 0.875 * srtt_ms_ + 0.125 * sample_ms;
        }
      }
      const uint64_t newly = cum - snd_cum_;
      send_times_.erase(send_times_.begin(), send_times_.upper_bound(cum));
      for (uint64_t k = 0; k < newly; ++k) {
        if (cwnd_ < ssthresh_) {
          cwnd_ += 1.0;  // slow start: doubles per round trip
        } else {
          cwnd_ += 1.0 / cwnd_;  // additive increase: one packet per round trip
        }
      }
      snd_cum_ = cum;
      dupacks_ = 0;
      rto_backoff_ = 0;
      arm_rto(now);
      if (cum < recovery_end_) retransmit(cum + 1, now);  // next hole
    } else {
      ++dupacks_;
      if (dupacks_ == 3 && snd_cum_ >= recovery_end_) {
        loss_response(now);
        retransmit(snd_cum_ + 1, now);
      }
    }
    send_data(now);
  }

  void record_rtt(double sample_ms, Ns now) {
    const size_t bin = bin_of(now);
    rtt_sum_[bin] += sample_ms;
    ++rtt_count_[bin];
    ++trace_.totals.rtt_samples;
    if (trace_.totals.rtt_samples == 1 || sample_ms < trace_.totals.min_rtt_ms) {
      trace_.totals.min_rtt_ms = sample_ms;
    }
  }

  // Halve the window and remember the epoch; at most one response per
  // window of data.
  void loss_response(Ns now) {
    cwnd_ = std::max(cwnd_ / 2.0, 1.0);
    ssthresh_ = std::max(cwnd_, 2.0);
    recovery_end_ = next_seq_ == 1 ? 0 : next_seq_ - 1;
    arm_rto(now);
  }

  void retransmit(uint64_t seq, Ns now) {
    send_times_.erase(seq);
    QueuedPacket p;
    p.kind = PacketKind::App;
    p.seq = seq;
    p.size_bytes = bcfg_.mtu_bytes;
    p.flow_key = app_flow_key_;
    p.retransmit = true;
    enqueue_bottleneck(std::move(p), now);
  }

  uint64_t flight_pkts() const { return next_seq_ - 1 - snd_cum_; }

  void send_data(Ns now) {
    bool sent = false;
    while (flight_pkts() < static_cast<uint64_t>(cwnd_)) {
      QueuedPacket p;
      p.kind = PacketKind::App;
      p.seq = next_seq_;
      p.size_bytes = bcfg_.mtu_bytes;
      p.flow_key = app_flow_key_;
      send_times_[next_seq_] = now;
      ++next_seq_;
      enqueue_bottleneck(std::move(p), now);
      sent = true;
    }
    if (sent && !rto_armed_) arm_rto(now);
  }

  Ns rto_ns() const {
    // Conservative 3 s before the first sample so long-latency paths do not
    // time out while the very first round trip is still in flight.
    double base_ms = srtt_ms_ < 0 ? 3000.0 : std::max(200.0, srtt_ms_ + 4.0 * rttvar_ms_);
    return static_cast<Ns>(base_ms * kMsNs) << std::min<uint32_t>(rto_backoff_, 6);
  }

  void arm_rto(Ns now) {
    rto_armed_ = true;
    ++rto_epoch_;
    Event ev;
    ev.time = now + rto_ns();
    ev.kind = EvKind::Rto;
    ev.epoch = rto_epoch_;
    push(std::move(ev));
  }

  void on_rto(const Event& ev) {
    if (ev.epoch != rto_epoch_) return;  // superseded
    rto_armed_ = false;
    if (flight_pkts() == 0) return;
    ++rto_backoff_;
    if (snd_cum_ >= recovery_end_) loss_response(ev.time);
    retransmit(snd_cum_ + 1, ev.time);
    arm_rto(ev.time);
  }

  void finalize_trace() {
    const double bin_s = static_cast<double>(telemetry_bin_ms_) / 1000.0;
    const Ns bin_ns = telemetry_bin_ns();
    for (size_t i = 0; i < trace_.throughput_bps.size(); ++i) {
      trace_.throughput_bps[i] = static_cast<double>(delivered_bytes_[i]) * 8.0 / bin_s;
      if (rtt_count_[i] > 0) trace_.rtt_ms[i] = rtt_sum_[i] / static_cast<double>(rtt_count_[i]);
      const Ns span = std::min<Ns>(bin_ns, end_ns_ - static_cast<Ns>(i) * bin_ns);
      trace_.mean_qlen_pkts[i] = qlen_integral_[i] / static_cast<double>(span);
    }
    trace_.totals.app_bytes_in_flight = app_in_flight_;
    trace_.totals.cross_bytes_in_flight = cross_in_flight_;
    trace_.config = bcfg_;
    trace_.app = app_;
    trace_.ctp_id = ctp_id_;
  }

  // configuration
  BottleneckConfig bcfg_;
  AppFlowConfig app_;
  uint32_t telemetry_bin_ms_;
  Ns end_ns_ = 0;
  Ns half_latency_ns_ = 0;
  uint64_t app_flow_key_ = fnv1a64("app-bulk-flow");

  // event loop
  std::priority_queue<Event, std::vector<Event>, EventAfter> events_;
  uint64_t next_order_ = 0;

  // bottleneck
  std::unique_ptr<Aqm> aqm_;
  double tokens_ = 0.0;
  Ns last_refill_ = 0;
  std::optional<QueuedPacket> stage_;
  bool service_scheduled_ = false;

  // cross traffic
  std::vector<Emission> schedule_;
  Ns period_ns_ = 0;
  uint64_t cross_flow_key_ = 0;
  std::string ctp_id_;

  // sender
  double cwnd_ = 10.0;
  double ssthresh_ = 64.0;
  uint64_t next_seq_ = 1;
  uint64_t snd_cum_ = 0;
  uint64_t recovery_end_ = 0;
  uint32_t dupacks_ = 0;
  double srtt_ms_ = -1.0;
  double rttvar_ms_ = 0.0;
  uint32_t rto_backoff_ = 0;
  uint64_t rto_epoch_ = 0;
  bool rto_armed_ = false;
  std::map<uint64_t, Ns> send_times_;

  // receiver
  uint64_t rcv_cum_ = 0;
  std::set<uint64_t> rcv_ooo_;

  // accounting
  uint64_t app_in_flight_ = 0;
  uint64_t cross_in_flight_ = 0;
  std::vector<double> rtt_sum_;
  std::vector<uint64_t> rtt_count_;
  std::vector<double> qlen_integral_;
  std::vector<uint64_t> delivered_bytes_;
  Ns qlen_last_ = 0;

  SimTrace trace_;
};

}  // namespace

SimTrace simulate(const BottleneckConfig& bcfg, const AppFlowConfig& app,
                  const CrossTrafficProfile* ctp, uint32_t telemetry_bin_ms) {
  Engine engine(bcfg, app, ctp, telemetry_bin_ms);
  return engine.run();
}

std::vector<BatchResult> run_batch(const std::vector<BatchItem>& items, unsigned parallelism) {
  if (parallelism < 1) throw std::invalid_argument("parallelism must be >= 1");
  std::vector<BatchResult> results(items.size());
  std::atomic<size_t> cursor{0};

  const auto worker = [&]() {
    while (true) {
      const size_t i = cursor.fetch_add(1);
      if (i >= items.size()) return;
      try {
        const auto& item = items[i];
        results[i].trace = simulate(item.bottleneck, item.app,
                                    item.ctp ? &*item.ctp : nullptr, item.telemetry_bin_ms);
      } catch (const std::exception& e) {
        results[i].error = e.what();
      }
    }
  };

  const auto n = static_cast<unsigned>(
      std::min<size_t>(parallelism, std::max<size_t>(items.size(), 1)));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(n);
    for (unsigned t = 0; t < n; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  return results;
}

nlohmann::ordered_json SimTrace::to_json() const {
  nlohmann::ordered_json j;
  j["telemetry_bin_ms"] = telemetry_bin_ms;
  j["throughput_bps"] = throughput_bps;
  auto rtt = nlohmann::ordered_json::array();
  for (const double v : rtt_ms) {
    if (std::isnan(v)) {
      rtt.push_back(nullptr);
    } else {
      rtt.push_back(v);
    }
  }
  j["rtt_ms"] = std::move(rtt);
  j["queue_stats"] = {{"mean_qlen_pkts", mean_qlen_pkts}, {"drops", drops}};
  j["totals"] = {{"app_bytes_sent", totals.app_bytes_sent},
                 {"app_bytes_delivered", totals.app_bytes_delivered},
                 {"app_bytes_dropped", totals.app_bytes_dropped},
                 {"app_bytes_in_flight", totals.app_bytes_in_flight},
                 {"cross_bytes_sent", totals.cross_bytes_sent},
                 {"cross_bytes_delivered", totals.cross_bytes_delivered},
                 {"cross_bytes_dropped", totals.cross_bytes_dropped},
                 {"cross_bytes_in_flight", totals.cross_bytes_in_flight},
                 {"rtt_samples", totals.rtt_samples},
                 {"min_rtt_ms", totals.min_rtt_ms}};
  j["config_echo"] = {{"shaping_rate_bps", config.shaping_rate_bps},
                      {"base_latency_ms", config.base_latency_ms},
                      {"queue_capacity_pkts", config.queue_capacity_pkts},
                      {"aqm", aqm_name(config.aqm)},
                      {"token_bucket_burst_bytes", config.token_bucket_burst_bytes},
                      {"mtu_bytes", config.mtu_bytes},
                      {"app", {{"initial_cwnd_pkts", app.initial_cwnd_pkts},
                               {"init_ssthresh_pkts", app.init_ssthresh_pkts},
                               {"duration_s", app.duration_s},
                               {"seed", app.seed}}},
                      {"ctp_id", ctp_id}};
  return j;
}

SimTrace SimTrace::from_json(const nlohmann::json& j) {
  SimTrace t;
  t.telemetry_bin_ms = j.at("telemetry_bin_ms").get<uint32_t>();
  t.throughput_bps = j.at("throughput_bps").get<std::vector<double>>();
  for (const auto& v : j.at("rtt_ms")) {
    t.rtt_ms.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                   : v.get<double>());
  }
  t.mean_qlen_pkts = j.at("queue_stats").at("mean_qlen_pkts").get<std::vector<double>>();
  t.drops = j.at("queue_stats").at("drops").get<std::vector<uint64_t>>();
  const auto& totals = j.at("totals");
  t.totals.app_bytes_sent = totals.at("app_bytes_sent").get<uint64_t>();
  t.totals.app_bytes_delivered = totals.at("app_bytes_delivered").get<uint64_t>();
  t.totals.app_bytes_dropped = totals.at("app_bytes_dropped").get<uint64_t>();
  t.totals.app_bytes_in_flight = totals.at("app_bytes_in_flight").get<uint64_t>();
  t.totals.cross_bytes_sent = totals.at("cross_bytes_sent").get<uint64_t>();
  t.totals.cross_bytes_delivered = totals.at("cross_bytes_delivered").get<uint64_t>();
  t.totals.cross_bytes_dropped = totals.at("cross_bytes_dropped").get<uint64_t>();
  t.totals.cross_bytes_in_flight = totals.at("cross_bytes_in_flight").get<uint64_t>();
  t.totals.rtt_samples = totals.at("rtt_samples").get<uint64_t>();
  t.totals.min_rtt_ms = totals.at("min_rtt_ms").get<double>();
  const auto& cfg = j.at("config_echo");
  t.config.shaping_rate_bps = cfg.at("shaping_rate_bps").get<double>();
  t.config.base_latency_ms = cfg.at("base_latency_ms").get<double>();
  t.config.queue_capacity_pkts = cfg.at("queue_capacity_pkts").get<uint32_t>();
  t.config.aqm = aqm_from_name(cfg.at("aqm").get<std::string>());
  t.config.token_bucket_burst_bytes = cfg.at("token_bucket_burst_bytes").get<uint32_t>();
  t.config.mtu_bytes = cfg.at("mtu_bytes").get<uint32_t>();
  const auto& app = cfg.at("app");
  t.app.initial_cwnd_pkts = app.at("initial_cwnd_pkts").get<uint32_t>();
  t.app.init_ssthresh_pkts = app.at("init_ssthresh_pkts").get<uint32_t>();
  t.app.duration_s = app.at("duration_s").get<double>();
  t.app.seed = app.at("seed").get<uint64_t>();
  t.ctp_id = cfg.at("ctp_id").get<std::string>();
  return t;
}

std::string SimTrace::to_csv() const {
  std::ostringstream out;
  out << "time_s,throughput_bps,rtt_ms,qlen_pkts,drops\n";
  const double bin_s = static_cast<double>(telemetry_bin_ms) / 1000.0;
  out.precision(10);
  for (size_t i = 0; i < throughput_bps.size(); ++i) {
    out << static_cast<double>(i) * bin_s << ',' << throughput_bps[i] << ',';
    if (!std::isnan(rtt_ms[i])) out << rtt_ms[i];
    out << ',' << mean_qlen_pkts[i] << ',' << drops[i] << '\n';
  }
  return out.str();
}

}  // namespace netreplica::sim
