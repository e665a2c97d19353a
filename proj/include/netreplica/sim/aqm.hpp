#pragma once

#include <cstdint>
#include <deque>
#include <list>
#include <memory>
#include <optional>
#include <vector>

namespace netreplica::sim {

// Simulation time, integer nanoseconds from run start.
using Ns = int64_t;

constexpr Ns kUs = 1'000;
constexpr Ns kMsNs = 1'000'000;
constexpr Ns kSecNs = 1'000'000'000;

enum class PacketKind : uint8_t { App, Cross };

struct QueuedPacket {
  PacketKind kind = PacketKind::Cross;
  uint64_t seq = 0;  // app sequence number; 0 for cross traffic
  uint32_t size_bytes = 0;
  uint64_t flow_key = 0;
  Ns enqueue_ns = 0;
  bool retransmit = false;
};

// Queue discipline at the bottleneck. enqueue() returns false when the
// arriving packet itself is dropped; policies may instead evict an already
// queued packet (FQ-CoDel sheds from the fattest flow at capacity), and
// dequeue() may drop while deciding (CoDel). Evicted packets are reported
// through *dropped.
class Aqm {
 public:
  virtual ~Aqm() = default;
  virtual bool enqueue(QueuedPacket p, Ns now, std::vector<QueuedPacket>* dropped) = 0;
  virtual std::optional<QueuedPacket> dequeue(Ns now, std::vector<QueuedPacket>* dropped) = 0;
  virtual size_t packets() const = 0;
  virtual uint64_t bytes() const = 0;
};

enum class AqmPolicy : uint8_t { Pfifo, Codel, FqCodel };

struct AqmParams {
  uint32_t queue_capacity_pkts = 1000;
  uint32_t mtu_bytes = 1500;
  // Controlled-delay constants.
  Ns codel_target = 5 * kMsNs;
  Ns codel_interval = 100 * kMsNs;
  uint32_t fq_buckets = 1024;
  uint32_t fq_quantum = 1514;  // MTU + 14 by default; overridden from config
};

std::unique_ptr<Aqm> make_aqm(AqmPolicy policy, const AqmParams& params);

}  // namespace netreplica::sim
