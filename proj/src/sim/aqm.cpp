#include "netreplica/sim/aqm.hpp"

#include <cmath>
#include <unordered_map>

namespace netreplica::sim {

namespace {

class PfifoQueue final : public Aqm {
 public:
  explicit PfifoQueue(const AqmParams& params) : capacity_(params.queue_capacity_pkts) {}

  bool enqueue(QueuedPacket p, Ns now, std::vector<QueuedPacket>*) override {
    (void)now;
    if (queue_.size() >= capacity_) return false;  // tail drop
    bytes_ += p.size_bytes;
    queue_.push_back(std::move(p));
    return true;
  }

  std::optional<QueuedPacket> dequeue(Ns now, std::vector<QueuedPacket>*) override {
    (void)now;
    if (queue_.empty()) return std::nullopt;
    QueuedPacket p = std::move(queue_.front());
    queue_.pop_front();
    bytes_ -= p.size_bytes;
    return p;
  }

  size_t packets() const override { return queue_.size(); }
  uint64_t bytes() const override { return bytes_; }

 private:
  size_t capacity_;
  std::deque<QueuedPacket> queue_;
  uint64_t bytes_ = 0;
};

// Sojourn-time controller state shared by CoDel and the per-bucket FQ-CoDel
// instances. Drop cadence follows the inverse-sqrt control law.
struct CodelState {
  Ns first_above = 0;
  Ns drop_next = 0;
  uint32_t count = 0;
  bool dropping = false;
};

struct DodequeueResult {
  std::optional<QueuedPacket> p;
  bool ok_to_drop = false;
};

Ns control_law(Ns t, uint32_t count, Ns interval) {
  return t + static_cast<Ns>(static_cast<double>(interval) / std::sqrt(static_cast<double>(count)));
}

template <typename PopFront>
DodequeueResult codel_dodequeue(CodelState& st, Ns now, const AqmParams& params,
                                uint64_t queued_bytes, PopFront&& pop_front) {
  DodequeueResult r;
  r.p = pop_front();
  if (!r.p) {
    st.first_above = 0;
    return r;
  }
  const Ns sojourn = now - r.p->enqueue_ns;
  if (sojourn < params.codel_target || queued_bytes < params.mtu_bytes) {
    st.first_above = 0;
  } else if (st.first_above == 0) {
    st.first_above = now + params.codel_interval;
  } else if (now >= st.first_above) {
    r.ok_to_drop = true;
  }
  return r;
}

// One CoDel dequeue step over an arbitrary FIFO. Drops are appended to
// *dropped; returns the packet to transmit (or nullopt when the FIFO ran
// empty).
template <typename PopFront, typename BytesLeft>
std::optional<QueuedPacket> codel_dequeue(CodelState& st, Ns now, const AqmParams& params,
                                          std::vector<QueuedPacket>* dropped,
                                          PopFront&& pop_front, BytesLeft&& bytes_left) {
  auto r = codel_dodequeue(st, now, params, bytes_left(), pop_front);
  if (!r.p) {
    st.dropping = false;
    return std::nullopt;
  }
  if (st.dropping) {
    if (!r.ok_to_drop) {
      st.dropping = false;
    } else {
      while (st.dropping && now >= st.drop_next) {
        if (dropped) dropped->push_back(*r.p);
        ++st.count;
        r = codel_dodequeue(st, now, params, bytes_left(), pop_front);
        if (!r.p) {
          st.dropping = false;
          return std::nullopt;
        }
        if (!r.ok_to_drop) {
          st.dropping = false;
        } else {
          st.drop_next = control_law(st.drop_next, st.count, params.codel_interval);
        }
      }
    }
  } else if (r.ok_to_drop && (now - st.drop_next < params.codel_interval ||
                              now - st.first_above >= params.codel_interval)) {
    if (dropped) dropped->push_back(*r.p);
    r = codel_dodequeue(st, now, params, bytes_left(), pop_front);
    st.dropping = true;
    // Resume near the drop rate that last controlled the queue.
    if (now - st.drop_next < params.codel_interval) {
      st.count = st.count > 2 ? st.count - 2 : 1;
    } else {
      st.count = 1;
    }
    st.drop_next = control_law(now, st.count, params.codel_interval);
    if (!r.p) {
      st.dropping = false;
      return std::nullopt;
    }
  }
  return r.p;
}

class CodelQueue final : public Aqm {
 public:
  explicit CodelQueue(const AqmParams& params) : params_(params) {}

  bool enqueue(QueuedPacket p, Ns now, std::vector<QueuedPacket>*) override {
    (void)now;
    if (queue_.size() >= params_.queue_capacity_pkts) return false;
    bytes_ += p.size_bytes;
    queue_.push_back(std::move(p));
    return true;
  }

  std::optional<QueuedPacket> dequeue(Ns now, std::vector<QueuedPacket>* dropped) override {
    return codel_dequeue(
        state_, now, params_, dropped,
        [this]() -> std::optional<QueuedPacket> {
          if (queue_.empty()) return std::nullopt;
          QueuedPacket p = std::move(queue_.front());
          queue_.pop_front();
          bytes_ -= p.size_bytes;
          return p;
        },
        [this]() { return bytes_; });
  }

  size_t packets() const override { return queue_.size(); }
  uint64_t bytes() const override { return bytes_; }

 private:
  AqmParams params_;
  std::deque<QueuedPacket> queue_;
  uint64_t bytes_ = 0;
  CodelState state_;
};

// Deficit-round-robin over hashed flow buckets with per-bucket CoDel, in the
// spirit of RFC 8290. Arriving packets are dropped when the shared capacity
// is exhausted.
class FqCodelQueue final : public Aqm {
 public:
  explicit FqCodelQueue(const AqmParams& params)
      : params_(params), buckets_(params.fq_buckets) {}

  bool enqueue(QueuedPacket p, Ns now, std::vector<QueuedPacket>* dropped) override {
    (void)now;
    // At capacity, shed from the head of the fattest flow so one heavy
    // stream cannot starve the others of queue space.
    if (total_packets_ >= params_.queue_capacity_pkts) evict_from_fattest(dropped);
    if (total_packets_ >= params_.queue_capacity_pkts) return false;
    const uint32_t idx = static_cast<uint32_t>(p.flow_key % buckets_.size());
    Bucket& b = buckets_[idx];
    total_bytes_ += p.size_bytes;
    b.bytes += p.size_bytes;
    b.queue.push_back(std::move(p));
    ++total_packets_;
    if (!b.in_list) {
      b.in_list = true;
      b.deficit = static_cast<int64_t>(params_.fq_quantum);
      new_flows_.push_back(idx);
    }
    return true;
  }

  std::optional<QueuedPacket> dequeue(Ns now, std::vector<QueuedPacket>* dropped) override {
    while (true) {
      const bool from_new = !new_flows_.empty();
      if (!from_new && old_flows_.empty()) return std::nullopt;
      const uint32_t idx = from_new ? new_flows_.front() : old_flows_.front();
      Bucket& b = buckets_[idx];

      if (b.deficit <= 0) {
        b.deficit += static_cast<int64_t>(params_.fq_quantum);
        (from_new ? new_flows_ : old_flows_).pop_front();
        old_flows_.push_back(idx);
        continue;
      }

      auto p = codel_dequeue(
          b.codel, now, params_, dropped,
          [this, &b]() -> std::optional<QueuedPacket> {
            if (b.queue.empty()) return std::nullopt;
            QueuedPacket q = std::move(b.queue.front());
            b.queue.pop_front();
            b.bytes -= q.size_bytes;
            total_bytes_ -= q.size_bytes;
            --total_packets_;
            return q;
          },
          [&b]() { return b.bytes; });

      if (!p) {
        // Bucket ran dry: a new flow gets one more round in the old list.
        (from_new ? new_flows_ : old_flows_).pop_front();
        if (from_new) {
          old_flows_.push_back(idx);
        } else {
          b.in_list = false;
        }
        continue;
      }
      b.deficit -= static_cast<int64_t>(p->size_bytes);
      return p;
    }
  }

  size_t packets() const override { return total_packets_; }
  uint64_t bytes() const override { return total_bytes_; }

 private:
  struct Bucket {
    std::deque<QueuedPacket> queue;
    uint64_t bytes = 0;
    int64_t deficit = 0;
    bool in_list = false;
    CodelState codel;
  };

  void evict_from_fattest(std::vector<QueuedPacket>* dropped) {
    Bucket* fattest = nullptr;
    for (auto& b : buckets_) {
      if (!b.queue.empty() && (!fattest || b.bytes > fattest->bytes)) fattest = &b;
    }
    if (!fattest) return;
    QueuedPacket victim = std::move(fattest->queue.front());
    fattest->queue.pop_front();
    fattest->bytes -= victim.size_bytes;
    total_bytes_ -= victim.size_bytes;
    --total_packets_;
    if (dropped) dropped->push_back(std::move(victim));
  }

  AqmParams params_;
  std::vector<Bucket> buckets_;
  std::deque<uint32_t> new_flows_;
  std::deque<uint32_t> old_flows_;
  size_t total_packets_ = 0;
  uint64_t total_bytes_ = 0;
};

}  // namespace

std::unique_ptr<Aqm> make_aqm(AqmPolicy policy, const AqmParams& params) {
  switch (policy) {
    case AqmPolicy::Pfifo:
      return std::make_unique<PfifoQueue>(params);
    case AqmPolicy::Codel:
      return std::make_unique<CodelQueue>(params);
    case AqmPolicy::FqCodel:
      return std::make_unique<FqCodelQueue>(params);
  }
  return nullptr;
}

}  // namespace netreplica::sim
