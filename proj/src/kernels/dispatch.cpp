#include "netreplica/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace netreplica::kernels {

namespace {

using detail::KernelOps;

const KernelOps* ops_for(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return &detail::scalar_ops();
    case Backend::Avx2:
      return detail::avx2_ops();
  }
  return nullptr;
}

Backend initial_backend() {
  if (const char* env = std::getenv("NETREPLICA_KERNELS")) {
    const std::string want(env);
    if (want == "scalar") return Backend::Scalar;
    if (want == "avx2" && ops_for(Backend::Avx2)) return Backend::Avx2;
  }
  return ops_for(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& selected() {
  static std::atomic<Backend> backend{initial_backend()};
  return backend;
}

const KernelOps& ops() { return *ops_for(selected().load(std::memory_order_relaxed)); }

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
  }
  return "?";
}

bool backend_supported(Backend b) { return ops_for(b) != nullptr; }

Backend active_backend() { return selected().load(std::memory_order_relaxed); }

bool set_backend(Backend b) {
  if (!ops_for(b)) return false;
  selected().store(b, std::memory_order_relaxed);
  return true;
}

uint64_t sum_u64(std::span<const uint64_t> xs) { return ops().sum_u64(xs.data(), xs.size()); }

uint64_t max_u64(std::span<const uint64_t> xs) { return ops().max_u64(xs.data(), xs.size()); }

uint64_t sum_sq_u64(std::span<const uint64_t> xs) {
  return ops().sum_sq_u64(xs.data(), xs.size());
}

void add_u64(std::span<uint64_t> dst, std::span<const uint64_t> src) {
  if (dst.size() != src.size()) throw std::invalid_argument("add_u64: length mismatch");
  ops().add_u64(dst.data(), src.data(), dst.size());
}

uint64_t toggle_count_u64(std::span<const uint64_t> xs, uint64_t on_threshold) {
  return ops().toggle_count_u64(xs.data(), xs.size(), on_threshold);
}

double dtw_cost(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("dtw_cost: empty series");
  return ops().dtw_cost(a.data(), a.size(), b.data(), b.size());
}

}  // namespace netreplica::kernels
