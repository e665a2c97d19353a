#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

// Data-parallel inner loops used by the profile pipeline and the evaluation
// metrics. Every operation has a scalar reference implementation and, on
// x86-64, an AVX2 variant selected at runtime. The two backends are required
// to produce bit-identical results:
//
//   * integer kernels wrap mod 2^64, so any summation order is exact;
//   * dtw_cost performs the same per-cell arithmetic (one abs-difference,
//     one three-way min, one add) in both backends, so the accumulated cost
//     is identical regardless of evaluation order.
//
// The environment variable NETREPLICA_KERNELS=scalar|avx2 overrides the
// automatic choice (useful for A/B runs and for the equivalence tests).

namespace netreplica::kernels {

enum class Backend { Scalar, Avx2 };

std::string_view backend_name(Backend b);

// Backend compiled in and usable on this CPU.
bool backend_supported(Backend b);

Backend active_backend();

// Returns false (and leaves the selection unchanged) if unsupported.
bool set_backend(Backend b);

// Sum of all elements, mod 2^64. 0 for an empty span.
uint64_t sum_u64(std::span<const uint64_t> xs);

// Largest element; 0 for an empty span.
uint64_t max_u64(std::span<const uint64_t> xs);

// Sum of squares of all elements, mod 2^64.
uint64_t sum_sq_u64(std::span<const uint64_t> xs);

// dst[i] += src[i]; spans must have equal length.
void add_u64(std::span<uint64_t> dst, std::span<const uint64_t> src);

// Number of adjacent index pairs whose (x > on_threshold) state differs.
// 0 for spans shorter than 2.
uint64_t toggle_count_u64(std::span<const uint64_t> xs, uint64_t on_threshold);

// Dynamic-time-warping cost between two non-empty series: full-grid dynamic
// program, local cost |a_i - b_j|, steps {down, right, diagonal}, no warping
// window, no normalization. Returns the accumulated cost at the (n, m) cell.
double dtw_cost(std::span<const double> a, std::span<const double> b);

namespace detail {

struct KernelOps {
  uint64_t (*sum_u64)(const uint64_t*, size_t);
  uint64_t (*max_u64)(const uint64_t*, size_t);
  uint64_t (*sum_sq_u64)(const uint64_t*, size_t);
  void (*add_u64)(uint64_t*, const uint64_t*, size_t);
  uint64_t (*toggle_count_u64)(const uint64_t*, size_t, uint64_t);
  double (*dtw_cost)(const double*, size_t, const double*, size_t);
};

const KernelOps& scalar_ops();
const KernelOps* avx2_ops();  // nullptr when not compiled in

}  // namespace detail

}  // namespace netreplica::kernels
