#include "netreplica/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace netreplica::kernels::detail {

namespace {

uint64_t sum_u64_scalar(const uint64_t* xs, size_t n) {
  uint64_t acc = 0;
  for (size_t i = 0; i < n; ++i) acc += xs[i];
  return acc;
}

uint64_t max_u64_scalar(const uint64_t* xs, size_t n) {
  uint64_t best = 0;
  for (size_t i = 0; i < n; ++i) best = std::max(best, xs[i]);
  return best;
}

uint64_t sum_sq_u64_scalar(const uint64_t* xs, size_t n) {
  uint64_t acc = 0;
  for (size_t i = 0; i < n; ++i) acc += xs[i] * xs[i];
  return acc;
}

void add_u64_scalar(uint64_t* dst, const uint64_t* src, size_t n) {
  for (size_t i = 0; i < n; ++i) dst[i] += src[i];
}

uint64_t toggle_count_u64_scalar(const uint64_t* xs, size_t n, uint64_t thr) {
  if (n < 2) return 0;
  uint64_t toggles = 0;
  bool prev = xs[0] > thr;
  for (size_t i = 1; i < n; ++i) {
    const bool cur = xs[i] > thr;
    toggles += (cur != prev);
    prev = cur;
  }
  return toggles;
}

// Rolling two-row DP. Border cells (row 0 / column 0 beyond the origin) are
// +inf so the path is pinned to (1,1).
double dtw_cost_scalar(const double* a, size_t n, const double* b, size_t m) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(m + 1, kInf), cur(m + 1, kInf);
  prev[0] = 0.0;
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = kInf;
    for (size_t j = 1; j <= m; ++j) {
      const double cost = std::fabs(a[i - 1] - b[j - 1]);
      const double best = std::min(std::min(prev[j], cur[j - 1]), prev[j - 1]);
      cur[j] = cost + best;
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

}  // namespace

const KernelOps& scalar_ops() {
  static const KernelOps ops = {
      sum_u64_scalar,    max_u64_scalar,          sum_sq_u64_scalar,
      add_u64_scalar,    toggle_count_u64_scalar, dtw_cost_scalar,
  };
  return ops;
}

}  // namespace netreplica::kernels::detail
