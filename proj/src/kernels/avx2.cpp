#include "netreplica/kernels.hpp"

#if defined(__x86_64__)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace netreplica::kernels::detail {

namespace {

__attribute__((target("avx2"))) inline uint64_t hsum_epi64(__m256i v) {
  __m128i lo = _mm256_castsi256_si128(v);
  __m128i hi = _mm256_extracti128_si256(v, 1);
  __m128i s = _mm_add_epi64(lo, hi);
  return static_cast<uint64_t>(_mm_extract_epi64(s, 0)) +
         static_cast<uint64_t>(_mm_extract_epi64(s, 1));
}

__attribute__((target("avx2"))) uint64_t sum_u64_avx2(const uint64_t* xs, size_t n) {
  __m256i acc = _mm256_setzero_si256();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_epi64(acc, _mm256_loadu_si256(reinterpret_cast<const __m256i*>(xs + i)));
  }
  uint64_t total = hsum_epi64(acc);
  for (; i < n; ++i) total += xs[i];
  return total;
}

// AVX2 has no unsigned 64-bit compare; flip the sign bit and compare signed.
__attribute__((target("avx2"))) inline __m256i cmpgt_epu64(__m256i a, __m256i b) {
  const __m256i sign = _mm256_set1_epi64x(static_cast<long long>(0x8000000000000000ull));
  return _mm256_cmpgt_epi64(_mm256_xor_si256(a, sign), _mm256_xor_si256(b, sign));
}

__attribute__((target("avx2"))) uint64_t max_u64_avx2(const uint64_t* xs, size_t n) {
  size_t i = 0;
  __m256i best = _mm256_setzero_si256();
  for (; i + 4 <= n; i += 4) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(xs + i));
    best = _mm256_blendv_epi8(best, v, cmpgt_epu64(v, best));
  }
  alignas(32) uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), best);
  uint64_t m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) m = std::max(m, xs[i]);
  return m;
}

// Low 64 bits of x*x per lane: with x = xh*2^32 + xl,
// x^2 mod 2^64 = xl*xl + ((xl*xh) << 33).
__attribute__((target("avx2"))) uint64_t sum_sq_u64_avx2(const uint64_t* xs, size_t n) {
  __m256i acc = _mm256_setzero_si256();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(xs + i));
    const __m256i xh = _mm256_srli_epi64(x, 32);
    const __m256i lolo = _mm256_mul_epu32(x, x);
    const __m256i cross = _mm256_mul_epu32(x, xh);
    const __m256i sq = _mm256_add_epi64(lolo, _mm256_slli_epi64(cross, 33));
    acc = _mm256_add_epi64(acc, sq);
  }
  uint64_t total = hsum_epi64(acc);
  for (; i < n; ++i) total += xs[i] * xs[i];
  return total;
}

__attribute__((target("avx2"))) void add_u64_avx2(uint64_t* dst, const uint64_t* src, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i d = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + i));
    const __m256i s = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), _mm256_add_epi64(d, s));
  }
  for (; i < n; ++i) dst[i] += src[i];
}

__attribute__((target("avx2"))) uint64_t toggle_count_u64_avx2(const uint64_t* xs, size_t n,
                                                               uint64_t thr) {
  if (n < 2) return 0;
  const __m256i vthr = _mm256_set1_epi64x(static_cast<long long>(thr));
  uint64_t toggles = 0;
  size_t i = 0;
  // Compare state masks of xs[i..i+3] and xs[i+1..i+4]; XOR marks toggles.
  for (; i + 5 <= n; i += 4) {
    const __m256i v0 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(xs + i));
    const __m256i v1 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(xs + i + 1));
    const __m256i s0 = cmpgt_epu64(v0, vthr);
    const __m256i s1 = cmpgt_epu64(v1, vthr);
    const int mask = _mm256_movemask_pd(_mm256_castsi256_pd(_mm256_xor_si256(s0, s1)));
    toggles += static_cast<uint64_t>(__builtin_popcount(mask));
  }
  bool prev = xs[i] > thr;
  for (size_t k = i + 1; k < n; ++k) {
    const bool cur = xs[k] > thr;
    toggles += (cur != prev);
    prev = cur;
  }
  return toggles;
}

// Anti-diagonal wavefront DP. Cells on one anti-diagonal are independent,
// and each cell performs exactly the arithmetic of the scalar version
// (|a-b|, three-way min, one add), so the result is bit-identical.
//
// diag[d][i] holds D[i][d-i]; for diagonal d the interior cells are
//   cur[i] = |a[i-1] - b[d-i-1]| + min(prev1[i-1], prev1[i], prev2[i-1])
// with b accessed through its reversal so the loads stay contiguous in i.
__attribute__((target("avx2"))) double dtw_cost_avx2(const double* a, size_t n, const double* b,
                                                     size_t m) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (n < 8 || m < 8) {
    // Wavefront overhead dominates on tiny grids.
    std::vector<double> prev(m + 1, kInf), cur(m + 1, kInf);
    prev[0] = 0.0;
    for (size_t i = 1; i <= n; ++i) {
      cur[0] = kInf;
      for (size_t j = 1; j <= m; ++j) {
        const double cost = std::fabs(a[i - 1] - b[j - 1]);
        cur[j] = cost + std::min(std::min(prev[j], cur[j - 1]), prev[j - 1]);
      }
      std::swap(prev, cur);
    }
    return prev[m];
  }

  std::vector<double> brev(m);
  for (size_t k = 0; k < m; ++k) brev[k] = b[m - 1 - k];

  std::vector<double> buf0(n + 1, kInf), buf1(n + 1, kInf), buf2(n + 1, kInf);
  double* prev2 = buf0.data();  // diagonal d-2
  double* prev1 = buf1.data();  // diagonal d-1
  double* cur = buf2.data();

  prev2[0] = 0.0;             // D[0][0]
  prev1[0] = kInf;            // D[0][1]
  if (n >= 1) prev1[1] = kInf;  // D[1][0]

  const __m256i sign_mask = _mm256_set1_epi64x(static_cast<long long>(0x8000000000000000ull));

  for (size_t d = 2; d <= n + m; ++d) {
    const size_t ilo = d > m ? d - m : 1;   // max(1, d-m)
    const size_t ihi = std::min(n, d - 1);  // interior upper bound
    if (d <= m) cur[0] = kInf;              // D[0][d]
    if (d <= n) cur[d] = kInf;              // D[d][0]

    size_t i = ilo;
    // brev index of b[d-i-1] is m-d+i, contiguous in i.
    const ptrdiff_t boff = static_cast<ptrdiff_t>(m) - static_cast<ptrdiff_t>(d);
    for (; i + 4 <= ihi + 1; i += 4) {
      const __m256d va = _mm256_loadu_pd(a + i - 1);
      const __m256d vb = _mm256_loadu_pd(brev.data() + (boff + static_cast<ptrdiff_t>(i)));
      const __m256d diff = _mm256_sub_pd(va, vb);
      const __m256d cost =
          _mm256_andnot_pd(_mm256_castsi256_pd(sign_mask), diff);
      const __m256d up = _mm256_loadu_pd(prev1 + i - 1);
      const __m256d left = _mm256_loadu_pd(prev1 + i);
      const __m256d ul = _mm256_loadu_pd(prev2 + i - 1);
      const __m256d best = _mm256_min_pd(_mm256_min_pd(up, left), ul);
      _mm256_storeu_pd(cur + i, _mm256_add_pd(cost, best));
    }
    for (; i <= ihi; ++i) {
      const double cost = std::fabs(a[i - 1] - brev[static_cast<size_t>(boff + static_cast<ptrdiff_t>(i))]);
      cur[i] = cost + std::min(std::min(prev1[i - 1], prev1[i]), prev2[i - 1]);
    }

    double* recycled = prev2;
    prev2 = prev1;
    prev1 = cur;
    cur = recycled;
  }
  return prev1[n];
}

}  // namespace

const KernelOps* avx2_ops() {
  if (!__builtin_cpu_supports("avx2")) return nullptr;
  static const KernelOps ops = {
      sum_u64_avx2,    max_u64_avx2,          sum_sq_u64_avx2,
      add_u64_avx2,    toggle_count_u64_avx2, dtw_cost_avx2,
  };
  return &ops;
}

}  // namespace netreplica::kernels::detail

#else  // !__x86_64__

namespace netreplica::kernels::detail {
const KernelOps* avx2_ops() { return nullptr; }
}  // namespace netreplica::kernels::detail

#endif
