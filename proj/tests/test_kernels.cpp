#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "netreplica/kernels.hpp"

namespace nk = netreplica::kernels;
using nk::detail::KernelOps;

namespace {

// Independent full-matrix DTW oracle; kept deliberately naive.
double dtw_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  const size_t n = a.size(), m = b.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> d(n + 1, std::vector<double>(m + 1, inf));
  d[0][0] = 0.0;
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      const double cost = std::fabs(a[i - 1] - b[j - 1]);
      d[i][j] = cost + std::min({d[i - 1][j], d[i][j - 1], d[i - 1][j - 1]});
    }
  }
  return d[n][m];
}

std::vector<uint64_t> random_u64(std::mt19937_64& rng, size_t n, uint64_t hi) {
  std::uniform_int_distribution<uint64_t> dist(0, hi);
  std::vector<uint64_t> xs(n);
  for (auto& x : xs) x = dist(rng);
  return xs;
}

struct BothBackends {
  const KernelOps& scalar = nk::detail::scalar_ops();
  const KernelOps* avx2 = nk::detail::avx2_ops();
};

}  // namespace

TEST_CASE("kernel backends report sanely") {
  CHECK(nk::backend_supported(nk::Backend::Scalar));
  CHECK(nk::backend_name(nk::Backend::Scalar) == "scalar");
  const auto original = nk::active_backend();
  CHECK(nk::set_backend(nk::Backend::Scalar));
  CHECK(nk::active_backend() == nk::Backend::Scalar);
  nk::set_backend(original);
}

TEST_CASE("u64 kernels: scalar and avx2 agree exactly") {
  BothBackends ops;
  if (!ops.avx2) {
    MESSAGE("avx2 backend not available; equivalence via scalar only");
    return;
  }
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t n = static_cast<size_t>(rng() % 70);  // covers tails and empty
    // Large values exercise mod-2^64 wrap in sums of squares.
    const uint64_t hi = (trial % 3 == 0) ? ~uint64_t{0} : uint64_t{1} << 32;
    auto xs = random_u64(rng, n, hi);
    const uint64_t thr = n == 0 ? 0 : xs[rng() % std::max<size_t>(n, 1)];

    CHECK(ops.scalar.sum_u64(xs.data(), n) == ops.avx2->sum_u64(xs.data(), n));
    CHECK(ops.scalar.max_u64(xs.data(), n) == ops.avx2->max_u64(xs.data(), n));
    CHECK(ops.scalar.sum_sq_u64(xs.data(), n) == ops.avx2->sum_sq_u64(xs.data(), n));
    CHECK(ops.scalar.toggle_count_u64(xs.data(), n, thr) ==
          ops.avx2->toggle_count_u64(xs.data(), n, thr));

    auto dst_a = random_u64(rng, n, hi);
    auto dst_b = dst_a;
    ops.scalar.add_u64(dst_a.data(), xs.data(), n);
    ops.avx2->add_u64(dst_b.data(), xs.data(), n);
    CHECK(dst_a == dst_b);
  }
}

TEST_CASE("u64 kernels: reference semantics") {
  std::vector<uint64_t> xs = {3, 1, 4, 1, 5, 9, 2, 6};
  CHECK(nk::sum_u64(xs) == 31);
  CHECK(nk::max_u64(xs) == 9);
  CHECK(nk::sum_sq_u64(xs) == 9 + 1 + 16 + 1 + 25 + 81 + 4 + 36);
  CHECK(nk::sum_u64({}) == 0);
  CHECK(nk::max_u64({}) == 0);

  std::vector<uint64_t> dst = {1, 2, 3};
  std::vector<uint64_t> src = {10, 20, 30};
  nk::add_u64(dst, src);
  CHECK(dst == std::vector<uint64_t>{11, 22, 33});
  CHECK_THROWS_AS(nk::add_u64(dst, {}), std::invalid_argument);
}

TEST_CASE("toggle_count_u64 counts state changes of x > threshold") {
  // states: 0,1,0,1 -> 3 toggles
  CHECK(nk::toggle_count_u64(std::vector<uint64_t>{0, 5, 0, 5}, 1) == 3);
  // constant below threshold
  CHECK(nk::toggle_count_u64(std::vector<uint64_t>{1, 1, 1}, 1) == 0);
  // strictness: equal to threshold is OFF
  CHECK(nk::toggle_count_u64(std::vector<uint64_t>{1, 2}, 1) == 1);
  CHECK(nk::toggle_count_u64(std::vector<uint64_t>{1}, 0) == 0);
  CHECK(nk::toggle_count_u64(std::vector<uint64_t>{}, 0) == 0);

  // naive cross-check on random input
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const size_t n = 1 + rng() % 40;
    auto xs = random_u64(rng, n, 10);
    const uint64_t thr = rng() % 11;
    uint64_t expect = 0;
    for (size_t i = 1; i < n; ++i) expect += (xs[i] > thr) != (xs[i - 1] > thr);
    CHECK(nk::toggle_count_u64(xs, thr) == expect);
  }
}

TEST_CASE("dtw_cost matches the brute-force oracle exactly") {
  BothBackends ops;
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> val(-50.0, 50.0);

  for (int trial = 0; trial < 200; ++trial) {
    const size_t n = 1 + rng() % 32;
    const size_t m = 1 + rng() % 32;
    std::vector<double> a(n), b(m);
    for (auto& x : a) x = val(rng);
    for (auto& x : b) x = val(rng);

    const double expect = dtw_oracle(a, b);
    const double scalar = ops.scalar.dtw_cost(a.data(), n, b.data(), m);
    CHECK(scalar == expect);
    if (ops.avx2) CHECK(ops.avx2->dtw_cost(a.data(), n, b.data(), m) == expect);
  }
}

TEST_CASE("dtw_cost basics") {
  std::vector<double> x = {1.0, 2.0, 3.5, -1.0};
  CHECK(nk::dtw_cost(x, x) == 0.0);
  CHECK(nk::dtw_cost(std::vector<double>{0, 0}, std::vector<double>{1, 1}) == 2.0);
  CHECK_THROWS_AS(nk::dtw_cost({}, x), std::invalid_argument);

  // symmetry on random pairs
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> val(0.0, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(1 + rng() % 20), b(1 + rng() % 20);
    for (auto& v : a) v = val(rng);
    for (auto& v : b) v = val(rng);
    CHECK(nk::dtw_cost(a, b) == nk::dtw_cost(b, a));
  }
}

TEST_CASE("dtw_cost scalar/avx2 agree on long series") {
  BothBackends ops;
  if (!ops.avx2) return;
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> val(-1e6, 1e6);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> a(100 + rng() % 400), b(100 + rng() % 400);
    for (auto& v : a) v = val(rng);
    for (auto& v : b) v = val(rng);
    CHECK(ops.scalar.dtw_cost(a.data(), a.size(), b.data(), b.size()) ==
          ops.avx2->dtw_cost(a.data(), a.size(), b.data(), b.size()));
  }
}
