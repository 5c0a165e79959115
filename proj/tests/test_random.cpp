#include <doctest.h>

#include <set>
#include <vector>

#include "pulsedtls/numerics/parallel.hpp"
#include "pulsedtls/numerics/random.hpp"

using namespace pulsedtls::numerics;

TEST_CASE("same seed, same sequence") {
  RandomStream a(123), b(123), c(124);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform_open();
    CHECK(x == b.uniform_open());
    CHECK(x > 0.0);
    CHECK(x < 1.0);
    differs = differs || x != c.uniform_open();
  }
  CHECK(differs);
}

TEST_CASE("mt19937_64 reference value") {
  // The 10000th output of the default-seeded engine is fixed by the C++ standard.
  std::mt19937_64 e;
  e.discard(9999);
  CHECK(e() == 9981545732273789042ULL);
}

TEST_CASE("substreams are reproducible and distinct") {
  const RandomStream root(5);
  std::set<std::uint64_t> first;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    auto s = root.substream(i);
    auto t = root.substream(i);
    const auto v = s.next_u64();
    CHECK(v == t.next_u64());
    first.insert(v);
  }
  CHECK(first.size() == 1000);
  CHECK(root.substream(3).seed() != RandomStream(6).substream(3).seed());
}

TEST_CASE("uniform mean and variance") {
  RandomStream r(99);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.uniform_open();
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  CHECK(std::abs(mean - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(s2 / n - mean * mean - 1.0 / 12.0) < 1e-3);
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(1003, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, 4);
  for (int h : hits) CHECK(h == 1);
  parallel_for(0, [&](std::size_t) { FAIL("called"); });
}
