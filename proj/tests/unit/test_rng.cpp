#include "lsekit/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using lsekit::Rng;

TEST_CASE("rng: same seed, same stream") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(43);
  CHECK(Rng(42).next_u64() != c.next_u64());
}

TEST_CASE("rng: uniform_open0 stays in (0, 1]") {
  Rng rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform_open0();
    REQUIRE(u > 0.0);
    REQUIRE(u <= 1.0);
  }
}

TEST_CASE("rng: uniform_index covers the range evenly") {
  Rng rng(7);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 50000; ++i) ++counts[rng.uniform_index(5)];
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}

TEST_CASE("rng: normal moments") {
  Rng rng(11);
  const int n = 200000;
  double s = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.015);
}

TEST_CASE("rng: split streams are independent of parent consumption") {
  Rng parent(5);
  const auto before = parent.split(3).next_u64();
  for (int i = 0; i < 10; ++i) parent.next_u64();
  CHECK(parent.split(3).next_u64() == before);
  std::set<std::uint64_t> firsts;
  for (std::uint64_t id = 0; id < 100; ++id) firsts.insert(parent.split(id).next_u64());
  CHECK(firsts.size() == 100);
}
