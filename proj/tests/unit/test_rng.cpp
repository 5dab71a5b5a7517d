#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "mixens/rng.hpp"

using namespace mixens;

TEST_SUITE("rng") {
  TEST_CASE("engine matches the published MT19937-64 reference output") {
    Rng rng(5489);
    std::uint64_t last = 0;
    for (int i = 0; i < 10000; ++i) last = rng.next_u64();
    CHECK(last == 9981545732273789042ULL);
  }

  TEST_CASE("derive_seed is a fixed function of (seed, stream)") {
    CHECK(derive_seed(1234567, 0) == 6457827717110365317ULL);
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(99, 7) == derive_seed(99, 7));
  }

  TEST_CASE("uniform01 stays in [0, 1) and below(n) in [0, n)") {
    Rng rng(1);
    for (int i = 0; i < 10000; ++i) {
      const double u = rng.uniform01();
      CHECK((u >= 0.0 && u < 1.0));
      CHECK(rng.below(7) < 7);
    }
  }

  TEST_CASE("below is close to uniform") {
    Rng rng(2);
    std::vector<int> counts(5, 0);
    const int n = 50000;
    for (int i = 0; i < n; ++i) ++counts[rng.below(5)];
    // 4 sigma of a binomial(50000, 0.2) count is about 358.
    for (const int c : counts) CHECK(std::abs(c - n / 5) < 360);
  }

  TEST_CASE("normal draws have mean near 0 and variance near 1") {
    Rng rng(3);
    const int n = 100000;
    double s = 0.0;
    double s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double z = rng.normal();
      s += z;
      s2 += z * z;
    }
    CHECK(std::abs(s / n) < 0.02);
    CHECK(std::abs(s2 / n - 1.0) < 0.03);
  }

  TEST_CASE("shuffle permutes and is reproducible") {
    std::vector<int> a(50);
    std::iota(a.begin(), a.end(), 0);
    auto b = a;
    Rng r1(11);
    Rng r2(11);
    r1.shuffle(a);
    r2.shuffle(b);
    CHECK(a == b);
    auto sorted = a;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> expect(50);
    std::iota(expect.begin(), expect.end(), 0);
    CHECK(sorted == expect);
  }
}
