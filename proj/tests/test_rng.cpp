#include <doctest.h>

#include <cmath>
#include <vector>

#include "nestmc/rng.hpp"

using namespace nestmc;

TEST_CASE("same seed path replays the same sequence") {
  RngStream a = make_stream(42);
  RngStream b = make_stream(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(a.seed_path() == std::vector<std::uint64_t>{42});
}

TEST_CASE("distinct seeds diverge") {
  RngStream a = make_stream(42);
  RngStream b = make_stream(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i)
    if (a.uniform() != b.uniform()) differs = true;
  CHECK(differs);
}

TEST_CASE("uniform mean over 1e6 draws") {
  RngStream s = make_stream(7);
  double sum = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) sum += s.uniform();
  // 3 sigma with sigma = 1/sqrt(12 n)
  CHECK(std::fabs(sum / n - 0.5) < 0.002);
}

TEST_CASE("uniforms stay inside the open interval") {
  RngStream s = make_stream(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("substreams with distinct indices differ") {
  RngStream root = make_stream(5);
  RngStream a = substream(root, 0);
  RngStream b = substream(root, 1);
  CHECK(a.seed_path() == std::vector<std::uint64_t>{5, 0});
  CHECK(b.seed_path() == std::vector<std::uint64_t>{5, 1});
  bool differs = false;
  for (int i = 0; i < 100; ++i)
    if (a.next_u64() != b.next_u64()) differs = true;
  CHECK(differs);
}

TEST_CASE("substream derivation is path sensitive") {
  RngStream root = make_stream(5);
  RngStream ab = substream(substream(root, 0), 1);
  RngStream ba = substream(substream(root, 1), 0);
  bool differs = false;
  for (int i = 0; i < 100; ++i)
    if (ab.next_u64() != ba.next_u64()) differs = true;
  CHECK(differs);
}

TEST_CASE("sibling substreams are decorrelated") {
  RngStream root = make_stream(99);
  RngStream a = substream(root, 0);
  RngStream b = substream(root, 1);
  const int n = 100000;
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (int i = 0; i < n; ++i) {
    const double ua = a.uniform(), ub = b.uniform();
    sa += ua;
    sb += ub;
    saa += ua * ua;
    sbb += ub * ub;
    sab += ua * ub;
  }
  const double cov = sab / n - (sa / n) * (sb / n);
  const double var_a = saa / n - (sa / n) * (sa / n);
  const double var_b = sbb / n - (sb / n) * (sb / n);
  const double rho = cov / std::sqrt(var_a * var_b);
  CHECK(std::fabs(rho) < 0.01);
}

TEST_CASE("copying a stream forks its state") {
  RngStream a = make_stream(3);
  (void)a.next_u64();
  RngStream b = a;  // value semantics: both continue identically
  for (int i = 0; i < 64; ++i) CHECK(a.next_u64() == b.next_u64());
}
