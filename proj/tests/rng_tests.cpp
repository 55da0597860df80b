#include <set>

#include "mccnet/rng.hpp"

#include "doctest_torch.h"

using namespace mccnet;

TEST_SUITE("rng") {

TEST_CASE("derive is deterministic and separates streams and counters") {
  auto a = Rng::derive(42, rng_stream::kBatch, 0);
  CHECK(a == Rng::derive(42, rng_stream::kBatch, 0));

  std::set<std::uint64_t> seen;
  for (std::uint64_t seed : {0ull, 1ull, 42ull}) {
    for (std::uint64_t stream : {rng_stream::kDecoderInit, rng_stream::kBatch,
                                 rng_stream::kNoise}) {
      for (std::uint64_t counter : {0ull, 1ull, 2ull}) {
        seen.insert(Rng::derive(seed, stream, counter));
      }
    }
  }
  CHECK(seen.size() == 27);  // no collisions across the grid
}

TEST_CASE("identical seeds replay identical draws") {
  Rng a(1234), b(1234);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.normal() == b.normal());
    CHECK(a.uniform_int(0, 1000) == b.uniform_int(0, 1000));
  }
}

TEST_CASE("uniform_int bounds are inclusive") {
  Rng rng(5);
  bool saw_lo = false, saw_hi = false;
  for (int i = 0; i < 2000; ++i) {
    auto v = rng.uniform_int(3, 5);
    CHECK(v >= 3);
    CHECK(v <= 5);
    saw_lo |= (v == 3);
    saw_hi |= (v == 5);
  }
  CHECK(saw_lo);
  CHECK(saw_hi);
}

TEST_CASE("tensor draws are reproducible and respect dtype") {
  Rng a(9), b(9);
  auto ta = a.normal_tensor({3, 4}, 2.0);
  auto tb = b.normal_tensor({3, 4}, 2.0);
  CHECK(torch::equal(ta, tb));
  CHECK((ta.scalar_type() == torch::kFloat32));

  auto td = a.normal_tensor({8}, 1.0, torch::kFloat64);
  CHECK((td.scalar_type() == torch::kFloat64));

  auto tu = a.uniform_tensor({1000}, -1.0, 1.0);
  CHECK(tu.min().item<float>() >= -1.0f);
  CHECK(tu.max().item<float>() <= 1.0f);
}

TEST_CASE("normal_tensor stddev scales the draw") {
  Rng a(11), b(11);
  auto t1 = a.normal_tensor({64, 64}, 1.0, torch::kFloat64);
  auto t2 = b.normal_tensor({64, 64}, 0.25, torch::kFloat64);
  CHECK(torch::allclose(t1 * 0.25, t2));
}

}  // TEST_SUITE
