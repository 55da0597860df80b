#pragma once

#include <torch/torch.h>

#include <cstdint>
#include <random>

namespace mccnet {

// Deterministic randomness for the whole project. torch's global RNG is
// never consumed; every random draw comes from an explicit Rng so that
// training is resumable and batch prefetch stays reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Stream derivation: (seed, stream, counter) -> independent seed.
  // Batch k of a run depends only on (config.seed, k), which is what makes
  // interrupted-and-resumed runs bit-identical to uninterrupted ones.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t counter);

  double normal(double mean = 0.0, double stddev = 1.0);
  // Inclusive bounds.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  torch::Tensor normal_tensor(torch::IntArrayRef shape, double stddev,
                              torch::ScalarType dtype = torch::kFloat32);
  torch::Tensor uniform_tensor(torch::IntArrayRef shape, double lo, double hi,
                               torch::ScalarType dtype = torch::kFloat32);

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

// Well-known stream ids.
namespace rng_stream {
constexpr std::uint64_t kDecoderInit = 1;
constexpr std::uint64_t kMccInit = 2;
constexpr std::uint64_t kBatch = 3;
constexpr std::uint64_t kNoise = 4;
constexpr std::uint64_t kEncoderInit = 5;
}  // namespace rng_stream

}  // namespace mccnet
