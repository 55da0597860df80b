#include "mccnet/rng.hpp"

namespace mccnet {

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t counter) {
  return splitmix64(seed ^ splitmix64(stream ^ splitmix64(counter)));
}

double Rng::normal(double mean, double stddev) {
  std::normal_distribution<double> d(mean, stddev);
  return d(gen_);
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  std::uniform_int_distribution<std::int64_t> d(lo, hi);
  return d(gen_);
}

torch::Tensor Rng::normal_tensor(torch::IntArrayRef shape, double stddev,
                                 torch::ScalarType dtype) {
  auto t = torch::empty(shape, torch::kFloat64);
  auto* p = t.data_ptr<double>();
  std::normal_distribution<double> d(0.0, stddev);
  for (std::int64_t i = 0; i < t.numel(); ++i) p[i] = d(gen_);
  return t.to(dtype);
}

torch::Tensor Rng::uniform_tensor(torch::IntArrayRef shape, double lo, double hi,
                                  torch::ScalarType dtype) {
  auto t = torch::empty(shape, torch::kFloat64);
  auto* p = t.data_ptr<double>();
  std::uniform_real_distribution<double> d(lo, hi);
  for (std::int64_t i = 0; i < t.numel(); ++i) p[i] = d(gen_);
  return t.to(dtype);
}

}  // namespace mccnet
