#include "mccnet/benchmark.hpp"

#include <torch/torch.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "mccnet/pipeline.hpp"
#include "mccnet/rng.hpp"

namespace mccnet {

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  auto n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

BenchmarkReport run_benchmark(StyleTransferModel& model, const std::vector<int>& sizes,
                              int runs, int warmup, std::uint64_t seed) {
  if (runs < 1) {
    throw std::invalid_argument("benchmark: runs must be >= 1, got " + std::to_string(runs));
  }
  if (warmup < 0) {
    throw std::invalid_argument("benchmark: warmup must be >= 0");
  }
  if (sizes.empty()) {
    throw std::invalid_argument("benchmark: no sizes given");
  }
  for (int s : sizes) {
    if (s < 16) {
      throw std::invalid_argument("benchmark: size " + std::to_string(s) +
                                  " is below the minimum input side of 16");
    }
  }

  BenchmarkReport report;
  report.hardware = hardware_summary();
  report.threads = static_cast<int>(torch::get_num_threads());
  report.warmup = warmup;
  report.runs = runs;

  torch::NoGradGuard no_grad;
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    int size = sizes[si];
    Rng rng(Rng::derive(seed, rng_stream::kBatch, static_cast<std::uint64_t>(si)));
    auto content = rng.uniform_tensor({1, 3, size, size}, 0.0, 1.0, torch::kFloat32);
    auto style = rng.uniform_tensor({1, 3, size, size}, 0.0, 1.0, torch::kFloat32);

    SizeTiming timing;
    timing.size = size;
    for (int w = 0; w < warmup; ++w) {
      (void)stylize_tensor(model, content, style);
    }
    for (int r = 0; r < runs; ++r) {
      auto t0 = std::chrono::steady_clock::now();
      (void)stylize_tensor(model, content, style);
      auto t1 = std::chrono::steady_clock::now();
      timing.seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    timing.mean_s = std::accumulate(timing.seconds.begin(), timing.seconds.end(), 0.0) /
                    static_cast<double>(timing.seconds.size());
    timing.median_s = median_of(timing.seconds);
    report.timings.push_back(std::move(timing));
  }
  return report;
}

std::string hardware_summary() {
  std::ifstream cpuinfo("/proc/cpuinfo");
  std::string line;
  while (std::getline(cpuinfo, line)) {
    auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    if (line.rfind("model name", 0) == 0) {
      auto value = line.substr(colon + 1);
      auto start = value.find_first_not_of(" \t");
      return start == std::string::npos ? "unknown CPU" : value.substr(start);
    }
  }
  return "unknown CPU";
}

const std::vector<ReferenceTiming>& published_reference_timings() {
  static const std::vector<ReferenceTiming> rows = {
      {256, 0.013}, {512, 0.015}, {1024, 0.019}};
  return rows;
}

const char* published_reference_label() {
  return "published multi-channel correlation network reference (16G TitanX GPU)";
}

}  // namespace mccnet
