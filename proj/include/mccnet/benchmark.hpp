#pragma once

#include <string>
#include <vector>

#include "mccnet/model.hpp"

namespace mccnet {

// Wall-clock timings for one square input size.
struct SizeTiming {
  int size = 0;
  std::vector<double> seconds;  // one entry per timed run
  double mean_s = 0.0;
  double median_s = 0.0;
};

struct BenchmarkReport {
  std::string hardware;
  int threads = 0;
  int warmup = 0;
  int runs = 0;
  std::vector<SizeTiming> timings;
};

// Times full stylization passes (content and style both size x size) on
// synthetic inputs. Each size gets `warmup` untimed passes, then `runs`
// timed ones. Deterministic inputs per seed.
BenchmarkReport run_benchmark(StyleTransferModel& model, const std::vector<int>& sizes,
                              int runs, int warmup = 1, std::uint64_t seed = 0);

// CPU model string from /proc/cpuinfo plus the torch thread count.
std::string hardware_summary();

// Timings reported for the original multi-channel correlation network on a
// 16G TitanX GPU. Shown next to local results as context only — different
// hardware class, not a comparison target.
struct ReferenceTiming {
  int size;
  double seconds;
};
const std::vector<ReferenceTiming>& published_reference_timings();
const char* published_reference_label();

}  // namespace mccnet
