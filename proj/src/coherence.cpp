#include "mccnet/coherence.hpp"

#include <cmath>
#include <stdexcept>

#include "mccnet/image_io.hpp"
#include "mccnet/rng.hpp"

namespace mccnet {

namespace {

void check_clip(const std::vector<torch::Tensor>& frames, const char* what) {
  if (frames.size() < 2) {
    throw std::invalid_argument(std::string(what) + ": need at least 2 frames, got " +
                                std::to_string(frames.size()));
  }
  for (std::size_t t = 0; t < frames.size(); ++t) {
    check_image_plane(frames[t], what);
    if (!frames[t].sizes().equals(frames[0].sizes())) {
      throw std::invalid_argument(std::string(what) + ": frame " + std::to_string(t) +
                                  " shape differs from frame 0");
    }
  }
}

}  // namespace

CoherenceReport frame_diffs(const std::vector<torch::Tensor>& frames) {
  check_clip(frames, "frame_diffs");
  CoherenceReport report;
  report.diff_series.reserve(frames.size() - 1);
  for (std::size_t t = 1; t < frames.size(); ++t) {
    auto d = (frames[t] - frames[t - 1]).abs().mean().item<double>();
    report.diff_series.push_back(d);
  }
  double sum = 0.0;
  for (double d : report.diff_series) sum += d;
  report.mean_diff = sum / static_cast<double>(report.diff_series.size());
  double sq = 0.0;
  for (double d : report.diff_series) {
    double c = d - report.mean_diff;
    sq += c * c;
  }
  report.var_diff = sq / static_cast<double>(report.diff_series.size());
  return report;
}

std::vector<torch::Tensor> difference_heatmaps(const std::vector<torch::Tensor>& frames) {
  check_clip(frames, "difference_heatmaps");
  std::vector<torch::Tensor> maps;
  maps.reserve(frames.size() - 1);
  for (std::size_t t = 1; t < frames.size(); ++t) {
    maps.push_back((frames[t] - frames[t - 1]).abs().mean(/*dim=*/1).squeeze(0));
  }
  return maps;
}

PairedCoherence compare_coherence(const std::vector<torch::Tensor>& input_frames,
                                  const std::vector<torch::Tensor>& stylized_frames) {
  if (input_frames.size() != stylized_frames.size()) {
    throw std::invalid_argument("compare_coherence: clip lengths differ (" +
                                std::to_string(input_frames.size()) + " vs " +
                                std::to_string(stylized_frames.size()) + ")");
  }
  PairedCoherence out;
  out.input = frame_diffs(input_frames);
  out.stylized = frame_diffs(stylized_frames);
  if (out.input.mean_diff == 0.0) {
    out.static_input = true;  // ratio undefined; callers report the raw diffs
  } else {
    out.ratio = out.stylized.mean_diff / out.input.mean_diff;
  }
  return out;
}

double illumination_probe(const Generator& g, const torch::Tensor& content,
                          const torch::Tensor& style, double noise_sigma, int trials,
                          std::uint64_t seed) {
  check_image_plane(content, "illumination_probe content");
  check_image_plane(style, "illumination_probe style");
  if (trials < 1) {
    throw std::invalid_argument("illumination_probe: trials must be >= 1, got " +
                                std::to_string(trials));
  }
  if (noise_sigma < 0.0) {
    throw std::invalid_argument("illumination_probe: noise sigma must be >= 0");
  }
  torch::NoGradGuard no_grad;
  auto clean = g(content, style);
  double total = 0.0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(Rng::derive(seed, rng_stream::kNoise, static_cast<std::uint64_t>(t)));
    auto noise = rng.normal_tensor(content.sizes(), noise_sigma, torch::kFloat32);
    auto shifted = g(content + noise, style);
    total += (shifted - clean).abs().mean().item<double>();
  }
  return total / static_cast<double>(trials);
}

}  // namespace mccnet
