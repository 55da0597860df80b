#pragma once

#include <torch/torch.h>

#include <optional>
#include <vector>

#include "mccnet/losses.hpp"

namespace mccnet {

// Adjacent-frame difference statistics of a clip. diff_series[t-1] is the
// mean absolute pixel difference between frames t and t-1 (values in [0,1]);
// var_diff is the population variance of the series.
struct CoherenceReport {
  std::vector<double> diff_series;
  double mean_diff = 0.0;
  double var_diff = 0.0;
};

CoherenceReport frame_diffs(const std::vector<torch::Tensor>& frames);

// Per-pair absolute difference images, averaged over color channels; each is
// (H,W) in [0,1].
std::vector<torch::Tensor> difference_heatmaps(const std::vector<torch::Tensor>& frames);

// Side-by-side stability of a stylized clip against its source. `ratio` is
// mean_diff(stylized) / mean_diff(input); absent when the input is static.
struct PairedCoherence {
  CoherenceReport input;
  CoherenceReport stylized;
  std::optional<double> ratio;
  bool static_input = false;
};

PairedCoherence compare_coherence(const std::vector<torch::Tensor>& input_frames,
                                  const std::vector<torch::Tensor>& stylized_frames);

// Illumination robustness probe: stylize a clean content image once, then
// `trials` noisy copies, and average the mean absolute output deviation.
// Deterministic given the seed.
double illumination_probe(const Generator& g, const torch::Tensor& content,
                          const torch::Tensor& style, double noise_sigma, int trials,
                          std::uint64_t seed);

}  // namespace mccnet
