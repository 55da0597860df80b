#pragma once

#include <torch/torch.h>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "mccnet/mcc.hpp"
#include "mccnet/rng.hpp"

namespace mccnet::testing {

// Deterministic structured test image (1,3,h,w) in [0,1]: oriented stripes,
// a few colored disks, light noise — enough texture that encoder taps vary
// between images.
torch::Tensor synthetic_image(std::uint64_t seed, std::int64_t h, std::int64_t w);

// Writes `count` synthetic images (sizes jittered around `base_size`) as PNGs.
void write_corpus(const std::filesystem::path& dir, int count, std::uint64_t seed,
                  std::int64_t base_size);

// A horizontally panning clip: a wide synthetic scene viewed through a
// sliding window, `step_px` per frame. Frames are (1,3,h,w).
std::vector<torch::Tensor> panning_clip(std::uint64_t seed, int frames, std::int64_t h,
                                        std::int64_t w, std::int64_t step_px);

std::vector<torch::Tensor> static_clip(std::uint64_t seed, int frames, std::int64_t h,
                                       std::int64_t w);

// Writes frames as f000.png, f001.png, ... and returns the paths.
std::vector<std::filesystem::path> write_clip(const std::filesystem::path& dir,
                                              const std::vector<torch::Tensor>& frames);

// Fresh scratch directory under the system temp dir; removed by the caller.
std::filesystem::path scratch_dir(const std::string& label);

// A miniature double-precision stand-in for the VGG codec: two tanh conv
// layers down (8 channels, taps at both), mirror up. Smooth everywhere, so
// finite differences are trustworthy; small enough that they are cheap.
struct TinyCodec {
  // encoder
  torch::Tensor ew1, ew2;  // (8,3,3,3), (8,8,3,3)
  // decoder
  torch::Tensor dw1, dw2;  // (8,8,3,3), (3,8,3,3)
  MccParams mcc;           // 8 channels, double

  static TinyCodec create(std::uint64_t seed);

  struct Taps {
    torch::Tensor shallow;  // (B,8,H,W)
    torch::Tensor deep;     // (B,8,H/2,W/2)
  };
  Taps encode(const torch::Tensor& img) const;
  torch::Tensor decode(const torch::Tensor& feature) const;
  torch::Tensor generate(const torch::Tensor& content, const torch::Tensor& style,
                         FusionMode mode = FusionMode::multi_channel) const;

  // Trainable tensors (decoder + mcc), mirroring what the real trainer updates.
  std::vector<std::pair<std::string, torch::Tensor>> trainable() const;
};

// Central finite differences vs autograd for scalar_fn over the given
// parameters. Samples `coords_per_tensor` coordinates per tensor and returns
// the worst |analytic - fd| / max(|analytic|, |fd|, floor).
double max_grad_rel_err(const std::function<torch::Tensor()>& scalar_fn,
                        const std::vector<std::pair<std::string, torch::Tensor>>& params,
                        int coords_per_tensor, double h = 1e-5, double floor = 1e-6);

}  // namespace mccnet::testing
