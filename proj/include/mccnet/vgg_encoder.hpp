#pragma once

#include <torch/torch.h>

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mccnet/weight_store.hpp"

namespace mccnet {

// Codec depth: deep taps through relu4_1 (default), shallow stops at relu3_1.
enum class Depth { deep, shallow };

const char* depth_name(Depth d);
Depth depth_from_name(const std::string& s);
std::int64_t depth_downscale(Depth d);  // 8 deep, 4 shallow

enum class Tap { relu1_1 = 0, relu2_1 = 1, relu3_1 = 2, relu4_1 = 3 };

const char* tap_name(Tap t);
std::int64_t tap_channels(Tap t);  // 64, 128, 256, 512
std::int64_t tap_stride(Tap t);    // 1, 2, 4, 8
Tap deepest_tap(Depth d);

// Ordered encoder activations up to the configured depth.
struct EncoderTaps {
  Depth depth = Depth::deep;
  std::map<Tap, torch::Tensor> taps;

  const torch::Tensor& at(Tap t) const;
  const torch::Tensor& deepest() const { return at(deepest_tap(depth)); }
};

// Frozen VGG19 feature extractor through conv4_1. Weights come from an MCCW1
// container and are never trained; forward passes are pure functions of
// (input, weights) and honor the ambient autograd mode.
class VggEncoder {
 public:
  VggEncoder() = default;  // empty; fill via load/from_store/random

  struct LayerSpec {
    const char* name;
    std::int64_t in, out;
    bool pool_before;
    int tap;  // -1 or Tap index
  };
  static const std::array<LayerSpec, 9>& layers();

  static VggEncoder load(const std::filesystem::path& weights_path);
  static VggEncoder from_store(const WeightStore& store, const std::string& source);
  // Fan-in random weights, for tests and pipeline bring-up.
  static VggEncoder random(std::uint64_t seed);

  EncoderTaps encode(const torch::Tensor& img, Depth depth) const;

  void write_to(WeightStore& store) const;
  std::uint64_t weights_checksum() const;

  static constexpr std::int64_t kMinInputSize = 16;

 private:
  std::vector<torch::Tensor> weights_, biases_;  // conv1_1 .. conv4_1
  torch::Tensor mean_, std_;                     // preprocessing constants (1,3,1,1)
};

}  // namespace mccnet
