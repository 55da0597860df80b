#pragma once

#include <torch/torch.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mccnet/vgg_encoder.hpp"
#include "mccnet/weight_store.hpp"

namespace mccnet {

// Trainable mirror of the encoder: 3x3 reflection-padded convolutions with
// nearest-neighbor upsampling where the encoder pools. The final layer is
// linear and the output is unbounded — losses see raw values so saturated
// pixels keep their gradients; the stylize pipeline clamps to [0, 1].
class Decoder {
 public:
  Decoder() = default;  // empty; fill via init/from_store

  struct LayerSpec {
    const char* name;
    std::int64_t in, out;
    bool upsample_after;
  };
  static const std::vector<LayerSpec>& layers(Depth depth);

  static Decoder init(Depth depth, std::uint64_t seed);
  static Decoder from_store(const WeightStore& store, Depth depth);

  torch::Tensor decode(const torch::Tensor& feature) const;

  Depth depth() const { return depth_; }
  std::int64_t input_channels() const;

  // Named trainable tensors (tag -> tensor handle shared with the decoder).
  std::vector<std::pair<std::string, torch::Tensor>> named_parameters() const;
  void write_to(WeightStore& store) const;

 private:
  Depth depth_ = Depth::deep;
  std::vector<torch::Tensor> weights_, biases_;
};

}  // namespace mccnet
