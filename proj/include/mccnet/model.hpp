#pragma once

#include <torch/torch.h>

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "mccnet/config.hpp"
#include "mccnet/decoder.hpp"
#include "mccnet/mcc.hpp"
#include "mccnet/vgg_encoder.hpp"
#include "mccnet/weight_store.hpp"

namespace mccnet {

// The full generator: frozen encoder, MCC fusion, trainable decoder.
struct StyleTransferModel {
  VggEncoder encoder;
  MccParams mcc;
  Decoder decoder;
  Depth depth = Depth::deep;
  FusionMode mode = FusionMode::multi_channel;

  static StyleTransferModel create(const VggEncoder& encoder, Depth depth, FusionMode mode,
                                   std::uint64_t seed);

  // Raw generator pass; honors the ambient autograd mode. Input spatial dims
  // must be divisible by the codec stride (the stylize pipeline pads
  // arbitrary sizes).
  torch::Tensor generate(const torch::Tensor& content, const torch::Tensor& style) const;

  // Style side computed once for a whole clip.
  torch::Tensor style_gains_for(const torch::Tensor& style) const;
  torch::Tensor generate_with_gains(const torch::Tensor& content,
                                    const torch::Tensor& gains) const;

  std::vector<std::pair<std::string, torch::Tensor>> trainable_parameters() const;
};

// Adam over named tensors, with state that round-trips through the MCCW1
// container so interrupted runs resume bit-exactly.
class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  AdamOptimizer(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  void step(const std::vector<std::pair<std::string, torch::Tensor>>& params);
  void zero_grad(const std::vector<std::pair<std::string, torch::Tensor>>& params);

  double lr() const { return lr_; }
  std::int64_t steps_taken() const { return t_; }

  void write_to(WeightStore& store) const;
  static AdamOptimizer from_store(const WeightStore& store, double lr);

 private:
  double lr_ = 1e-4, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  std::int64_t t_ = 0;
  std::map<std::string, torch::Tensor> m_, v_;
};

// Everything a training run needs to stop and continue: step counter, model
// (the frozen encoder rides along so checkpoints are self-contained for
// inference), optimizer state, config snapshot, rng scheme.
struct Checkpoint {
  std::int64_t step = 0;
  TrainConfig config;
  StyleTransferModel model;
  AdamOptimizer optimizer;

  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);
};

}  // namespace mccnet
