#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "mccnet/losses.hpp"
#include "mccnet/mcc.hpp"
#include "mccnet/vgg_encoder.hpp"

namespace mccnet {

// Training configuration; serialized as flat key=value text (one pair per
// line, '#' comments) both in config files and in checkpoint snapshots.
struct TrainConfig {
  std::filesystem::path content_dir;
  std::filesystem::path style_dir;
  std::filesystem::path out_dir;
  std::filesystem::path encoder_path;

  std::int64_t crop = 256;
  std::int64_t batch = 8;
  std::int64_t steps = 160000;
  std::int64_t checkpoint_every = 10000;
  Depth depth = Depth::deep;
  FusionMode mode = FusionMode::multi_channel;
  double learning_rate = 1e-4;
  std::uint64_t seed = 0;

  LossWeights weights;
  double noise_sigma = 0.01;

  static TrainConfig parse(const std::string& text);
  static TrainConfig from_file(const std::filesystem::path& path);
  std::string serialize() const;

  // Throws on violated invariants (crop divisibility, batch >= 1, ...).
  void validate() const;
};

}  // namespace mccnet
