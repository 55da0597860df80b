#pragma once

#include <torch/torch.h>

#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "mccnet/config.hpp"
#include "mccnet/image_io.hpp"
#include "mccnet/model.hpp"
#include "mccnet/rng.hpp"

namespace mccnet {

// A directory of training images. Sampling is uniform with replacement;
// unreadable files are logged and skipped, an empty directory aborts here.
class ImageCorpus {
 public:
  explicit ImageCorpus(const std::filesystem::path& dir);

  std::size_t size() const { return files_.size(); }
  const std::vector<std::filesystem::path>& files() const { return files_; }

  // Resize (short side into [crop, 512]) then random crop.
  torch::Tensor sample_crop(std::int64_t crop, Rng& rng) const;

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> files_;
};

// Two (batch, 3, crop, crop) stacks: content first, then style.
std::pair<torch::Tensor, torch::Tensor> build_batch(const ImageCorpus& content,
                                                    const ImageCorpus& style,
                                                    std::int64_t batch, std::int64_t crop,
                                                    Rng& rng);

class Trainer {
 public:
  // Fresh run: loads the encoder from config, seeds decoder + MCC.
  explicit Trainer(TrainConfig cfg);
  // Continue from a checkpoint.
  explicit Trainer(Checkpoint ck);

  // One optimizer update on the given batch. Noise and batch randomness for
  // step k derive from (seed, k), so identical steps replay identically.
  LossBundle train_step(const torch::Tensor& content, const torch::Tensor& style);

  // Samples the batch for the current step, then train_step.
  LossBundle run_step();

  // Full loop: prefetches batches, appends per-step records to
  // out_dir/metrics.ndjson, checkpoints periodically and at the end.
  Checkpoint fit();

  Checkpoint make_checkpoint() const;
  std::int64_t step() const { return step_; }
  const StyleTransferModel& model() const { return model_; }
  const TrainConfig& config() const { return cfg_; }

 private:
  void ensure_corpora();

  TrainConfig cfg_;
  StyleTransferModel model_;
  AdamOptimizer opt_;
  std::int64_t step_ = 0;
  std::optional<ImageCorpus> content_corpus_, style_corpus_;
};

// Convenience entry point: resumes from `resume` when given, else from
// out_dir/ckpt_latest.mccw when present, else starts fresh.
Checkpoint fit(const TrainConfig& cfg,
               const std::optional<std::filesystem::path>& resume = std::nullopt);

}  // namespace mccnet
