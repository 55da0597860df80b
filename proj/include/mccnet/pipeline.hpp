#pragma once

#include <torch/torch.h>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mccnet/model.hpp"

namespace mccnet {

// Inference entry points shared by the CLI and the tests. All of them run
// under no-grad and accept arbitrary image sizes: inputs are reflect-padded
// up to the encoder's stride so the codec round-trips, then cropped back.

// Loads the model from a checkpoint. `depth`/`mode`, when given, must agree
// with what the checkpoint was trained as; a mismatch is an error rather
// than a silent reinterpretation.
StyleTransferModel load_for_inference(const std::filesystem::path& checkpoint,
                                      std::optional<Depth> depth = std::nullopt,
                                      std::optional<FusionMode> mode = std::nullopt);

torch::Tensor stylize_tensor(StyleTransferModel& model, const torch::Tensor& content,
                             const torch::Tensor& style);

void stylize_image_file(StyleTransferModel& model, const std::filesystem::path& content_path,
                        const std::filesystem::path& style_path,
                        const std::filesystem::path& out_path);

// Stylizes every frame in `frames_dir` (lexicographic order) against one
// style image. Style gains are computed once and reused, so each output
// depends only on its own frame. Outputs keep their input filenames.
struct VideoStylizeResult {
  std::vector<std::filesystem::path> outputs;
  int frame_count = 0;
};

VideoStylizeResult stylize_video_dir(StyleTransferModel& model,
                                     const std::filesystem::path& frames_dir,
                                     const std::filesystem::path& style_path,
                                     const std::filesystem::path& out_dir);

}  // namespace mccnet
