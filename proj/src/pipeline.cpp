#include "mccnet/pipeline.hpp"

#include <torch/torch.h>

#include <stdexcept>
#include <string>

#include "mccnet/image_io.hpp"

namespace F = torch::nn::functional;

namespace mccnet {

namespace {

// Reflect-pads (right/bottom) so both spatial dims are stride multiples.
// Returns the padded tensor plus the original size for cropping back.
struct Padded {
  torch::Tensor image;
  std::int64_t height = 0;
  std::int64_t width = 0;
};

Padded pad_to_stride(const torch::Tensor& image, std::int64_t stride) {
  Padded p;
  p.height = image.size(2);
  p.width = image.size(3);
  if (p.height < 16 || p.width < 16) {
    throw std::invalid_argument(
        "stylize: image is " + std::to_string(p.height) + "x" + std::to_string(p.width) +
        "; the minimum side is 16 so the image survives the encoder's downsampling chain");
  }
  auto pad_h = (stride - p.height % stride) % stride;
  auto pad_w = (stride - p.width % stride) % stride;
  if (pad_h == 0 && pad_w == 0) {
    p.image = image;
  } else {
    p.image = F::pad(image, F::PadFuncOptions({0, pad_w, 0, pad_h}).mode(torch::kReflect));
  }
  return p;
}

torch::Tensor crop_back(const torch::Tensor& out, const Padded& p) {
  return out.index({torch::indexing::Slice(), torch::indexing::Slice(),
                    torch::indexing::Slice(0, p.height), torch::indexing::Slice(0, p.width)});
}

}  // namespace

StyleTransferModel load_for_inference(const std::filesystem::path& checkpoint,
                                      std::optional<Depth> depth,
                                      std::optional<FusionMode> mode) {
  auto ckpt = Checkpoint::load(checkpoint);
  if (depth && *depth != ckpt.model.depth) {
    throw std::runtime_error("checkpoint '" + checkpoint.string() + "' was trained with depth " +
                             depth_name(ckpt.model.depth) + "; requested " + depth_name(*depth));
  }
  if (mode && *mode != ckpt.model.mode) {
    throw std::runtime_error("checkpoint '" + checkpoint.string() + "' was trained with mode " +
                             fusion_mode_name(ckpt.model.mode) + "; requested " +
                             fusion_mode_name(*mode));
  }
  return std::move(ckpt.model);
}

torch::Tensor stylize_tensor(StyleTransferModel& model, const torch::Tensor& content,
                             const torch::Tensor& style) {
  check_image_plane(content, "stylize content");
  check_image_plane(style, "stylize style");
  torch::NoGradGuard no_grad;
  auto stride = static_cast<std::int64_t>(depth_downscale(model.depth));
  auto pc = pad_to_stride(content, stride);
  auto ps = pad_to_stride(style, stride);
  auto out = model.generate(pc.image, ps.image);
  return crop_back(out, pc).clamp(0.0, 1.0);
}

void stylize_image_file(StyleTransferModel& model, const std::filesystem::path& content_path,
                        const std::filesystem::path& style_path,
                        const std::filesystem::path& out_path) {
  auto content = load_image(content_path);
  auto style = load_image(style_path);
  save_image(stylize_tensor(model, content, style), out_path);
}

VideoStylizeResult stylize_video_dir(StyleTransferModel& model,
                                     const std::filesystem::path& frames_dir,
                                     const std::filesystem::path& style_path,
                                     const std::filesystem::path& out_dir) {
  auto seq = load_frames(frames_dir);
  auto style = load_image(style_path);
  std::filesystem::create_directories(out_dir);

  torch::NoGradGuard no_grad;
  auto stride = static_cast<std::int64_t>(depth_downscale(model.depth));
  auto ps = pad_to_stride(style, stride);
  auto gains = model.style_gains_for(ps.image);

  VideoStylizeResult result;
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    auto pc = pad_to_stride(seq.frames[i], stride);
    auto out = crop_back(model.generate_with_gains(pc.image, gains), pc).clamp(0.0, 1.0);
    auto out_path = out_dir / seq.paths[i].filename();
    save_image(out, out_path);
    result.outputs.push_back(out_path);
  }
  result.frame_count = static_cast<int>(seq.frames.size());
  return result;
}

}  // namespace mccnet
