#pragma once

#include <torch/torch.h>

#include <filesystem>
#include <vector>

namespace mccnet {

// Images travel through the pipeline as float tensors of shape (B, 3, H, W),
// RGB, values in [0, 1].

// Throws when the tensor is not a valid image plane (used at API boundaries).
void check_image_plane(const torch::Tensor& img, const char* what);

torch::Tensor load_image(const std::filesystem::path& path);     // (1,3,H,W)
void save_image(const torch::Tensor& img, const std::filesystem::path& path);

// Bilinear/area resample to (h, w).
torch::Tensor resize_image(const torch::Tensor& img, std::int64_t h, std::int64_t w);

// Image files directly under `dir` (png/jpg/jpeg/bmp/ppm), sorted by name.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

// An ordered, uniformly sized stack of frames loaded from a directory.
struct FrameSequence {
  std::vector<std::filesystem::path> paths;
  std::vector<torch::Tensor> frames;  // each (1,3,H,W)

  std::size_t size() const { return frames.size(); }
  std::int64_t height() const { return frames.empty() ? 0 : frames[0].size(2); }
  std::int64_t width() const { return frames.empty() ? 0 : frames[0].size(3); }
};

// Loads every image in `dir`; aborts listing the offending files when
// resolutions are mixed or the directory holds no images.
FrameSequence load_frames(const std::filesystem::path& dir);

}  // namespace mccnet
