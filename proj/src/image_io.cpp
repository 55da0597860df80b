#include "mccnet/image_io.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace mccnet {

namespace {

bool has_image_extension(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp" ||
         ext == ".ppm";
}

cv::Mat to_mat_u8(const torch::Tensor& img) {
  auto t = img;
  if (t.dim() == 4) {
    if (t.size(0) != 1)
      throw std::invalid_argument("save_image: expected a single image, got batch of " +
                                  std::to_string(t.size(0)));
    t = t.squeeze(0);
  }
  if (t.dim() != 3 || t.size(0) != 3)
    throw std::invalid_argument("save_image: expected (3,H,W) or (1,3,H,W) tensor");
  t = t.detach().to(torch::kFloat32).clamp(0.0, 1.0).mul(255.0).round().to(torch::kUInt8);
  t = t.permute({1, 2, 0}).contiguous();  // HWC, RGB
  cv::Mat rgb(static_cast<int>(t.size(0)), static_cast<int>(t.size(1)), CV_8UC3,
              t.data_ptr());
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  return bgr;
}

}  // namespace

void check_image_plane(const torch::Tensor& img, const char* what) {
  if (!img.defined() || img.dim() != 4 || img.size(1) != 3)
    throw std::invalid_argument(std::string(what) + ": expected (B,3,H,W) image tensor");
  if (!torch::isfinite(img).all().item<bool>())
    throw std::invalid_argument(std::string(what) + ": image contains non-finite values");
}

torch::Tensor load_image(const std::filesystem::path& path) {
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty())
    throw std::runtime_error("cannot read image: '" + path.string() + "'");
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  auto t = torch::from_blob(rgb.data, {rgb.rows, rgb.cols, 3}, torch::kUInt8).clone();
  return t.permute({2, 0, 1}).unsqueeze(0).to(torch::kFloat32).div(255.0);
}

void save_image(const torch::Tensor& img, const std::filesystem::path& path) {
  cv::Mat bgr = to_mat_u8(img);
  if (!cv::imwrite(path.string(), bgr))
    throw std::runtime_error("cannot write image: '" + path.string() + "'");
}

torch::Tensor resize_image(const torch::Tensor& img, std::int64_t h, std::int64_t w) {
  if (img.dim() != 4 || img.size(0) != 1 || img.size(1) != 3)
    throw std::invalid_argument("resize_image: expected (1,3,H,W) tensor");
  if (h < 1 || w < 1) throw std::invalid_argument("resize_image: target size must be positive");
  if (h == img.size(2) && w == img.size(3)) return img;

  auto hwc = img.squeeze(0).permute({1, 2, 0}).contiguous();
  cv::Mat src(static_cast<int>(hwc.size(0)), static_cast<int>(hwc.size(1)), CV_32FC3,
              hwc.data_ptr());
  cv::Mat dst;
  const bool shrink = w * h < img.size(2) * img.size(3);
  cv::resize(src, dst, cv::Size(static_cast<int>(w), static_cast<int>(h)), 0, 0,
             shrink ? cv::INTER_AREA : cv::INTER_LINEAR);
  auto out = torch::from_blob(dst.data, {h, w, 3}, torch::kFloat32).clone();
  return out.permute({2, 0, 1}).unsqueeze(0).clamp(0.0, 1.0);
}

std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw std::runtime_error("not a directory: '" + dir.string() + "'");
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && has_image_extension(e.path())) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
  return out;
}

FrameSequence load_frames(const std::filesystem::path& dir) {
  FrameSequence seq;
  seq.paths = list_images(dir);
  if (seq.paths.empty())
    throw std::runtime_error("no frames found in '" + dir.string() + "'");
  seq.frames.reserve(seq.paths.size());
  for (const auto& p : seq.paths) seq.frames.push_back(load_image(p));

  const auto h = seq.frames[0].size(2), w = seq.frames[0].size(3);
  std::ostringstream offenders;
  for (std::size_t i = 1; i < seq.frames.size(); ++i) {
    if (seq.frames[i].size(2) != h || seq.frames[i].size(3) != w)
      offenders << "\n  " << seq.paths[i].filename().string() << " is "
                << seq.frames[i].size(3) << "x" << seq.frames[i].size(2)
                << " (expected " << w << "x" << h << ")";
  }
  if (!offenders.str().empty())
    throw std::runtime_error("mixed frame resolutions in '" + dir.string() + "':" +
                             offenders.str());
  return seq;
}

}  // namespace mccnet
