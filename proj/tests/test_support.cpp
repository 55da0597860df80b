#include "test_support.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "mccnet/image_io.hpp"

namespace F = torch::nn::functional;

namespace mccnet::testing {

namespace {
// Stream ids local to the test corpus generators; disjoint from rng_stream.
constexpr std::uint64_t kImageStream = 1001;
constexpr std::uint64_t kCodecStream = 1002;
}  // namespace

torch::Tensor synthetic_image(std::uint64_t seed, std::int64_t h, std::int64_t w) {
  Rng rng(Rng::derive(seed, kImageStream, 0));

  auto ys = torch::linspace(0, 1, h).view({h, 1}).expand({h, w});
  auto xs = torch::linspace(0, 1, w).view({1, w}).expand({h, w});

  std::vector<torch::Tensor> chans;
  for (int c = 0; c < 3; ++c) {
    double a = rng.normal(0.0, 4.0), b = rng.normal(0.0, 4.0), phase = rng.normal(0.0, 2.0);
    chans.push_back(((a * xs + b * ys + phase).sin() * 0.5 + 0.5));
  }
  auto img = torch::stack(chans, 0);  // (3,h,w)

  for (int k = 0; k < 4; ++k) {
    auto cy = static_cast<double>(rng.uniform_int(0, h - 1));
    auto cx = static_cast<double>(rng.uniform_int(0, w - 1));
    auto r = static_cast<double>(std::min(h, w)) / static_cast<double>(rng.uniform_int(5, 9));
    auto yy = torch::arange(h, torch::kFloat32).view({h, 1}) - cy;
    auto xx = torch::arange(w, torch::kFloat32).view({1, w}) - cx;
    auto mask = ((yy * yy + xx * xx) < r * r).to(torch::kFloat32);
    for (int c = 0; c < 3; ++c) {
      double color = std::clamp(rng.normal(0.5, 0.3), 0.0, 1.0);
      img[c] = img[c] * (1 - mask) + mask * color;
    }
  }

  img = img + rng.normal_tensor({3, h, w}, 0.02);
  return img.clamp(0, 1).unsqueeze(0);
}

void write_corpus(const std::filesystem::path& dir, int count, std::uint64_t seed,
                  std::int64_t base_size) {
  std::filesystem::create_directories(dir);
  Rng rng(Rng::derive(seed, kImageStream, 1));
  for (int i = 0; i < count; ++i) {
    auto h = base_size + rng.uniform_int(-base_size / 4, base_size / 2);
    auto w = base_size + rng.uniform_int(-base_size / 4, base_size / 2);
    std::ostringstream name;
    name << "img_" << std::setw(4) << std::setfill('0') << i << ".png";
    save_image(synthetic_image(seed * 1000 + static_cast<std::uint64_t>(i), h, w),
               dir / name.str());
  }
}

std::vector<torch::Tensor> panning_clip(std::uint64_t seed, int frames, std::int64_t h,
                                        std::int64_t w, std::int64_t step_px) {
  auto wide = synthetic_image(seed, h, w + step_px * (frames - 1));
  std::vector<torch::Tensor> clip;
  clip.reserve(frames);
  for (int t = 0; t < frames; ++t) {
    auto x0 = step_px * t;
    clip.push_back(wide
                       .index({torch::indexing::Slice(), torch::indexing::Slice(),
                               torch::indexing::Slice(), torch::indexing::Slice(x0, x0 + w)})
                       .clone());
  }
  return clip;
}

std::vector<torch::Tensor> static_clip(std::uint64_t seed, int frames, std::int64_t h,
                                       std::int64_t w) {
  auto frame = synthetic_image(seed, h, w);
  return std::vector<torch::Tensor>(static_cast<std::size_t>(frames), frame);
}

std::vector<std::filesystem::path> write_clip(const std::filesystem::path& dir,
                                              const std::vector<torch::Tensor>& frames) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    std::ostringstream name;
    name << "f" << std::setw(3) << std::setfill('0') << t << ".png";
    auto p = dir / name.str();
    save_image(frames[t], p);
    paths.push_back(p);
  }
  return paths;
}

std::filesystem::path scratch_dir(const std::string& label) {
  auto base = std::filesystem::temp_directory_path() /
              ("mccnet_test_" + label + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(base);
  std::filesystem::create_directories(base);
  return base;
}

TinyCodec TinyCodec::create(std::uint64_t seed) {
  Rng rng(Rng::derive(seed, kCodecStream, 0));
  TinyCodec tc;
  auto conv = [&](std::int64_t out, std::int64_t in) {
    double bound = std::sqrt(1.0 / (static_cast<double>(in) * 9.0));
    return rng.uniform_tensor({out, in, 3, 3}, -bound, bound, torch::kFloat64);
  };
  tc.ew1 = conv(8, 3);
  tc.ew2 = conv(8, 8);
  tc.dw1 = conv(8, 8);
  tc.dw2 = conv(3, 8);

  tc.mcc = MccParams::init(8, seed);
  tc.mcc.proj_c = tc.mcc.proj_c.to(torch::kFloat64);
  tc.mcc.proj_s = tc.mcc.proj_s.to(torch::kFloat64);
  tc.mcc.mixer = tc.mcc.mixer.to(torch::kFloat64);
  tc.mcc.proj_out = tc.mcc.proj_out.to(torch::kFloat64);
  for (auto& [tag, t] : tc.trainable()) t.requires_grad_(true);
  return tc;
}

namespace {
torch::Tensor pad1(const torch::Tensor& x) {
  return F::pad(x, F::PadFuncOptions({1, 1, 1, 1}).mode(torch::kReflect));
}
}  // namespace

TinyCodec::Taps TinyCodec::encode(const torch::Tensor& img) const {
  Taps taps;
  taps.shallow = torch::tanh(torch::conv2d(pad1(img.to(torch::kFloat64)), ew1));
  auto pooled = torch::avg_pool2d(taps.shallow, 2);
  taps.deep = torch::tanh(torch::conv2d(pad1(pooled), ew2));
  return taps;
}

torch::Tensor TinyCodec::decode(const torch::Tensor& feature) const {
  auto y = torch::tanh(torch::conv2d(pad1(feature), dw1));
  y = F::interpolate(y, F::InterpolateFuncOptions()
                            .scale_factor(std::vector<double>{2.0, 2.0})
                            .mode(torch::kNearest));
  return torch::conv2d(pad1(y), dw2);
}

torch::Tensor TinyCodec::generate(const torch::Tensor& content, const torch::Tensor& style,
                                  FusionMode mode) const {
  auto f_c = encode(content).deep;
  auto f_s = encode(style).deep;
  return decode(mcc_forward(f_c, f_s, mcc, mode));
}

std::vector<std::pair<std::string, torch::Tensor>> TinyCodec::trainable() const {
  std::vector<std::pair<std::string, torch::Tensor>> params = {{"dw1", dw1}, {"dw2", dw2}};
  for (auto& [tag, t] : mcc.named_parameters()) params.emplace_back(tag, t);
  return params;
}

double max_grad_rel_err(const std::function<torch::Tensor()>& scalar_fn,
                        const std::vector<std::pair<std::string, torch::Tensor>>& params,
                        int coords_per_tensor, double h, double floor) {
  for (auto& [tag, t] : params) t.mutable_grad() = torch::Tensor();
  auto loss = scalar_fn();
  loss.backward();

  double worst = 0.0;
  Rng rng(1234);
  for (auto& [tag, t] : params) {
    auto grad = t.grad();
    if (!grad.defined()) {
      throw std::runtime_error("gradcheck: no gradient reached '" + tag + "'");
    }
    auto flat = t.view({-1});
    auto gflat = grad.reshape({-1});
    for (int k = 0; k < coords_per_tensor; ++k) {
      auto idx = rng.uniform_int(0, flat.numel() - 1);
      double orig = flat[idx].item<double>();

      torch::NoGradGuard no_grad;
      flat[idx] = orig + h;
      double up = scalar_fn().item<double>();
      flat[idx] = orig - h;
      double down = scalar_fn().item<double>();
      flat[idx] = orig;
      double fd = (up - down) / (2.0 * h);
      double an = gflat[idx].item<double>();
      double rel = std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), floor});
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

}  // namespace mccnet::testing
