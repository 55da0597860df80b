#include "mccnet/vgg_encoder.hpp"

#include <cmath>
#include <stdexcept>

#include "mccnet/rng.hpp"

namespace mccnet {

namespace {

namespace F = torch::nn::functional;

torch::Tensor reflect_pad1(const torch::Tensor& x) {
  return F::pad(x, F::PadFuncOptions({1, 1, 1, 1}).mode(torch::kReflect));
}

std::string weight_tag(const char* name) { return std::string("vgg.") + name + ".weight"; }
std::string bias_tag(const char* name) { return std::string("vgg.") + name + ".bias"; }

}  // namespace

const char* depth_name(Depth d) { return d == Depth::deep ? "deep" : "shallow"; }

Depth depth_from_name(const std::string& s) {
  if (s == "deep") return Depth::deep;
  if (s == "shallow") return Depth::shallow;
  throw std::invalid_argument("unknown depth '" + s + "' (expected deep|shallow)");
}

std::int64_t depth_downscale(Depth d) { return d == Depth::deep ? 8 : 4; }

const char* tap_name(Tap t) {
  switch (t) {
    case Tap::relu1_1: return "relu1_1";
    case Tap::relu2_1: return "relu2_1";
    case Tap::relu3_1: return "relu3_1";
    case Tap::relu4_1: return "relu4_1";
  }
  return "?";
}

std::int64_t tap_channels(Tap t) {
  switch (t) {
    case Tap::relu1_1: return 64;
    case Tap::relu2_1: return 128;
    case Tap::relu3_1: return 256;
    case Tap::relu4_1: return 512;
  }
  return 0;
}

std::int64_t tap_stride(Tap t) { return std::int64_t{1} << static_cast<int>(t); }

Tap deepest_tap(Depth d) { return d == Depth::deep ? Tap::relu4_1 : Tap::relu3_1; }

const torch::Tensor& EncoderTaps::at(Tap t) const {
  auto it = taps.find(t);
  if (it == taps.end())
    throw std::runtime_error(std::string("encoder taps: no entry for ") + tap_name(t));
  return it->second;
}

const std::array<VggEncoder::LayerSpec, 9>& VggEncoder::layers() {
  static const std::array<LayerSpec, 9> specs = {{
      {"conv1_1", 3, 64, false, static_cast<int>(Tap::relu1_1)},
      {"conv1_2", 64, 64, false, -1},
      {"conv2_1", 64, 128, true, static_cast<int>(Tap::relu2_1)},
      {"conv2_2", 128, 128, false, -1},
      {"conv3_1", 128, 256, true, static_cast<int>(Tap::relu3_1)},
      {"conv3_2", 256, 256, false, -1},
      {"conv3_3", 256, 256, false, -1},
      {"conv3_4", 256, 256, false, -1},
      {"conv4_1", 256, 512, true, static_cast<int>(Tap::relu4_1)},
  }};
  return specs;
}

VggEncoder VggEncoder::load(const std::filesystem::path& weights_path) {
  return from_store(WeightStore::load(weights_path), weights_path.string());
}

VggEncoder VggEncoder::from_store(const WeightStore& store, const std::string& source) {
  VggEncoder enc;
  for (const auto& spec : layers()) {
    const auto wt = weight_tag(spec.name), bt = bias_tag(spec.name);
    if (!store.contains(wt) || !store.contains(bt))
      throw std::runtime_error("encoder load: '" + source + "' is missing layer " +
                               spec.name);
    auto w = store.get(wt), b = store.get(bt);
    if (w.sizes() != torch::IntArrayRef({spec.out, spec.in, 3, 3}))
      throw std::runtime_error("encoder load: layer " + std::string(spec.name) +
                               " has shape " + torch::str(w.sizes()) + ", expected (" +
                               std::to_string(spec.out) + "," + std::to_string(spec.in) +
                               ",3,3) in '" + source + "'");
    if (b.sizes() != torch::IntArrayRef({spec.out}))
      throw std::runtime_error("encoder load: layer " + std::string(spec.name) +
                               " has bias shape " + torch::str(b.sizes()) + ", expected (" +
                               std::to_string(spec.out) + ") in '" + source + "'");
    enc.weights_.push_back(w.set_requires_grad(false));
    enc.biases_.push_back(b.set_requires_grad(false));
  }
  if (const auto* m = store.find("vgg.mean")) {
    enc.mean_ = m->view({1, 3, 1, 1}).set_requires_grad(false);
  } else {
    enc.mean_ = torch::tensor({0.485f, 0.456f, 0.406f}).view({1, 3, 1, 1});
  }
  if (const auto* s = store.find("vgg.std")) {
    enc.std_ = s->view({1, 3, 1, 1}).set_requires_grad(false);
  } else {
    enc.std_ = torch::ones({1, 3, 1, 1});
  }
  return enc;
}

VggEncoder VggEncoder::random(std::uint64_t seed) {
  WeightStore store;
  Rng rng(Rng::derive(seed, rng_stream::kEncoderInit, 0));
  for (const auto& spec : layers()) {
    // He-uniform: keeps activation variance roughly constant through the
    // ReLU chain, so even deep taps stay input-dependent. Zero biases keep
    // the features signal-driven rather than offset-driven.
    const double bound = std::sqrt(6.0 / (static_cast<double>(spec.in) * 9.0));
    store.put(weight_tag(spec.name),
              rng.uniform_tensor({spec.out, spec.in, 3, 3}, -bound, bound));
    store.put(bias_tag(spec.name), torch::zeros({spec.out}));
  }
  return from_store(store, "<random seed " + std::to_string(seed) + ">");
}

EncoderTaps VggEncoder::encode(const torch::Tensor& img, Depth depth) const {
  if (img.dim() != 4 || img.size(1) != 3)
    throw std::invalid_argument("encode: expected (B,3,H,W) image tensor");
  if (img.size(2) < kMinInputSize || img.size(3) < kMinInputSize)
    throw std::invalid_argument(
        "encode: input " + std::to_string(img.size(3)) + "x" + std::to_string(img.size(2)) +
        " is below the minimum size " + std::to_string(kMinInputSize) + "x" +
        std::to_string(kMinInputSize) + " needed to survive the downsampling chain");

  EncoderTaps out;
  out.depth = depth;
  const auto last = deepest_tap(depth);

  auto x = (img.to(weights_[0].dtype()) - mean_) / std_;
  for (std::size_t i = 0; i < layers().size(); ++i) {
    const auto& spec = layers()[i];
    if (spec.pool_before) x = torch::max_pool2d(x, 2);
    x = torch::relu(torch::conv2d(reflect_pad1(x), weights_[i], biases_[i]));
    if (spec.tap >= 0) {
      const auto tap = static_cast<Tap>(spec.tap);
      out.taps[tap] = x;
      if (tap == last) break;
    }
  }
  return out;
}

void VggEncoder::write_to(WeightStore& store) const {
  for (std::size_t i = 0; i < layers().size(); ++i) {
    store.put(weight_tag(layers()[i].name), weights_[i]);
    store.put(bias_tag(layers()[i].name), biases_[i]);
  }
  store.put("vgg.mean", mean_.view({3}));
  store.put("vgg.std", std_.view({3}));
}

std::uint64_t VggEncoder::weights_checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    h = tensor_checksum(h, weights_[i]);
    h = tensor_checksum(h, biases_[i]);
  }
  h = tensor_checksum(h, mean_);
  h = tensor_checksum(h, std_);
  return h;
}

}  // namespace mccnet
