#include "mccnet/decoder.hpp"

#include <cmath>
#include <stdexcept>

#include "mccnet/rng.hpp"

namespace mccnet {

namespace {

namespace F = torch::nn::functional;

torch::Tensor reflect_pad1(const torch::Tensor& x) {
  return F::pad(x, F::PadFuncOptions({1, 1, 1, 1}).mode(torch::kReflect));
}

std::string weight_tag(const char* name) { return std::string("dec.") + name + ".weight"; }
std::string bias_tag(const char* name) { return std::string("dec.") + name + ".bias"; }

}  // namespace

const std::vector<Decoder::LayerSpec>& Decoder::layers(Depth depth) {
  static const std::vector<LayerSpec> deep = {
      {"conv4_1", 512, 256, true},  {"conv3_4", 256, 256, false},
      {"conv3_3", 256, 256, false}, {"conv3_2", 256, 256, false},
      {"conv3_1", 256, 128, true},  {"conv2_2", 128, 128, false},
      {"conv2_1", 128, 64, true},   {"conv1_2", 64, 64, false},
      {"conv1_1", 64, 3, false},
  };
  static const std::vector<LayerSpec> shallow = {
      {"conv3_1", 256, 128, true}, {"conv2_2", 128, 128, false},
      {"conv2_1", 128, 64, true},  {"conv1_2", 64, 64, false},
      {"conv1_1", 64, 3, false},
  };
  return depth == Depth::deep ? deep : shallow;
}

Decoder Decoder::init(Depth depth, std::uint64_t seed) {
  Decoder dec;
  dec.depth_ = depth;
  Rng rng(Rng::derive(seed, rng_stream::kDecoderInit, 0));
  for (const auto& spec : layers(depth)) {
    // He-uniform weights, zero biases: activation variance survives the
    // ReLU stack, so the untrained decoder already produces input-dependent
    // output instead of a constant.
    const double bound = std::sqrt(6.0 / (static_cast<double>(spec.in) * 9.0));
    dec.weights_.push_back(rng.uniform_tensor({spec.out, spec.in, 3, 3}, -bound, bound));
    dec.biases_.push_back(torch::zeros({spec.out}));
  }
  return dec;
}

Decoder Decoder::from_store(const WeightStore& store, Depth depth) {
  Decoder dec;
  dec.depth_ = depth;
  for (const auto& spec : layers(depth)) {
    const auto wt = weight_tag(spec.name), bt = bias_tag(spec.name);
    if (!store.contains(wt) || !store.contains(bt))
      throw std::runtime_error(std::string("decoder load: missing layer ") + spec.name);
    auto w = store.get(wt), b = store.get(bt);
    if (w.sizes() != torch::IntArrayRef({spec.out, spec.in, 3, 3}) ||
        b.sizes() != torch::IntArrayRef({spec.out}))
      throw std::runtime_error(std::string("decoder load: layer ") + spec.name +
                               " has unexpected shape " + torch::str(w.sizes()));
    dec.weights_.push_back(std::move(w));
    dec.biases_.push_back(std::move(b));
  }
  return dec;
}

std::int64_t Decoder::input_channels() const { return layers(depth_)[0].in; }

torch::Tensor Decoder::decode(const torch::Tensor& feature) const {
  if (feature.dim() != 4)
    throw std::invalid_argument("decode: expected a (B,C,H,W) feature map");
  if (feature.size(1) != input_channels())
    throw std::invalid_argument(
        "decode: feature has " + std::to_string(feature.size(1)) + " channels but the " +
        depth_name(depth_) + " decoder expects " + std::to_string(input_channels()));

  auto x = feature;
  const auto& specs = layers(depth_);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    x = torch::conv2d(reflect_pad1(x), weights_[i], biases_[i]);
    if (i + 1 < specs.size()) x = torch::relu(x);
    if (specs[i].upsample_after)
      x = F::interpolate(x, F::InterpolateFuncOptions()
                                .scale_factor(std::vector<double>{2.0, 2.0})
                                .mode(torch::kNearest));
  }
  // raw (unbounded) output: clamping here would zero gradients for every
  // saturated pixel and stall training; the stylize pipeline clamps at the
  // pixel boundary instead
  return x;
}

std::vector<std::pair<std::string, torch::Tensor>> Decoder::named_parameters() const {
  std::vector<std::pair<std::string, torch::Tensor>> out;
  const auto& specs = layers(depth_);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    out.emplace_back(weight_tag(specs[i].name), weights_[i]);
    out.emplace_back(bias_tag(specs[i].name), biases_[i]);
  }
  return out;
}

void Decoder::write_to(WeightStore& store) const {
  for (const auto& [tag, t] : named_parameters()) store.put(tag, t.detach());
}

}  // namespace mccnet
