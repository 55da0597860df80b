#include "mccnet/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace mccnet {

torch::Tensor feature_mse(const torch::Tensor& a, const torch::Tensor& b) {
  if (a.sizes() != b.sizes())
    throw std::invalid_argument("feature_mse: shape mismatch " + torch::str(a.sizes()) +
                                " vs " + torch::str(b.sizes()));
  return (a - b).square().mean();
}

torch::Tensor tap_stat_distance(const torch::Tensor& a, const torch::Tensor& b,
                                double eps) {
  if (a.dim() != 4 || b.dim() != 4 || a.size(0) != b.size(0) || a.size(1) != b.size(1))
    throw std::invalid_argument("tap_stat_distance: taps must share batch and channels");
  auto mean_a = a.mean({2, 3});
  auto mean_b = b.mean({2, 3});
  auto std_a = torch::sqrt(a.var({2, 3}, /*unbiased=*/false) + eps);
  auto std_b = torch::sqrt(b.var({2, 3}, /*unbiased=*/false) + eps);
  return (mean_a - mean_b).square().mean() + (std_a - std_b).square().mean();
}

torch::Tensor content_loss_taps(const EncoderTaps& generated, const EncoderTaps& target) {
  return feature_mse(generated.deepest(), target.at(deepest_tap(generated.depth)));
}

torch::Tensor style_loss_taps(const EncoderTaps& generated, const EncoderTaps& style) {
  torch::Tensor total;
  for (const auto& [tap, g] : generated.taps) {
    auto d = tap_stat_distance(g, style.at(tap));
    total = total.defined() ? total + d : d;
  }
  return total;
}

torch::Tensor content_loss(const torch::Tensor& generated, const torch::Tensor& content,
                           const VggEncoder& encoder, Depth depth) {
  if (generated.sizes() != content.sizes())
    throw std::invalid_argument("content_loss: image shape mismatch");
  auto target = [&] {
    torch::NoGradGuard guard;
    return encoder.encode(content, depth);
  }();
  return content_loss_taps(encoder.encode(generated, depth), target);
}

torch::Tensor style_loss(const torch::Tensor& generated, const torch::Tensor& style,
                         const VggEncoder& encoder, Depth depth) {
  auto target = [&] {
    torch::NoGradGuard guard;
    return encoder.encode(style, depth);
  }();
  return style_loss_taps(encoder.encode(generated, depth), target);
}

torch::Tensor identity_loss(const Generator& g, const torch::Tensor& content,
                            const torch::Tensor& style) {
  auto i_cc = g(content, content);
  auto i_ss = g(style, style);
  return feature_mse(i_cc, content) + feature_mse(i_ss, style);
}

torch::Tensor illumination_loss(const Generator& g, const torch::Tensor& content,
                                const torch::Tensor& style, double noise_sigma, Rng& rng) {
  if (noise_sigma < 0)
    throw std::invalid_argument("illumination_loss: noise sigma must be >= 0");
  auto clean = g(content, style);
  if (noise_sigma == 0.0) return (clean - clean).square().mean();
  auto delta = rng.normal_tensor(content.sizes(), noise_sigma, content.scalar_type());
  auto perturbed = g(content + delta, style);
  return feature_mse(clean, perturbed);
}

torch::Tensor weighted_total(const torch::Tensor& content, const torch::Tensor& style,
                             const torch::Tensor& identity, const torch::Tensor& illumination,
                             const LossWeights& w) {
  torch::Tensor total;
  auto add = [&](double weight, const torch::Tensor& term) {
    if (weight == 0.0) return;  // zero-weight terms stay out of the graph
    auto wt = weight * term;
    total = total.defined() ? total + wt : wt;
  };
  add(w.content, content);
  add(w.style, style);
  add(w.identity, identity);
  add(w.illumination, illumination);
  if (!total.defined()) total = torch::zeros({}, content.options());
  return total;
}

LossBundle total_loss(double content, double style, double identity, double illumination,
                      const LossWeights& w) {
  const std::pair<const char*, double> terms[] = {{"content", content},
                                                  {"style", style},
                                                  {"identity", identity},
                                                  {"illumination", illumination}};
  for (const auto& [name, v] : terms) {
    if (!std::isfinite(v))
      throw std::runtime_error(std::string("total_loss: non-finite ") + name + " term (" +
                               std::to_string(v) + ")");
  }
  LossBundle b;
  b.content = content;
  b.style = style;
  b.identity = identity;
  b.illumination = illumination;
  b.total = w.content * content + w.style * style + w.identity * identity +
            w.illumination * illumination;
  return b;
}

}  // namespace mccnet
