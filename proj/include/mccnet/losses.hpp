#pragma once

#include <torch/torch.h>

#include <functional>

#include "mccnet/rng.hpp"
#include "mccnet/vgg_encoder.hpp"

namespace mccnet {

struct LossWeights {
  double content = 4.0;
  double style = 15.0;
  double identity = 70.0;
  double illumination = 3000.0;
};

struct LossBundle {
  double content = 0.0;
  double style = 0.0;
  double identity = 0.0;
  double illumination = 0.0;
  double total = 0.0;
};

// All norms are mean squared error so loss magnitudes are resolution
// independent.
torch::Tensor feature_mse(const torch::Tensor& a, const torch::Tensor& b);

// Per-channel mean/std distance of one tap pair; std uses eps inside the
// square root so constant channels keep finite gradients.
torch::Tensor tap_stat_distance(const torch::Tensor& a, const torch::Tensor& b,
                                double eps = 1e-5);

// Tap-level kernels (targets are detached by the caller when needed).
torch::Tensor content_loss_taps(const EncoderTaps& generated, const EncoderTaps& target);
torch::Tensor style_loss_taps(const EncoderTaps& generated, const EncoderTaps& style);

// Image-level wrappers around the frozen encoder.
torch::Tensor content_loss(const torch::Tensor& generated, const torch::Tensor& content,
                           const VggEncoder& encoder, Depth depth);
torch::Tensor style_loss(const torch::Tensor& generated, const torch::Tensor& style,
                         const VggEncoder& encoder, Depth depth);

// Anything that maps (content, style) -> image; lets the identity and
// illumination losses run against the real model or a test stand-in.
using Generator = std::function<torch::Tensor(const torch::Tensor&, const torch::Tensor&)>;

// ||G(c,c) - c||^2 + ||G(s,s) - s||^2 (pixel MSE each).
torch::Tensor identity_loss(const Generator& g, const torch::Tensor& content,
                            const torch::Tensor& style);

// ||G(c,s) - G(c+noise,s)||^2 with one Gaussian draw per call.
torch::Tensor illumination_loss(const Generator& g, const torch::Tensor& content,
                                const torch::Tensor& style, double noise_sigma, Rng& rng);

// Weighted sum for backprop.
torch::Tensor weighted_total(const torch::Tensor& content, const torch::Tensor& style,
                             const torch::Tensor& identity, const torch::Tensor& illumination,
                             const LossWeights& w);

// Scalar bundle; throws naming the term if any value is non-finite.
LossBundle total_loss(double content, double style, double identity, double illumination,
                      const LossWeights& w);

}  // namespace mccnet
