#pragma once

#include <torch/torch.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mccnet/weight_store.hpp"

namespace mccnet {

// Fusion mode: multi_channel mixes every style channel's energy into every
// content channel's gain through a learned map; channel_wise uses each
// channel's own energy only (ablation).
enum class FusionMode { multi_channel, channel_wise };

const char* fusion_mode_name(FusionMode m);
FusionMode fusion_mode_from_name(const std::string& s);

// Learnable parameters of the fusion module: bias-free 1x1 projections on the
// content and style branches, a bias-free cross-channel mixer over the style
// energies, and a bias-free 1x1 output projection.
struct MccParams {
  torch::Tensor proj_c;    // (C,C,1,1)
  torch::Tensor proj_s;    // (C,C,1,1)
  torch::Tensor mixer;     // (C,C)
  torch::Tensor proj_out;  // (C,C,1,1)

  // Projections start at identity + small noise so the untrained module is
  // close to a pass-through; the mixer starts near zero (gains near 1).
  static MccParams init(std::int64_t channels, std::uint64_t seed);
  static MccParams from_store(const WeightStore& store);

  std::int64_t channels() const { return mixer.size(0); }
  std::vector<std::pair<std::string, torch::Tensor>> named_parameters() const;
  void write_to(WeightStore& store) const;
};

// Per-channel, per-sample zero mean / unit variance (epsilon-stabilized, no
// learned affine terms). Shape-preserving on (B,C,H,W).
torch::Tensor normalize(const torch::Tensor& f, double eps = 1e-5);

// Per-channel style statistic: e_k = sum of squares of channel k. (B,C).
torch::Tensor channel_energy(const torch::Tensor& f);

// Gains from (already spatially averaged) energies: 1 + mixer(e) in
// multi_channel mode, 1 + e in channel_wise mode. (B,C) in, (B,C) out.
torch::Tensor gains_from_energies(const torch::Tensor& energies, const MccParams& params,
                                  FusionMode mode);

// The two halves of the transform, exposed so a video run can compute the
// style side once and reuse it for every frame.
torch::Tensor content_branch(const torch::Tensor& f_c, const MccParams& params);
// Full style side: project the normalized style feature, take channel
// energies scaled by 1/N (style resolution independence), mix into gains.
torch::Tensor style_gains(const torch::Tensor& f_s, const MccParams& params,
                          FusionMode mode);
// Fusion stage: per-channel gain times content branch.
torch::Tensor fuse(const torch::Tensor& content, const torch::Tensor& gains);
torch::Tensor project_out(const torch::Tensor& fused, const MccParams& params);

struct MccTrace {
  torch::Tensor content;   // content branch, post projection
  torch::Tensor energies;  // (B,C), 1/N-scaled
  torch::Tensor gains;     // (B,C)
  torch::Tensor fused;     // fusion stage output
  torch::Tensor output;    // after proj_out
};

torch::Tensor mcc_forward(const torch::Tensor& f_c, const torch::Tensor& f_s,
                          const MccParams& params, FusionMode mode);
MccTrace mcc_forward_traced(const torch::Tensor& f_c, const torch::Tensor& f_s,
                            const MccParams& params, FusionMode mode);

// Reference route for a single channel pair: materializes the NxN correlation
// matrix co = f_c^T (x) f_s and returns f_s (x) co^T. Equals the sum of
// squared style values times f_c; kept as an independent check of that
// identity, not used by the forward path.
torch::Tensor correlation_route(const torch::Tensor& f_c_channel,
                                const torch::Tensor& f_s_channel);

// max_i |g_i| at the fusion stage for a given style feature; bounds how far a
// content-branch perturbation can move the fused output.
double lipschitz_bound(const MccParams& params, const torch::Tensor& f_s,
                       FusionMode mode);

}  // namespace mccnet
