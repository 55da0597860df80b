#include "mccnet/mcc.hpp"

#include <stdexcept>

#include "mccnet/rng.hpp"

namespace mccnet {

namespace {

void check_feature(const torch::Tensor& f, const char* what) {
  if (!f.defined() || f.dim() != 4)
    throw std::invalid_argument(std::string(what) + ": expected a (B,C,H,W) feature map");
}

void check_channels(const torch::Tensor& f, const MccParams& params, const char* what) {
  if (f.size(1) != params.channels())
    throw std::invalid_argument(std::string(what) + ": feature has " +
                                std::to_string(f.size(1)) + " channels, params expect " +
                                std::to_string(params.channels()));
}

torch::Tensor conv1x1(const torch::Tensor& x, const torch::Tensor& w) {
  return torch::conv2d(x, w.to(x.dtype()));
}

}  // namespace

const char* fusion_mode_name(FusionMode m) {
  return m == FusionMode::multi_channel ? "multi_channel" : "channel_wise";
}

FusionMode fusion_mode_from_name(const std::string& s) {
  if (s == "multi_channel") return FusionMode::multi_channel;
  if (s == "channel_wise") return FusionMode::channel_wise;
  throw std::invalid_argument("unknown fusion mode '" + s +
                              "' (expected multi_channel|channel_wise)");
}

MccParams MccParams::init(std::int64_t channels, std::uint64_t seed) {
  Rng rng(Rng::derive(seed, rng_stream::kMccInit, 0));
  auto near_identity = [&]() {
    return (torch::eye(channels, torch::kFloat32) +
            rng.normal_tensor({channels, channels}, 0.01));
  };
  MccParams p;
  p.proj_c = near_identity().view({channels, channels, 1, 1});
  p.proj_s = near_identity().view({channels, channels, 1, 1});
  p.mixer = rng.normal_tensor({channels, channels}, 0.01);
  p.proj_out = near_identity().view({channels, channels, 1, 1});
  return p;
}

MccParams MccParams::from_store(const WeightStore& store) {
  MccParams p;
  p.proj_c = store.get("mcc.proj_c");
  p.proj_s = store.get("mcc.proj_s");
  p.mixer = store.get("mcc.mixer");
  p.proj_out = store.get("mcc.proj_out");
  const auto c = p.mixer.size(0);
  if (p.mixer.dim() != 2 || p.mixer.size(1) != c)
    throw std::runtime_error("mcc load: mixer must be square, got " +
                             torch::str(p.mixer.sizes()));
  for (const auto* t : {&p.proj_c, &p.proj_s, &p.proj_out}) {
    if (t->sizes() != torch::IntArrayRef({c, c, 1, 1}))
      throw std::runtime_error("mcc load: projection shape " + torch::str(t->sizes()) +
                               " does not match mixer channels " + std::to_string(c));
  }
  return p;
}

std::vector<std::pair<std::string, torch::Tensor>> MccParams::named_parameters() const {
  return {{"mcc.proj_c", proj_c},
          {"mcc.proj_s", proj_s},
          {"mcc.mixer", mixer},
          {"mcc.proj_out", proj_out}};
}

void MccParams::write_to(WeightStore& store) const {
  for (const auto& [tag, t] : named_parameters()) store.put(tag, t.detach());
}

torch::Tensor normalize(const torch::Tensor& f, double eps) {
  check_feature(f, "normalize");
  auto mean = f.mean({2, 3}, /*keepdim=*/true);
  auto var = f.var({2, 3}, /*unbiased=*/false, /*keepdim=*/true);
  return (f - mean) / torch::sqrt(var + eps);
}

torch::Tensor channel_energy(const torch::Tensor& f) {
  check_feature(f, "channel_energy");
  return f.square().sum({2, 3});
}

torch::Tensor gains_from_energies(const torch::Tensor& energies, const MccParams& params,
                                  FusionMode mode) {
  if (energies.dim() != 2)
    throw std::invalid_argument("gains_from_energies: expected (B,C) energies");
  if (mode == FusionMode::multi_channel)
    return 1.0 + torch::matmul(energies, params.mixer.to(energies.dtype()).t());
  return 1.0 + energies;
}

torch::Tensor content_branch(const torch::Tensor& f_c, const MccParams& params) {
  check_feature(f_c, "content_branch");
  check_channels(f_c, params, "content_branch");
  return conv1x1(normalize(f_c), params.proj_c);
}

torch::Tensor style_gains(const torch::Tensor& f_s, const MccParams& params,
                          FusionMode mode) {
  check_feature(f_s, "style_gains");
  check_channels(f_s, params, "style_gains");
  auto branch = conv1x1(normalize(f_s), params.proj_s);
  const auto n = static_cast<double>(branch.size(2) * branch.size(3));
  auto energies = channel_energy(branch) / n;
  return gains_from_energies(energies, params, mode);
}

torch::Tensor fuse(const torch::Tensor& content, const torch::Tensor& gains) {
  check_feature(content, "fuse");
  if (gains.dim() != 2 || gains.size(1) != content.size(1))
    throw std::invalid_argument("fuse: gains must be (B,C) matching the content feature");
  return content * gains.unsqueeze(2).unsqueeze(3).to(content.dtype());
}

torch::Tensor project_out(const torch::Tensor& fused, const MccParams& params) {
  return conv1x1(fused, params.proj_out);
}

MccTrace mcc_forward_traced(const torch::Tensor& f_c, const torch::Tensor& f_s,
                            const MccParams& params, FusionMode mode) {
  check_feature(f_s, "mcc_forward");
  check_channels(f_s, params, "mcc_forward");
  MccTrace tr;
  tr.content = content_branch(f_c, params);
  auto branch = conv1x1(normalize(f_s), params.proj_s);
  const auto n = static_cast<double>(branch.size(2) * branch.size(3));
  tr.energies = channel_energy(branch) / n;
  tr.gains = gains_from_energies(tr.energies, params, mode);
  tr.fused = fuse(tr.content, tr.gains);
  tr.output = project_out(tr.fused, params);
  return tr;
}

torch::Tensor mcc_forward(const torch::Tensor& f_c, const torch::Tensor& f_s,
                          const MccParams& params, FusionMode mode) {
  return project_out(fuse(content_branch(f_c, params), style_gains(f_s, params, mode)),
                     params);
}

torch::Tensor correlation_route(const torch::Tensor& f_c_channel,
                                const torch::Tensor& f_s_channel) {
  if (f_c_channel.dim() != 1 || f_s_channel.dim() != 1)
    throw std::invalid_argument("correlation_route: expected 1-D channel vectors");
  if (f_c_channel.numel() != f_s_channel.numel())
    throw std::invalid_argument("correlation_route: length mismatch (" +
                                std::to_string(f_c_channel.numel()) + " vs " +
                                std::to_string(f_s_channel.numel()) + ")");
  auto c = f_c_channel.unsqueeze(0);  // (1,N)
  auto s = f_s_channel.unsqueeze(0);
  auto co = torch::matmul(c.t(), s);              // (N,N)
  return torch::matmul(s, co.t()).squeeze(0);     // (N)
}

double lipschitz_bound(const MccParams& params, const torch::Tensor& f_s,
                       FusionMode mode) {
  torch::NoGradGuard guard;
  return style_gains(f_s, params, mode).abs().max().item<double>();
}

}  // namespace mccnet
