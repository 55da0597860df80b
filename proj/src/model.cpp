#include "mccnet/model.hpp"

#include <stdexcept>

namespace mccnet {

StyleTransferModel StyleTransferModel::create(const VggEncoder& encoder, Depth depth,
                                              FusionMode mode, std::uint64_t seed) {
  StyleTransferModel m{encoder,
                       MccParams::init(tap_channels(deepest_tap(depth)), seed),
                       Decoder::init(depth, seed), depth, mode};
  return m;
}

torch::Tensor StyleTransferModel::generate(const torch::Tensor& content,
                                           const torch::Tensor& style) const {
  torch::Tensor f_c, f_s;
  {
    torch::NoGradGuard guard;
    f_c = encoder.encode(content, depth).deepest();
    f_s = encoder.encode(style, depth).deepest();
  }
  return decoder.decode(mcc_forward(f_c, f_s, mcc, mode));
}

torch::Tensor StyleTransferModel::style_gains_for(const torch::Tensor& style) const {
  torch::NoGradGuard guard;
  auto f_s = encoder.encode(style, depth).deepest();
  return style_gains(f_s, mcc, mode);
}

torch::Tensor StyleTransferModel::generate_with_gains(const torch::Tensor& content,
                                                      const torch::Tensor& gains) const {
  torch::Tensor f_c;
  {
    torch::NoGradGuard guard;
    f_c = encoder.encode(content, depth).deepest();
  }
  auto fused = fuse(content_branch(f_c, mcc), gains);
  return decoder.decode(project_out(fused, mcc));
}

std::vector<std::pair<std::string, torch::Tensor>> StyleTransferModel::trainable_parameters()
    const {
  auto out = decoder.named_parameters();
  for (auto& p : mcc.named_parameters()) out.push_back(std::move(p));
  return out;
}

AdamOptimizer::AdamOptimizer(double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void AdamOptimizer::step(const std::vector<std::pair<std::string, torch::Tensor>>& params) {
  torch::NoGradGuard guard;
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (const auto& [tag, p] : params) {
    if (!p.grad().defined()) continue;
    auto g = p.grad();
    auto mit = m_.find(tag);
    if (mit == m_.end()) {
      m_[tag] = torch::zeros_like(p);
      v_[tag] = torch::zeros_like(p);
      mit = m_.find(tag);
    }
    auto& m = mit->second;
    auto& v = v_[tag];
    m.mul_(beta1_).add_(g, 1.0 - beta1_);
    v.mul_(beta2_).addcmul_(g, g, 1.0 - beta2_);
    p.add_(-lr_ * (m / bc1) / ((v / bc2).sqrt() + eps_));
  }
}

void AdamOptimizer::zero_grad(
    const std::vector<std::pair<std::string, torch::Tensor>>& params) {
  for (const auto& [tag, p] : params) {
    (void)tag;
    p.mutable_grad().reset();
  }
}

void AdamOptimizer::write_to(WeightStore& store) const {
  store.put("opt.t", scalar_i64_tensor(t_));
  for (const auto& [tag, m] : m_) store.put("opt.m." + tag, m);
  for (const auto& [tag, v] : v_) store.put("opt.v." + tag, v);
}

AdamOptimizer AdamOptimizer::from_store(const WeightStore& store, double lr) {
  AdamOptimizer opt(lr);
  if (!store.contains("opt.t")) return opt;
  opt.t_ = tensor_to_i64(store.get("opt.t"));
  for (const auto& tag : store.tags()) {
    if (tag.rfind("opt.m.", 0) == 0) opt.m_[tag.substr(6)] = store.get(tag);
    else if (tag.rfind("opt.v.", 0) == 0) opt.v_[tag.substr(6)] = store.get(tag);
  }
  return opt;
}

void Checkpoint::save(const std::filesystem::path& path) const {
  WeightStore store;
  store.put("meta.version", scalar_i64_tensor(1));
  store.put("meta.step", scalar_i64_tensor(step));
  store.put("meta.config", string_to_tensor(config.serialize()));
  store.put("meta.rng",
            string_to_tensor("counter-derived; seed=" + std::to_string(config.seed)));
  model.encoder.write_to(store);
  model.decoder.write_to(store);
  model.mcc.write_to(store);
  optimizer.write_to(store);

  auto tmp = path;
  tmp += ".tmp";
  store.save(tmp);
  std::filesystem::rename(tmp, path);
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  auto store = WeightStore::load(path);
  Checkpoint ck;
  ck.step = tensor_to_i64(store.get("meta.step"));
  ck.config = TrainConfig::parse(tensor_to_string(store.get("meta.config")));
  ck.model.depth = ck.config.depth;
  ck.model.mode = ck.config.mode;
  ck.model.encoder = VggEncoder::from_store(store, path.string());
  ck.model.decoder = Decoder::from_store(store, ck.config.depth);
  ck.model.mcc = MccParams::from_store(store);
  ck.optimizer = AdamOptimizer::from_store(store, ck.config.learning_rate);
  return ck;
}

}  // namespace mccnet
