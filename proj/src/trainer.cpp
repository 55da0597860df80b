#include "mccnet/trainer.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <future>
#include <iostream>
#include <stdexcept>

#include "mccnet/losses.hpp"

namespace mccnet {

namespace {

constexpr std::int64_t kMaxShortSide = 512;

std::filesystem::path latest_checkpoint_path(const TrainConfig& cfg) {
  return cfg.out_dir / "ckpt_latest.mccw";
}

void check_resume_compatible(const TrainConfig& loaded, const TrainConfig& requested) {
  auto mismatch = [](const std::string& key) {
    throw std::runtime_error("resume: config '" + key +
                             "' differs from the checkpoint snapshot");
  };
  if (loaded.depth != requested.depth) mismatch("depth");
  if (loaded.mode != requested.mode) mismatch("mode");
  if (loaded.seed != requested.seed) mismatch("seed");
  if (loaded.crop != requested.crop) mismatch("crop");
  if (loaded.batch != requested.batch) mismatch("batch");
  if (loaded.learning_rate != requested.learning_rate) mismatch("learning_rate");
  if (loaded.noise_sigma != requested.noise_sigma) mismatch("loss.noise_sigma");
  if (loaded.weights.content != requested.weights.content ||
      loaded.weights.style != requested.weights.style ||
      loaded.weights.identity != requested.weights.identity ||
      loaded.weights.illumination != requested.weights.illumination)
    mismatch("loss weights");
}

}  // namespace

ImageCorpus::ImageCorpus(const std::filesystem::path& dir) : dir_(dir) {
  files_ = list_images(dir);
  if (files_.empty())
    throw std::runtime_error("corpus: no images in '" + dir.string() + "'");
}

torch::Tensor ImageCorpus::sample_crop(std::int64_t crop, Rng& rng) const {
  for (int attempt = 0; attempt < 100; ++attempt) {
    const auto& path = files_[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(files_.size()) - 1))];
    torch::Tensor img;
    try {
      img = load_image(path);
    } catch (const std::exception& e) {
      std::cerr << "corpus: skipping unreadable image: " << e.what() << "\n";
      continue;
    }
    auto h = img.size(2), w = img.size(3);
    const auto short_side = std::min(h, w);
    std::int64_t target_short = short_side;
    if (short_side > kMaxShortSide) target_short = kMaxShortSide;
    if (target_short < crop) target_short = crop;
    if (target_short != short_side) {
      const double scale = static_cast<double>(target_short) / static_cast<double>(short_side);
      auto nh = std::max<std::int64_t>(crop, std::llround(static_cast<double>(h) * scale));
      auto nw = std::max<std::int64_t>(crop, std::llround(static_cast<double>(w) * scale));
      img = resize_image(img, nh, nw);
      h = nh;
      w = nw;
    }
    const auto oy = rng.uniform_int(0, h - crop);
    const auto ox = rng.uniform_int(0, w - crop);
    return img.slice(2, oy, oy + crop).slice(3, ox, ox + crop).contiguous();
  }
  throw std::runtime_error("corpus: no readable image found in '" + dir_.string() +
                           "' after 100 attempts");
}

std::pair<torch::Tensor, torch::Tensor> build_batch(const ImageCorpus& content,
                                                    const ImageCorpus& style,
                                                    std::int64_t batch, std::int64_t crop,
                                                    Rng& rng) {
  if (batch < 1) throw std::invalid_argument("build_batch: batch must be >= 1");
  std::vector<torch::Tensor> cs, ss;
  cs.reserve(batch);
  ss.reserve(batch);
  for (std::int64_t i = 0; i < batch; ++i) cs.push_back(content.sample_crop(crop, rng));
  for (std::int64_t i = 0; i < batch; ++i) ss.push_back(style.sample_crop(crop, rng));
  return {torch::cat(cs, 0), torch::cat(ss, 0)};
}

Trainer::Trainer(TrainConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  auto encoder = VggEncoder::load(cfg_.encoder_path);
  model_ = StyleTransferModel::create(encoder, cfg_.depth, cfg_.mode, cfg_.seed);
  opt_ = AdamOptimizer(cfg_.learning_rate);
  for (auto& [tag, p] : model_.trainable_parameters()) {
    (void)tag;
    p.set_requires_grad(true);
  }
}

Trainer::Trainer(Checkpoint ck)
    : cfg_(ck.config), model_(std::move(ck.model)), opt_(std::move(ck.optimizer)),
      step_(ck.step) {
  for (auto& [tag, p] : model_.trainable_parameters()) {
    (void)tag;
    p.set_requires_grad(true);
  }
}

void Trainer::ensure_corpora() {
  if (!content_corpus_) content_corpus_.emplace(cfg_.content_dir);
  if (!style_corpus_) style_corpus_.emplace(cfg_.style_dir);
}

LossBundle Trainer::train_step(const torch::Tensor& content, const torch::Tensor& style) {
  // callers may sit under an ambient NoGradGuard (evaluation harnesses); the
  // update still needs autograd
  torch::AutoGradMode enable_grad(true);
  check_image_plane(content, "train_step content batch");
  check_image_plane(style, "train_step style batch");
  const auto stride = depth_downscale(cfg_.depth);
  for (const auto* t : {&content, &style}) {
    if (t->size(2) % stride != 0 || t->size(3) % stride != 0)
      throw std::invalid_argument("train_step: batch spatial dims must be divisible by " +
                                  std::to_string(stride));
  }

  EncoderTaps taps_c, taps_s;
  torch::Tensor f_c_noisy;
  Rng noise_rng(Rng::derive(cfg_.seed, rng_stream::kNoise, static_cast<std::uint64_t>(step_)));
  {
    torch::NoGradGuard guard;
    taps_c = model_.encoder.encode(content, cfg_.depth);
    taps_s = model_.encoder.encode(style, cfg_.depth);
    if (cfg_.noise_sigma > 0) {
      auto delta = noise_rng.normal_tensor(content.sizes(), cfg_.noise_sigma);
      f_c_noisy = model_.encoder.encode(content + delta, cfg_.depth).deepest();
    }
  }
  const auto& f_c = taps_c.deepest();
  const auto& f_s = taps_s.deepest();

  auto i_cs = model_.decoder.decode(mcc_forward(f_c, f_s, model_.mcc, model_.mode));
  auto gen_taps = model_.encoder.encode(i_cs, cfg_.depth);
  auto content_t = content_loss_taps(gen_taps, taps_c);
  auto style_t = style_loss_taps(gen_taps, taps_s);

  auto i_cc = model_.decoder.decode(mcc_forward(f_c, f_c, model_.mcc, model_.mode));
  auto i_ss = model_.decoder.decode(mcc_forward(f_s, f_s, model_.mcc, model_.mode));
  auto identity_t = feature_mse(i_cc, content) + feature_mse(i_ss, style);

  torch::Tensor illumination_t;
  if (cfg_.noise_sigma > 0) {
    auto i_cs_noisy =
        model_.decoder.decode(mcc_forward(f_c_noisy, f_s, model_.mcc, model_.mode));
    illumination_t = feature_mse(i_cs, i_cs_noisy);
  } else {
    illumination_t = torch::zeros({}, content.options());
  }

  LossBundle bundle;
  try {
    bundle = total_loss(content_t.item<double>(), style_t.item<double>(),
                        identity_t.item<double>(), illumination_t.item<double>(),
                        cfg_.weights);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(e.what()) + " at step " + std::to_string(step_ + 1));
  }

  auto params = model_.trainable_parameters();
  opt_.zero_grad(params);
  weighted_total(content_t, style_t, identity_t, illumination_t, cfg_.weights).backward();
  opt_.step(params);
  ++step_;
  return bundle;
}

LossBundle Trainer::run_step() {
  ensure_corpora();
  Rng batch_rng(Rng::derive(cfg_.seed, rng_stream::kBatch, static_cast<std::uint64_t>(step_)));
  auto [c, s] = build_batch(*content_corpus_, *style_corpus_, cfg_.batch, cfg_.crop, batch_rng);
  return train_step(c, s);
}

Checkpoint Trainer::make_checkpoint() const {
  Checkpoint ck;
  ck.step = step_;
  ck.config = cfg_;
  ck.model = model_;
  ck.optimizer = opt_;
  return ck;
}

Checkpoint Trainer::fit() {
  std::filesystem::create_directories(cfg_.out_dir);
  std::ofstream metrics(cfg_.out_dir / "metrics.ndjson", std::ios::app);
  if (!metrics)
    throw std::runtime_error("fit: cannot open metrics log in '" + cfg_.out_dir.string() +
                             "'");

  if (step_ >= cfg_.steps) {
    auto ck = make_checkpoint();
    ck.save(latest_checkpoint_path(cfg_));
    return ck;
  }

  ensure_corpora();
  using Batch = std::pair<torch::Tensor, torch::Tensor>;
  auto build = [this](std::int64_t k) {
    Rng rng(Rng::derive(cfg_.seed, rng_stream::kBatch, static_cast<std::uint64_t>(k)));
    return build_batch(*content_corpus_, *style_corpus_, cfg_.batch, cfg_.crop, rng);
  };
  // Single-slot prefetch: batch k+1 loads while step k computes. Batch
  // contents depend only on (seed, k), so overlap cannot change results.
  std::future<Batch> next = std::async(std::launch::async, build, step_);

  while (step_ < cfg_.steps) {
    Batch batch = next.get();
    if (step_ + 1 < cfg_.steps)
      next = std::async(std::launch::async, build, step_ + 1);

    LossBundle b;
    try {
      b = train_step(batch.first, batch.second);
    } catch (const std::exception& e) {
      throw std::runtime_error("fit: " + std::string(e.what()));
    }

    nlohmann::json rec{{"step", step_},          {"content", b.content},
                       {"style", b.style},       {"identity", b.identity},
                       {"illumination", b.illumination}, {"total", b.total}};
    metrics << rec.dump() << "\n";
    metrics.flush();
    if (!metrics)
      throw std::runtime_error("fit: metrics write failed at step " + std::to_string(step_));

    if (step_ % cfg_.checkpoint_every == 0 && step_ < cfg_.steps) {
      auto ck = make_checkpoint();
      ck.save(cfg_.out_dir / ("ckpt_step" + std::to_string(step_) + ".mccw"));
      ck.save(latest_checkpoint_path(cfg_));
    }
  }

  auto ck = make_checkpoint();
  ck.save(latest_checkpoint_path(cfg_));
  return ck;
}

Checkpoint fit(const TrainConfig& cfg, const std::optional<std::filesystem::path>& resume) {
  cfg.validate();
  std::filesystem::path from;
  if (resume) {
    from = *resume;
    if (!std::filesystem::exists(from))
      throw std::runtime_error("resume checkpoint not found: '" + from.string() + "'");
  } else if (std::filesystem::exists(latest_checkpoint_path(cfg))) {
    from = latest_checkpoint_path(cfg);
  }

  if (!from.empty()) {
    auto ck = Checkpoint::load(from);
    check_resume_compatible(ck.config, cfg);
    // Run-control fields may move between sessions.
    ck.config.steps = cfg.steps;
    ck.config.checkpoint_every = cfg.checkpoint_every;
    ck.config.out_dir = cfg.out_dir;
    ck.config.content_dir = cfg.content_dir;
    ck.config.style_dir = cfg.style_dir;
    ck.config.encoder_path = cfg.encoder_path;
    Trainer trainer{std::move(ck)};
    return trainer.fit();
  }
  Trainer trainer{cfg};
  return trainer.fit();
}

}  // namespace mccnet
