#include "mccnet/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mccnet {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

TrainConfig TrainConfig::parse(const std::string& text) {
  TrainConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: line " + std::to_string(lineno) +
                               " is not key=value: '" + s + "'");
    const auto key = trim(s.substr(0, eq));
    const auto val = trim(s.substr(eq + 1));

    try {
      if (key == "content_dir") cfg.content_dir = val;
      else if (key == "style_dir") cfg.style_dir = val;
      else if (key == "out_dir") cfg.out_dir = val;
      else if (key == "encoder") cfg.encoder_path = val;
      else if (key == "crop") cfg.crop = std::stoll(val);
      else if (key == "batch") cfg.batch = std::stoll(val);
      else if (key == "steps") cfg.steps = std::stoll(val);
      else if (key == "checkpoint_every") cfg.checkpoint_every = std::stoll(val);
      else if (key == "depth") cfg.depth = depth_from_name(val);
      else if (key == "mode") cfg.mode = fusion_mode_from_name(val);
      else if (key == "learning_rate") cfg.learning_rate = std::stod(val);
      else if (key == "seed") cfg.seed = std::stoull(val);
      else if (key == "loss.content") cfg.weights.content = std::stod(val);
      else if (key == "loss.style") cfg.weights.style = std::stod(val);
      else if (key == "loss.identity") cfg.weights.identity = std::stod(val);
      else if (key == "loss.illumination") cfg.weights.illumination = std::stod(val);
      else if (key == "loss.noise_sigma") cfg.noise_sigma = std::stod(val);
      else
        throw std::runtime_error("config: unknown key '" + key + "' at line " +
                                 std::to_string(lineno));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("config: bad value for '" + key + "' at line " +
                               std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

TrainConfig TrainConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string TrainConfig::serialize() const {
  std::ostringstream out;
  out << "content_dir=" << content_dir.string() << "\n"
      << "style_dir=" << style_dir.string() << "\n"
      << "out_dir=" << out_dir.string() << "\n"
      << "encoder=" << encoder_path.string() << "\n"
      << "crop=" << crop << "\n"
      << "batch=" << batch << "\n"
      << "steps=" << steps << "\n"
      << "checkpoint_every=" << checkpoint_every << "\n"
      << "depth=" << depth_name(depth) << "\n"
      << "mode=" << fusion_mode_name(mode) << "\n"
      << "learning_rate=" << learning_rate << "\n"
      << "seed=" << seed << "\n"
      << "loss.content=" << weights.content << "\n"
      << "loss.style=" << weights.style << "\n"
      << "loss.identity=" << weights.identity << "\n"
      << "loss.illumination=" << weights.illumination << "\n"
      << "loss.noise_sigma=" << noise_sigma << "\n";
  return out.str();
}

void TrainConfig::validate() const {
  const auto factor = depth_downscale(depth);
  if (crop < VggEncoder::kMinInputSize)
    throw std::runtime_error("config: crop must be at least " +
                             std::to_string(VggEncoder::kMinInputSize));
  if (crop % factor != 0)
    throw std::runtime_error("config: crop " + std::to_string(crop) +
                             " must be divisible by " + std::to_string(factor) + " for " +
                             depth_name(depth) + " depth");
  if (batch < 1) throw std::runtime_error("config: batch must be >= 1");
  if (steps < 0) throw std::runtime_error("config: steps must be >= 0");
  if (checkpoint_every < 1) throw std::runtime_error("config: checkpoint_every must be >= 1");
  if (learning_rate <= 0) throw std::runtime_error("config: learning_rate must be > 0");
  if (noise_sigma < 0) throw std::runtime_error("config: loss.noise_sigma must be >= 0");
  if (weights.content < 0 || weights.style < 0 || weights.identity < 0 ||
      weights.illumination < 0)
    throw std::runtime_error("config: loss weights must be >= 0");
}

}  // namespace mccnet
