#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mccnet/benchmark.hpp"
#include "mccnet/pipeline.hpp"

namespace {

std::optional<mccnet::Depth> parse_depth_flag(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return mccnet::depth_from_name(s);
}

std::optional<mccnet::FusionMode> parse_mode_flag(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return mccnet::fusion_mode_from_name(s);
}

std::vector<int> parse_sizes(const std::string& csv) {
  std::vector<int> sizes;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    sizes.push_back(std::stoi(item));
  }
  return sizes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stylize images and video frames with a trained model"};
  app.require_subcommand(1);

  std::string ckpt, depth_flag, mode_flag;

  // stylize image
  auto* image = app.add_subcommand("image", "Stylize one image");
  std::string content_path, style_path, out_path;
  image->add_option("--content", content_path, "Content image")->required();
  image->add_option("--style", style_path, "Style image")->required();
  image->add_option("--ckpt", ckpt, "Model checkpoint (.mccw)")->required();
  image->add_option("--out", out_path, "Output image path")->required();
  image->add_option("--depth", depth_flag, "Expected codec depth (deep|shallow)");
  image->add_option("--mode", mode_flag, "Expected fusion mode (multi_channel|channel_wise)");

  // stylize video
  auto* video = app.add_subcommand("video", "Stylize a directory of frames");
  std::string frames_dir, out_dir;
  video->add_option("--frames", frames_dir, "Directory of input frames")->required();
  video->add_option("--style", style_path, "Style image")->required();
  video->add_option("--ckpt", ckpt, "Model checkpoint (.mccw)")->required();
  video->add_option("--out", out_dir, "Output directory")->required();
  video->add_option("--depth", depth_flag, "Expected codec depth (deep|shallow)");
  video->add_option("--mode", mode_flag, "Expected fusion mode (multi_channel|channel_wise)");

  // stylize bench
  auto* bench = app.add_subcommand("bench", "Time stylization at several sizes");
  std::string sizes_csv = "256,512,1024", report_path;
  int runs = 10, warmup = 1;
  bench->add_option("--ckpt", ckpt, "Model checkpoint (.mccw)")->required();
  bench->add_option("--sizes", sizes_csv, "Comma-separated square sizes (default 256,512,1024)");
  bench->add_option("--runs", runs, "Timed runs per size (default 10)");
  bench->add_option("--warmup", warmup, "Untimed warmup passes per size (default 1)");
  bench->add_option("--out", report_path, "Write the report as JSON here");

  CLI11_PARSE(app, argc, argv);

  try {
    auto model = mccnet::load_for_inference(ckpt, parse_depth_flag(depth_flag),
                                            parse_mode_flag(mode_flag));

    if (image->parsed()) {
      mccnet::stylize_image_file(model, content_path, style_path, out_path);
      std::cout << "wrote " << out_path << "\n";
      return 0;
    }

    if (video->parsed()) {
      auto result = mccnet::stylize_video_dir(model, frames_dir, style_path, out_dir);
      std::cout << "stylized " << result.frame_count << " frames into " << out_dir << "\n";
      return 0;
    }

    // bench
    auto sizes = parse_sizes(sizes_csv);
    auto report = mccnet::run_benchmark(model, sizes, runs, warmup);

    std::cout << "hardware: " << report.hardware << " (" << report.threads << " thread"
              << (report.threads == 1 ? "" : "s") << ")\n";
    std::cout << std::fixed << std::setprecision(4);
    for (const auto& t : report.timings) {
      std::cout << "  " << t.size << "x" << t.size << "  mean " << t.mean_s << "s  median "
                << t.median_s << "s  (" << report.runs << " runs)\n";
    }
    std::cout << "context, not comparable: " << mccnet::published_reference_label() << "\n";
    for (const auto& r : mccnet::published_reference_timings()) {
      std::cout << "  " << r.size << "x" << r.size << "  " << std::setprecision(3) << r.seconds
                << "s\n";
    }

    if (!report_path.empty()) {
      nlohmann::json j;
      j["hardware"] = report.hardware;
      j["threads"] = report.threads;
      j["warmup"] = report.warmup;
      j["runs"] = report.runs;
      for (const auto& t : report.timings) {
        j["timings"].push_back({{"size", t.size},
                                {"mean_s", t.mean_s},
                                {"median_s", t.median_s},
                                {"seconds", t.seconds}});
      }
      j["reference"]["label"] = mccnet::published_reference_label();
      for (const auto& r : mccnet::published_reference_timings()) {
        j["reference"]["timings"].push_back({{"size", r.size}, {"seconds", r.seconds}});
      }
      std::ofstream out(report_path);
      if (!out) throw std::runtime_error("cannot write report to '" + report_path + "'");
      out << j.dump(2) << "\n";
      std::cout << "wrote " << report_path << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
