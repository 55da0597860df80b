#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>

#include "mccnet/coherence.hpp"
#include "mccnet/image_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Video coherence metrics"};
  app.require_subcommand(1);

  auto* coherence = app.add_subcommand("coherence", "Adjacent-frame difference statistics");
  std::string frames_dir, against_dir, heatmaps_dir, out_path;
  coherence->add_option("--frames", frames_dir, "Directory of frames to measure")->required();
  coherence->add_option("--against", against_dir,
                        "Reference clip; adds the mean-diff ratio frames/against");
  coherence->add_option("--heatmaps", heatmaps_dir, "Write per-pair difference images here");
  coherence->add_option("--out", out_path, "Report JSON path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    auto clip = mccnet::load_frames(frames_dir);
    auto report = mccnet::frame_diffs(clip.frames);

    nlohmann::json j;
    j["frames"] = clip.frames.size();
    j["diff_series"] = report.diff_series;
    j["mean_diff"] = report.mean_diff;
    j["var_diff"] = report.var_diff;

    if (!against_dir.empty()) {
      auto reference = mccnet::load_frames(against_dir);
      auto paired = mccnet::compare_coherence(reference.frames, clip.frames);
      j["against_mean_diff"] = paired.input.mean_diff;
      j["against_var_diff"] = paired.input.var_diff;
      if (paired.static_input) {
        j["ratio"] = "static";
      } else {
        j["ratio"] = *paired.ratio;
      }
    }

    if (!heatmaps_dir.empty()) {
      std::filesystem::create_directories(heatmaps_dir);
      auto maps = mccnet::difference_heatmaps(clip.frames);
      for (std::size_t i = 0; i < maps.size(); ++i) {
        // (H,W) -> (1,3,H,W) grayscale so save_image applies unchanged
        auto gray = maps[i].unsqueeze(0).unsqueeze(0).repeat({1, 3, 1, 1});
        std::ostringstream name;
        name << "diff_" << std::setw(4) << std::setfill('0') << i << ".png";
        mccnet::save_image(gray, std::filesystem::path(heatmaps_dir) / name.str());
      }
      std::cout << "wrote " << maps.size() << " heatmaps to " << heatmaps_dir << "\n";
    }

    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write report to '" + out_path + "'");
    out << j.dump(2) << "\n";
    std::cout << "mean_diff " << report.mean_diff << "  var_diff " << report.var_diff << "\n";
    std::cout << "wrote " << out_path << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
