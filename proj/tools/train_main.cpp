#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "mccnet/trainer.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Train a style-transfer model. Interrupted runs continue automatically: when "
      "<out_dir>/ckpt_latest.mccw exists it is picked up, so rerunning the same command "
      "resumes where the last run stopped."};

  std::string config_path, resume_path;
  app.add_option("--config", config_path, "Training config (key=value text)")->required();
  app.add_option("--resume-from", resume_path, "Resume from this specific checkpoint file");

  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = mccnet::TrainConfig::from_file(config_path);
    std::optional<std::filesystem::path> resume;
    if (!resume_path.empty()) resume = resume_path;
    auto ck = mccnet::fit(cfg, resume);
    std::cout << "finished at step " << ck.step << "; checkpoints in " << cfg.out_dir.string()
              << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
