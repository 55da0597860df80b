#include <CLI11.hpp>

#include <cstdint>
#include <iomanip>
#include <iostream>
#include <string>

#include "mccnet/vgg_encoder.hpp"
#include "mccnet/weight_store.hpp"

namespace {

const char* dtype_label(torch::ScalarType t) {
  switch (t) {
    case torch::kFloat32: return "f32";
    case torch::kUInt8: return "u8";
    case torch::kInt64: return "i64";
    default: return "?";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inspect and create MCCW1 weight containers"};
  app.require_subcommand(1);

  auto* info = app.add_subcommand("info", "List the tensors in a container");
  std::string path;
  info->add_option("file", path, "Container path")->required();

  auto* make = app.add_subcommand("make-encoder",
                                  "Write a randomly initialized encoder container "
                                  "(for pipeline bring-up and tests; not pretrained)");
  std::string out_path;
  std::uint64_t seed = 0;
  make->add_option("--out", out_path, "Output container path")->required();
  make->add_option("--seed", seed, "Init seed (default 0)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (info->parsed()) {
      auto store = mccnet::WeightStore::load(path);
      std::size_t total_bytes = 0;
      for (const auto& tag : store.tags()) {
        auto t = store.get(tag);
        std::cout << std::left << std::setw(28) << tag << " " << std::setw(4)
                  << dtype_label(t.scalar_type()) << " [";
        for (std::int64_t d = 0; d < t.dim(); ++d) {
          std::cout << (d ? "," : "") << t.size(d);
        }
        std::cout << "]\n";
        total_bytes += t.numel() * t.element_size();
      }
      std::cout << store.size() << " tensors, " << total_bytes << " bytes of data\n";
      return 0;
    }

    auto encoder = mccnet::VggEncoder::random(seed);
    mccnet::WeightStore store;
    encoder.write_to(store);
    store.save(out_path);
    std::cout << "wrote random encoder (seed " << seed << ") to " << out_path << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
