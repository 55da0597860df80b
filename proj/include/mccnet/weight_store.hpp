#pragma once

#include <torch/torch.h>

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace mccnet {

// Flat binary tensor container ("MCCW1"): magic, entry count, then per entry
// a length-prefixed UTF-8 tag, dtype code, rank + dims, raw little-endian
// values. Used for encoder weight files and training checkpoints alike.
class WeightStore {
 public:
  static constexpr char kMagic[5] = {'M', 'C', 'C', 'W', '1'};

  // Supported dtype codes. Weights are f32; u8/i64 carry metadata
  // (config snapshots, counters).
  enum class Dtype : std::uint8_t { f32 = 0, u8 = 1, i64 = 2 };

  void put(const std::string& tag, torch::Tensor t);
  bool contains(const std::string& tag) const;
  torch::Tensor get(const std::string& tag) const;  // throws if missing
  const torch::Tensor* find(const std::string& tag) const;
  std::size_t size() const { return entries_.size(); }

  // Tags in insertion order.
  std::vector<std::string> tags() const;

  void save(const std::filesystem::path& path) const;
  static WeightStore load(const std::filesystem::path& path);

 private:
  std::vector<std::pair<std::string, torch::Tensor>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// FNV-1a over the raw bytes of a tensor / a set of tensors; used for the
// encoder frozenness checks.
std::uint64_t tensor_checksum(const torch::Tensor& t);
std::uint64_t tensor_checksum(std::uint64_t seed_hash, const torch::Tensor& t);

// Store metadata strings as u8 tensors.
torch::Tensor string_to_tensor(const std::string& s);
std::string tensor_to_string(const torch::Tensor& t);
torch::Tensor scalar_i64_tensor(std::int64_t v);
std::int64_t tensor_to_i64(const torch::Tensor& t);

}  // namespace mccnet
