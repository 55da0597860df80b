#include "mccnet/weight_store.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace mccnet {

namespace {

WeightStore::Dtype dtype_code(const torch::Tensor& t) {
  switch (t.scalar_type()) {
    case torch::kFloat32: return WeightStore::Dtype::f32;
    case torch::kUInt8: return WeightStore::Dtype::u8;
    case torch::kInt64: return WeightStore::Dtype::i64;
    default:
      throw std::invalid_argument("weight store: unsupported tensor dtype " +
                                  std::string(torch::toString(t.scalar_type())));
  }
}

torch::ScalarType scalar_type(WeightStore::Dtype code) {
  switch (code) {
    case WeightStore::Dtype::f32: return torch::kFloat32;
    case WeightStore::Dtype::u8: return torch::kUInt8;
    case WeightStore::Dtype::i64: return torch::kInt64;
  }
  throw std::runtime_error("weight store: unknown dtype code " +
                           std::to_string(static_cast<int>(code)));
}

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool read_pod(std::istream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return in.gcount() == static_cast<std::streamsize>(sizeof(T));
}

[[noreturn]] void truncated(const std::filesystem::path& path, const std::string& where) {
  throw std::runtime_error("weight store: file truncated " + where + " in '" +
                           path.string() + "'");
}

}  // namespace

void WeightStore::put(const std::string& tag, torch::Tensor t) {
  if (tag.empty()) throw std::invalid_argument("weight store: empty tag");
  t = t.contiguous().cpu();
  dtype_code(t);  // validate
  auto it = index_.find(tag);
  if (it != index_.end()) {
    entries_[it->second].second = std::move(t);
    return;
  }
  index_[tag] = entries_.size();
  entries_.emplace_back(tag, std::move(t));
}

bool WeightStore::contains(const std::string& tag) const {
  return index_.count(tag) != 0;
}

torch::Tensor WeightStore::get(const std::string& tag) const {
  auto it = index_.find(tag);
  if (it == index_.end())
    throw std::runtime_error("weight store: missing tensor '" + tag + "'");
  return entries_[it->second].second;
}

const torch::Tensor* WeightStore::find(const std::string& tag) const {
  auto it = index_.find(tag);
  return it == index_.end() ? nullptr : &entries_[it->second].second;
}

std::vector<std::string> WeightStore::tags() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [tag, _] : entries_) out.push_back(tag);
  return out;
}

void WeightStore::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("weight store: cannot open '" + path.string() + "' for writing");
  out.write(kMagic, sizeof(kMagic));
  write_pod(out, static_cast<std::uint32_t>(entries_.size()));
  for (const auto& [tag, t] : entries_) {
    write_pod(out, static_cast<std::uint32_t>(tag.size()));
    out.write(tag.data(), static_cast<std::streamsize>(tag.size()));
    write_pod(out, static_cast<std::uint8_t>(dtype_code(t)));
    write_pod(out, static_cast<std::uint8_t>(t.dim()));
    for (auto d : t.sizes()) write_pod(out, static_cast<std::uint64_t>(d));
    out.write(reinterpret_cast<const char*>(t.const_data_ptr()),
              static_cast<std::streamsize>(t.numel() * t.element_size()));
  }
  if (!out) throw std::runtime_error("weight store: write failed for '" + path.string() + "'");
}

WeightStore WeightStore::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("weight store: cannot open '" + path.string() + "'");

  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (in.gcount() != sizeof(magic) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("weight store: '" + path.string() + "' is not an MCCW1 container");

  std::uint32_t count = 0;
  if (!read_pod(in, count)) truncated(path, "in header");

  WeightStore store;
  std::string prev = "<none>";
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string at = "at entry " + std::to_string(i) + " (after '" + prev + "')";
    std::uint32_t tag_len = 0;
    if (!read_pod(in, tag_len)) truncated(path, at);
    std::string tag(tag_len, '\0');
    in.read(tag.data(), tag_len);
    if (in.gcount() != static_cast<std::streamsize>(tag_len)) truncated(path, at);

    std::uint8_t code = 0, rank = 0;
    if (!read_pod(in, code) || !read_pod(in, rank))
      truncated(path, "mid-layer '" + tag + "'");
    std::vector<std::int64_t> dims(rank);
    std::int64_t numel = 1;
    for (int d = 0; d < rank; ++d) {
      std::uint64_t v = 0;
      if (!read_pod(in, v)) truncated(path, "mid-layer '" + tag + "'");
      dims[d] = static_cast<std::int64_t>(v);
      numel *= dims[d];
    }
    auto dtype = scalar_type(static_cast<Dtype>(code));
    auto t = torch::empty(dims, torch::TensorOptions().dtype(dtype));
    const auto bytes = numel * t.element_size();
    in.read(reinterpret_cast<char*>(t.data_ptr()), bytes);
    if (in.gcount() != static_cast<std::streamsize>(bytes))
      truncated(path, "mid-layer '" + tag + "'");
    store.put(tag, std::move(t));
    prev = tag;
  }
  return store;
}

std::uint64_t tensor_checksum(std::uint64_t h, const torch::Tensor& t) {
  auto c = t.contiguous().cpu();
  const auto* p = static_cast<const unsigned char*>(c.const_data_ptr());
  const auto n = static_cast<std::size_t>(c.numel() * c.element_size());
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t tensor_checksum(const torch::Tensor& t) {
  return tensor_checksum(0xcbf29ce484222325ULL, t);
}

torch::Tensor string_to_tensor(const std::string& s) {
  auto t = torch::empty({static_cast<std::int64_t>(s.size())}, torch::kUInt8);
  if (!s.empty()) std::memcpy(t.data_ptr(), s.data(), s.size());
  return t;
}

std::string tensor_to_string(const torch::Tensor& t) {
  auto c = t.contiguous().cpu();
  if (c.scalar_type() != torch::kUInt8)
    throw std::runtime_error("weight store: expected u8 tensor for string payload");
  return std::string(static_cast<const char*>(c.const_data_ptr()),
                     static_cast<std::size_t>(c.numel()));
}

torch::Tensor scalar_i64_tensor(std::int64_t v) {
  return torch::tensor({v}, torch::kInt64);
}

std::int64_t tensor_to_i64(const torch::Tensor& t) {
  auto c = t.contiguous().cpu();
  if (c.numel() < 1) throw std::runtime_error("weight store: empty i64 payload");
  return c[0].item<std::int64_t>();
}

}  // namespace mccnet
