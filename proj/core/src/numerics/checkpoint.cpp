#include "gatenav/numerics/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "gatenav/common/error.hpp"

namespace gatenav::nn {

namespace {

constexpr char kMagic[4] = {'C', 'M', 'V', 'K'};
constexpr uint32_t kVersion = 1;

void write_bytes(std::ofstream& os, const void* p, size_t n) { os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }

template <typename T>
void write_pod(std::ofstream& os, T v) {
  write_bytes(os, &v, sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& is, const std::string& path) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw DataError("truncated checkpoint: " + path);
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot open checkpoint for writing: " + tmp.string());
    write_bytes(os, kMagic, 4);
    write_pod<uint32_t>(os, kVersion);
    write_pod<uint32_t>(os, static_cast<uint32_t>(tensors.size()));
    for (const auto& nt : tensors) {
      if (nt.name.size() > 0xffff) throw DataError("tensor name too long: " + nt.name);
      write_pod<uint16_t>(os, static_cast<uint16_t>(nt.name.size()));
      write_bytes(os, nt.name.data(), nt.name.size());
      const auto& shape = nt.tensor.shape();
      write_pod<uint8_t>(os, static_cast<uint8_t>(shape.size()));
      for (int d : shape) write_pod<uint32_t>(os, static_cast<uint32_t>(d));
      write_bytes(os, nt.tensor.data(), sizeof(float) * static_cast<size_t>(nt.tensor.size()));
    }
    if (!os) throw DataError("write failed for checkpoint: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open checkpoint: " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw DataError("not a CMVK checkpoint: " + path.string());
  const uint32_t version = read_pod<uint32_t>(is, path.string());
  if (version != kVersion) throw DataError("unsupported checkpoint version in " + path.string());
  const uint32_t count = read_pod<uint32_t>(is, path.string());
  std::vector<NamedTensor> out;
  out.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    const uint16_t name_len = read_pod<uint16_t>(is, path.string());
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    const uint8_t rank = read_pod<uint8_t>(is, path.string());
    std::vector<int> shape(rank);
    int64_t numel = 1;
    for (int r = 0; r < rank; ++r) {
      shape[static_cast<size_t>(r)] = static_cast<int>(read_pod<uint32_t>(is, path.string()));
      numel *= shape[static_cast<size_t>(r)];
    }
    std::vector<float> data(static_cast<size_t>(numel));
    is.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(sizeof(float) * data.size()));
    if (!is) throw DataError("truncated checkpoint at tensor '" + name + "': " + path.string());
    out.push_back({std::move(name), Tensor(std::move(shape), std::move(data))});
  }
  return out;
}

std::vector<NamedTensor> store_to_tensors(const ParameterStore& store, bool include_adam_state) {
  std::vector<NamedTensor> out;
  for (const auto& e : store.entries()) {
    out.push_back({e.name, e.var.value()});
    if (include_adam_state) {
      out.push_back({e.name + ".m", Tensor(e.var.value().shape(), e.m)});
      out.push_back({e.name + ".v", Tensor(e.var.value().shape(), e.v)});
      out.push_back({e.name + ".t", Tensor::scalar(static_cast<float>(e.t))});
    }
  }
  return out;
}

void tensors_to_store(const std::vector<NamedTensor>& tensors, ParameterStore& store) {
  auto find = [&tensors](const std::string& name) -> const NamedTensor* {
    for (const auto& nt : tensors)
      if (nt.name == name) return &nt;
    return nullptr;
  };
  for (auto& e : store.entries()) {
    const NamedTensor* value = find(e.name);
    if (!value) throw DataError("checkpoint is missing tensor '" + e.name + "'");
    if (value->tensor.shape() != e.var.value().shape())
      throw DataError("checkpoint shape mismatch for '" + e.name + "': " + shape_str(value->tensor.shape()) + " vs " +
                      shape_str(e.var.value().shape()));
    e.var.value().vec() = value->tensor.vec();
    if (const NamedTensor* m = find(e.name + ".m")) e.m = m->tensor.vec();
    if (const NamedTensor* v = find(e.name + ".v")) e.v = v->tensor.vec();
    if (const NamedTensor* t = find(e.name + ".t")) e.t = static_cast<int64_t>(t->tensor.at(0));
  }
}

std::string file_content_hash(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open file for hashing: " + path.string());
  uint64_t h = 1469598103934665603ull;
  char buf[4096];
  while (is) {
    is.read(buf, sizeof(buf));
    const std::streamsize n = is.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return std::string(hex);
}

}  // namespace gatenav::nn
