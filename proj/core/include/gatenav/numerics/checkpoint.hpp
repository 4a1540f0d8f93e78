#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gatenav/numerics/adam.hpp"
#include "gatenav/numerics/tensor.hpp"

namespace gatenav::nn {

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

// Binary checkpoint: magic "CMVK", u32 version (=1), u32 tensor count; per
// tensor u16 name length, UTF-8 name, u8 rank, rank x u32 dims, raw f32
// little-endian data. Written atomically (tmp file + rename).
void save_checkpoint(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path);

// Store round-trip including Adam state; moments live under "<name>.m" /
// "<name>.v" and the step counter under "<name>.t".
std::vector<NamedTensor> store_to_tensors(const ParameterStore& store, bool include_adam_state = true);
// Fills parameters already registered in the store (shape-checked by name).
void tensors_to_store(const std::vector<NamedTensor>& tensors, ParameterStore& store);

// FNV-1a hash of a file's bytes, hex-encoded; used to pin feature checkpoints
// in policy manifests.
std::string file_content_hash(const std::filesystem::path& path);

}  // namespace gatenav::nn
