#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "gatenav/numerics/tensor.hpp"

namespace gatenav {

// Binary PPM (P6) export for human inspection of rendered samples.
void write_ppm(const std::filesystem::path& path, int width, int height, const std::vector<uint8_t>& rgb);

// [3 x H x W] float tensor in [0,1] -> interleaved u8.
std::vector<uint8_t> tensor_to_rgb8(const Tensor& image);

void write_ppm(const std::filesystem::path& path, const Tensor& image);

// Tiles equally-sized [3 x H x W] images into a grid (row-major order) with a
// 2-pixel separator.
Tensor tile_images(const std::vector<Tensor>& images, int columns);

}  // namespace gatenav
