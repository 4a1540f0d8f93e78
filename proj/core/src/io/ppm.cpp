#include "gatenav/io/ppm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "gatenav/common/error.hpp"

namespace gatenav {

void write_ppm(const std::filesystem::path& path, int width, int height, const std::vector<uint8_t>& rgb) {
  if (static_cast<size_t>(width) * height * 3 != rgb.size()) throw DataError("write_ppm: pixel buffer size mismatch");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot open for writing: " + path.string());
  os << "P6\n" << width << " " << height << "\n255\n";
  os.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
  if (!os) throw DataError("write failed: " + path.string());
}

std::vector<uint8_t> tensor_to_rgb8(const Tensor& image) {
  if (image.rank() != 3 || image.dim(0) != 3) throw DataError("tensor_to_rgb8: expected [3 x H x W]");
  const int h = image.dim(1), w = image.dim(2);
  std::vector<uint8_t> out(static_cast<size_t>(h) * w * 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        const float v = image.at((static_cast<int64_t>(c) * h + y) * w + x);
        out[(static_cast<size_t>(y) * w + x) * 3 + c] =
            static_cast<uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
      }
  return out;
}

void write_ppm(const std::filesystem::path& path, const Tensor& image) {
  write_ppm(path, image.dim(2), image.dim(1), tensor_to_rgb8(image));
}

Tensor tile_images(const std::vector<Tensor>& images, int columns) {
  if (images.empty()) throw DataError("tile_images: no images");
  const int h = images[0].dim(1), w = images[0].dim(2);
  for (const auto& im : images)
    if (im.rank() != 3 || im.dim(0) != 3 || im.dim(1) != h || im.dim(2) != w)
      throw DataError("tile_images: images must share one [3 x H x W] shape");
  const int n = static_cast<int>(images.size());
  const int cols = std::max(1, std::min(columns, n));
  const int rows = (n + cols - 1) / cols;
  constexpr int kGap = 2;
  const int out_h = rows * h + (rows - 1) * kGap;
  const int out_w = cols * w + (cols - 1) * kGap;
  Tensor out = Tensor::full({3, out_h, out_w}, 1.0f);
  for (int i = 0; i < n; ++i) {
    const int ry = (i / cols) * (h + kGap);
    const int rx = (i % cols) * (w + kGap);
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          out.at((static_cast<int64_t>(c) * out_h + ry + y) * out_w + rx + x) =
              images[static_cast<size_t>(i)].at((static_cast<int64_t>(c) * h + y) * w + x);
  }
  return out;
}

}  // namespace gatenav
