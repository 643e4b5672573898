#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace glass {

inline constexpr int kCropSide = 224;

// RGB raster, channel-major (c, row, col), values in [0, 1].
struct ImageBuf {
  static constexpr int channels = 3;

  int height = 0;
  int width = 0;
  std::vector<float> data;

  ImageBuf() = default;
  ImageBuf(int h, int w, float fill = 0.0f);

  std::size_t plane_size() const { return static_cast<std::size_t>(height) * width; }
  std::size_t size() const { return data.size(); }

  float& at(int c, int y, int x) { return data[c * plane_size() + static_cast<std::size_t>(y) * width + x]; }
  float at(int c, int y, int x) const {
    return data[c * plane_size() + static_cast<std::size_t>(y) * width + x];
  }

  std::span<float> plane(int c) { return {data.data() + c * plane_size(), plane_size()}; }
  std::span<const float> plane(int c) const { return {data.data() + c * plane_size(), plane_size()}; }

  // Length equals 3*H*W and every value is finite and in [0, 1].
  bool valid() const;

  friend bool operator==(const ImageBuf&, const ImageBuf&) = default;
};

// Top-left corner of a side x side window in source pixel coordinates.
struct CropRect {
  int top = 0;
  int left = 0;
  int side = kCropSide;

  bool overlaps(const CropRect& o) const {
    return top < o.top + o.side && o.top < top + side && left < o.left + o.side && o.left < left + side;
  }
  friend bool operator==(const CropRect&, const CropRect&) = default;
};

// PNG (via libpng, any bit depth / colour type) and binary or ASCII PPM/PGM.
// 8-bit value v maps to v/255. The decoder accepts any size; callers that feed
// the pipeline check require_min_size().
ImageBuf decode_image(const std::filesystem::path& path);

// Values are quantised with round(v * 255) after clamping to [0, 1].
void write_png(const ImageBuf& img, const std::filesystem::path& path);
void write_ppm(const ImageBuf& img, const std::filesystem::path& path);

// Throws DimensionError when either side is below `side`.
void require_min_size(const ImageBuf& img, int side = kCropSide);

// Opt-in pre-upscale for undersized images: bilinear resize so that the
// shorter side becomes `side`, aspect ratio kept (rounded up).
ImageBuf upscale_to_min(const ImageBuf& img, int side = kCropSide);

// Round-trips every value through 8-bit storage exactly as write_png followed
// by decode_image would.
ImageBuf quantize_8bit(const ImageBuf& img);

// Half-pixel-centre bilinear resize with edge clamping, channels independent.
ImageBuf resize_bilinear(const ImageBuf& img, int out_h, int out_w);

// Exact copy of the rect's pixels, no resampling. Throws DimensionError when
// the rect falls outside the image.
ImageBuf extract_crop(const ImageBuf& img, const CropRect& rect);

}  // namespace glass
