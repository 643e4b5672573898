#include "glass/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <string>

#include "glass/errors.hpp"
#include "glass/io.hpp"
#include "glass/kernels.hpp"

namespace glass {
namespace {

ImageBuf from_interleaved(const std::uint8_t* px, int h, int w, int comps, double maxval, bool wide) {
  ImageBuf img(h, w);
  const std::size_t plane = img.plane_size();
  for (std::size_t i = 0; i < plane; ++i) {
    for (int c = 0; c < 3; ++c) {
      const int src_c = comps == 1 ? 0 : c;
      const std::size_t idx = i * comps + src_c;
      const double v = wide ? (px[2 * idx] << 8 | px[2 * idx + 1]) : px[idx];
      img.data[c * plane + i] = static_cast<float>(v / maxval);
    }
  }
  return img;
}

ImageBuf decode_png(const std::vector<std::uint8_t>& bytes, const std::string& name) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw DecodeError(name + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw DecodeError(name + ": " + msg);
  }
  return from_interleaved(buf.data(), static_cast<int>(image.height), static_cast<int>(image.width), 3, 255.0,
                          false);
}

// Netpbm P2/P3 (ASCII) and P5/P6 (binary), maxval up to 65535.
class PnmReader {
 public:
  PnmReader(const std::vector<std::uint8_t>& bytes, std::string name) : bytes_(bytes), name_(std::move(name)) {}

  ImageBuf read() {
    if (bytes_.size() < 2 || bytes_[0] != 'P') fail("not a PNM file");
    const char kind = static_cast<char>(bytes_[1]);
    pos_ = 2;
    const bool gray = kind == '2' || kind == '5';
    const bool ascii = kind == '2' || kind == '3';
    if (!(kind == '2' || kind == '3' || kind == '5' || kind == '6')) fail("unsupported PNM variant");
    const long w = next_int();
    const long h = next_int();
    const long maxval = next_int();
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) fail("bad header");
    const int comps = gray ? 1 : 3;
    const std::size_t count = static_cast<std::size_t>(w) * h * comps;
    const bool wide = maxval > 255;
    std::vector<std::uint8_t> raw;
    if (ascii) {
      raw.resize(count * 2);
      for (std::size_t i = 0; i < count; ++i) {
        const long v = next_int();
        if (v < 0 || v > maxval) fail("sample out of range");
        raw[2 * i] = static_cast<std::uint8_t>(v >> 8);
        raw[2 * i + 1] = static_cast<std::uint8_t>(v & 0xFF);
      }
      return from_interleaved(raw.data(), static_cast<int>(h), static_cast<int>(w), comps,
                              static_cast<double>(maxval), true);
    }
    ++pos_;  // single whitespace byte after maxval
    const std::size_t need = count * (wide ? 2 : 1);
    if (pos_ + need > bytes_.size()) fail("truncated pixel data");
    return from_interleaved(bytes_.data() + pos_, static_cast<int>(h), static_cast<int>(w), comps,
                            static_cast<double>(maxval), wide);
  }

 private:
  [[noreturn]] void fail(const std::string& why) const { throw DecodeError(name_ + ": " + why); }

  long next_int() {
    while (pos_ < bytes_.size()) {
      const char ch = static_cast<char>(bytes_[pos_]);
      if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) fail("malformed header or data");
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1'000'000'000) fail("number too large");
      ++pos_;
    }
    return v;
  }

  const std::vector<std::uint8_t>& bytes_;
  std::string name_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> to_interleaved_u8(const ImageBuf& img) {
  const std::size_t plane = img.plane_size();
  std::vector<std::uint8_t> px(plane * 3);
  for (std::size_t i = 0; i < plane; ++i) {
    for (int c = 0; c < 3; ++c) {
      const float v = std::clamp(img.data[c * plane + i], 0.0f, 1.0f);
      px[3 * i + c] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
    }
  }
  return px;
}

}  // namespace

ImageBuf::ImageBuf(int h, int w, float fill)
    : height(h), width(w), data(static_cast<std::size_t>(3) * h * w, fill) {}

bool ImageBuf::valid() const {
  if (height <= 0 || width <= 0) return false;
  if (data.size() != static_cast<std::size_t>(3) * height * width) return false;
  return std::all_of(data.begin(), data.end(), [](float v) { return std::isfinite(v) && v >= 0.0f && v <= 1.0f; });
}

ImageBuf decode_image(const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = read_file_bytes(path);
  } catch (const IoError& e) {
    throw DecodeError(std::string("unreadable file: ") + e.what());
  }
  static constexpr std::uint8_t kPngSig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  if (bytes.size() >= 8 && std::equal(kPngSig, kPngSig + 8, bytes.begin())) return decode_png(bytes, path.string());
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] >= '1' && bytes[1] <= '7') {
    return PnmReader(bytes, path.string()).read();
  }
  throw DecodeError(path.string() + ": unsupported image format (expected PNG or PPM/PGM)");
}

void write_png(const ImageBuf& img, const std::filesystem::path& path) {
  auto px = to_interleaved_u8(img);
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, px.data(), 0, nullptr)) {
    throw IoError("png encode failed: " + std::string(image.message));
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, px.data(), 0, nullptr)) {
    throw IoError("png encode failed: " + std::string(image.message));
  }
  out.resize(size);
  write_bytes_atomic(path, out);
}

void write_ppm(const ImageBuf& img, const std::filesystem::path& path) {
  const std::string header = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  auto px = to_interleaved_u8(img);
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), px.begin(), px.end());
  write_bytes_atomic(path, out);
}

void require_min_size(const ImageBuf& img, int side) {
  if (img.height < side || img.width < side) {
    throw DimensionError("image is " + std::to_string(img.height) + "x" + std::to_string(img.width) +
                         " (HxW); both sides must be at least " + std::to_string(side));
  }
}

ImageBuf upscale_to_min(const ImageBuf& img, int side) {
  if (img.height >= side && img.width >= side) return img;
  const std::int64_t shorter = std::min(img.height, img.width);
  auto scaled = [&](int extent) {  // ceil(extent * side / shorter) in integers
    return static_cast<int>((static_cast<std::int64_t>(extent) * side + shorter - 1) / shorter);
  };
  const int h = std::max(side, scaled(img.height));
  const int w = std::max(side, scaled(img.width));
  return resize_bilinear(img, h, w);
}

ImageBuf resize_bilinear(const ImageBuf& img, int out_h, int out_w) {
  if (out_h < 1 || out_w < 1) throw DimensionError("resize target must be at least 1x1");
  if (img.height < 1 || img.width < 1) throw DimensionError("cannot resize an empty image");
  ImageBuf out(out_h, out_w);
  kernels::resize_bilinear(img.data, 3, img.height, img.width, out.data, out_h, out_w);
  return out;
}

ImageBuf extract_crop(const ImageBuf& img, const CropRect& rect) {
  if (rect.side < 1 || rect.top < 0 || rect.left < 0 || rect.top + rect.side > img.height ||
      rect.left + rect.side > img.width) {
    throw DimensionError("crop (" + std::to_string(rect.top) + ", " + std::to_string(rect.left) + ", side " +
                         std::to_string(rect.side) + ") is outside a " + std::to_string(img.height) + "x" +
                         std::to_string(img.width) + " image");
  }
  ImageBuf out(rect.side, rect.side);
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < rect.side; ++i) {
      const float* src =
          img.data.data() + c * img.plane_size() + static_cast<std::size_t>(rect.top + i) * img.width + rect.left;
      std::copy(src, src + rect.side, &out.at(c, i, 0));
    }
  }
  return out;
}

ImageBuf quantize_8bit(const ImageBuf& img) {
  ImageBuf out = img;
  for (float& v : out.data) {
    const float c = std::clamp(v, 0.0f, 1.0f);
    v = static_cast<float>(static_cast<double>(std::lround(c * 255.0f)) / 255.0);
  }
  return out;
}

}  // namespace glass
