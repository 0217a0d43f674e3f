#include "groundpose/app/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace groundpose::app {

namespace fs = std::filesystem;

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open(const fs::path& path, const char* mode) {
  File f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open " + path.string());
  return f;
}

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

// libpng reports through these instead of printing to stderr.
thread_local std::string png_message;

void on_png_error(png_structp png, png_const_charp msg) {
  png_message = msg ? msg : "";
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

ImageBuffer read_png(const fs::path& path) {
  File f = open(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, on_png_error, on_png_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng initialization failed for " + path.string());
  }
  std::vector<png_bytep> rows;
  std::vector<std::uint8_t> data;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("malformed PNG: " + path.string() + " (" + png_message + ")");
  }
  png_init_io(png, f.get());
  png_read_info(png, info);
  const int width = static_cast<int>(png_get_image_width(png, info));
  const int height = static_cast<int>(png_get_image_height(png, info));
  const int color = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (depth == 16) png_set_swap(png);  // host order on little-endian
  png_read_update_info(png, info);
  depth = png_get_bit_depth(png, info);
  const int channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  data.resize(stride * static_cast<std::size_t>(height));
  rows.resize(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) rows[static_cast<std::size_t>(y)] = data.data() + stride * y;
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);

  ImageBuffer img(width, height);
  const double full = depth == 16 ? 65535.0 : 255.0;
  for (int y = 0; y < height; ++y) {
    const std::uint8_t* row = rows[static_cast<std::size_t>(y)];
    for (int x = 0; x < width; ++x) {
      double c[3] = {0.0, 0.0, 0.0};
      for (int k = 0; k < std::min(channels, 3); ++k) {
        const int i = x * channels + k;
        c[k] = depth == 16 ? reinterpret_cast<const std::uint16_t*>(row)[i] : row[i];
      }
      const double value = channels >= 3 ? 0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2] : c[0];
      img.at(x, y) = static_cast<float>(value / full);
    }
  }
  return img;
}

ImageBuffer read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  auto token = [&]() {
    std::string t;
    while (in >> std::ws && in.peek() == '#') std::getline(in, t);
    in >> t;
    return t;
  };
  const std::string magic = token();
  if (magic != "P2" && magic != "P5") throw IoError("not a PGM file: " + path.string());
  int width = 0, height = 0, maxval = 0;
  try {
    width = std::stoi(token());
    height = std::stoi(token());
    maxval = std::stoi(token());
  } catch (const std::exception&) {
    throw IoError("malformed PGM header: " + path.string());
  }
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) throw IoError("malformed PGM header: " + path.string());
  ImageBuffer img(width, height);
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  auto px = img.pixels();
  if (magic == "P2") {
    for (std::size_t i = 0; i < n; ++i) {
      int v = 0;
      if (!(in >> v)) throw IoError("truncated PGM: " + path.string());
      px[i] = static_cast<float>(v / static_cast<double>(maxval));
    }
  } else {
    in.get();
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(n * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw IoError("truncated PGM: " + path.string());
    for (std::size_t i = 0; i < n; ++i) {
      const int v = bytes == 2 ? (raw[2 * i] << 8) | raw[2 * i + 1] : raw[i];
      px[i] = static_cast<float>(v / static_cast<double>(maxval));
    }
  }
  return img;
}

void write_png_rows(const fs::path& path, int width, int height, int color_type, int depth,
                    const std::vector<std::uint8_t>& data) {
  File f = open(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, on_png_error, on_png_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialization failed for " + path.string());
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("cannot write " + path.string() + " (" + png_message + ")");
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const int channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
  const std::size_t stride = static_cast<std::size_t>(width) * channels * (depth / 8);
  for (int y = 0; y < height; ++y)
    png_write_row(png, const_cast<png_bytep>(data.data() + stride * static_cast<std::size_t>(y)));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

ImageBuffer read_image(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("missing file: " + path.string());
  const std::string ext = lower_extension(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".pgm") return read_pgm(path);
  throw IoError("unsupported image format: " + path.string());
}

Mask read_mask(const fs::path& path) {
  const ImageBuffer img = read_image(path);
  Mask mask(img.width(), img.height(), 0);
  const auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) mask.bits[i] = px[i] > 0.0f ? 1 : 0;
  return mask;
}

void write_png(const fs::path& path, const ImageBuffer& img, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) throw std::invalid_argument("bit depth must be 8 or 16");
  const double full = bit_depth == 16 ? 65535.0 : 255.0;
  const auto px = img.pixels();
  std::vector<std::uint8_t> data(px.size() * (bit_depth / 8));
  for (std::size_t i = 0; i < px.size(); ++i) {
    const auto v = static_cast<unsigned>(std::lround(std::clamp(static_cast<double>(px[i]), 0.0, 1.0) * full));
    if (bit_depth == 16) {
      data[2 * i] = static_cast<std::uint8_t>(v >> 8);  // PNG stores big-endian samples
      data[2 * i + 1] = static_cast<std::uint8_t>(v & 0xff);
    } else {
      data[i] = static_cast<std::uint8_t>(v);
    }
  }
  write_png_rows(path, img.width(), img.height(), PNG_COLOR_TYPE_GRAY, bit_depth, data);
}

void write_png(const fs::path& path, const RgbImage& img) {
  write_png_rows(path, img.width, img.height, PNG_COLOR_TYPE_RGB, 8, img.data);
}

std::vector<fs::path> list_frames(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("input is not a directory: " + dir.string());
  std::vector<fs::path> frames;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = lower_extension(entry.path());
    if (ext == ".png" || ext == ".pgm") frames.push_back(entry.path());
  }
  std::sort(frames.begin(), frames.end());
  return frames;
}

}  // namespace groundpose::app
