#pragma once

#include <algorithm>
#include <csetjmp>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "librarylens/color.hpp"
#include "librarylens/error.hpp"

namespace librarylens {

// Row-major 8-bit RGB raster.
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<Rgb8> pixels;

  Image() = default;
  Image(std::size_t w, std::size_t h, Rgb8 fill = {}) : width(w), height(h), pixels(w * h, fill) {}

  std::size_t size() const { return pixels.size(); }
  Rgb8& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
  const Rgb8& at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
  friend bool operator==(const Image&, const Image&) = default;
};

namespace detail {

inline std::optional<Image> decode_png(std::span<const std::uint8_t> bytes, std::string* error) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    if (error) *error = img.message;
    return std::nullopt;
  }
  img.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
    if (error) *error = img.message;
    png_image_free(&img);
    return std::nullopt;
  }
  Image out(img.width, img.height);
  for (std::size_t i = 0; i < out.pixels.size(); ++i)
    out.pixels[i] = {buf[3 * i], buf[3 * i + 1], buf[3 * i + 2]};
  return out;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

inline void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

inline void jpeg_silent(j_common_ptr, int) {}

// Kept free of non-trivial locals across setjmp.
inline bool decode_jpeg_into(std::span<const std::uint8_t> bytes, std::vector<std::uint8_t>& buf,
                             std::size_t& width, std::size_t& height, std::string* error) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager jerr;
  cinfo.err = jpeg_std_error(&jerr.base);
  jerr.base.error_exit = jpeg_error_exit;
  jerr.base.emit_message = jpeg_silent;
  if (setjmp(jerr.jump)) {
    if (error) *error = jerr.message;
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  width = cinfo.output_width;
  height = cinfo.output_height;
  buf.resize(width * height * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW rowp = buf.data() + static_cast<std::size_t>(cinfo.output_scanline) * width * 3;
    jpeg_read_scanlines(&cinfo, &rowp, 1);
  }
  // Truncated streams get padded by libjpeg with a warning; treat that as a failure.
  const bool truncated = cinfo.err->num_warnings > 0;
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  if (truncated) {
    if (error) *error = "truncated JPEG data";
    return false;
  }
  return true;
}

inline std::optional<Image> decode_jpeg(std::span<const std::uint8_t> bytes, std::string* error) {
  std::vector<std::uint8_t> buf;
  std::size_t w = 0, h = 0;
  if (!decode_jpeg_into(bytes, buf, w, h, error)) return std::nullopt;
  Image out(w, h);
  for (std::size_t i = 0; i < out.pixels.size(); ++i)
    out.pixels[i] = {buf[3 * i], buf[3 * i + 1], buf[3 * i + 2]};
  return out;
}

}  // namespace detail

// PNG or JPEG by signature. Failure yields nullopt with a reason in *error.
inline std::optional<Image> decode_image(std::span<const std::uint8_t> bytes, std::string* error = nullptr) {
  static constexpr std::uint8_t kPng[] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  if (bytes.size() >= 8 && std::equal(std::begin(kPng), std::end(kPng), bytes.begin()))
    return detail::decode_png(bytes, error);
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF)
    return detail::decode_jpeg(bytes, error);
  if (error) *error = "unrecognized image signature";
  return std::nullopt;
}

inline std::vector<std::uint8_t> encode_png(const Image& image) {
  if (image.width == 0 || image.height == 0) throw ArgumentError("cannot encode an empty image");
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width);
  img.height = static_cast<png_uint_32>(image.height);
  img.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> raw(image.pixels.size() * 3);
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    raw[3 * i] = image.pixels[i].r;
    raw[3 * i + 1] = image.pixels[i].g;
    raw[3 * i + 2] = image.pixels[i].b;
  }
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&img, nullptr, &size, 0, raw.data(), 0, nullptr))
    throw std::runtime_error(std::string("png sizing failed: ") + img.message);
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, raw.data(), 0, nullptr))
    throw std::runtime_error(std::string("png encode failed: ") + img.message);
  out.resize(size);
  return out;
}

}  // namespace librarylens
