#include "cofkit/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>

namespace cofkit {
namespace {

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError(path, "file cannot be opened");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ColorImage from_bytes(int width, int height, int channels, const std::uint8_t* bytes) {
  ColorImage img(width, height);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    double* px = img.pixel(i);
    const std::uint8_t* src = bytes + i * channels;
    for (int c = 0; c < 3; ++c) px[c] = src[channels == 1 ? 0 : c] / 255.0;
  }
  return img;
}

ColorImage decode_png_impl(const std::vector<std::uint8_t>& bytes, const std::string& name,
                           std::size_t max_pixels) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw DecodeError(name, image.message);
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw DecodeError(name, "unsupported bit depth (only 8-bit PNG is accepted)");
  }
  const std::size_t pixels = static_cast<std::size_t>(image.width) * image.height;
  if (max_pixels != 0 && pixels > max_pixels) {
    png_image_free(&image);
    throw ImageTooLarge("image has " + std::to_string(pixels) + " pixels, limit is " +
                        std::to_string(max_pixels));
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string reason = image.message;
    png_image_free(&image);
    throw DecodeError(name, reason);
  }
  return from_bytes(static_cast<int>(image.width), static_cast<int>(image.height), 3,
                    buffer.data());
}

// Binary netpbm: P6 (RGB) and P5 (gray), maxval 255 only.
ColorImage decode_pnm(const std::vector<std::uint8_t>& bytes, const std::string& path) {
  std::size_t pos = 2;
  auto next_token = [&]() -> long {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    long value = 0;
    bool any = false;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      value = value * 10 + (bytes[pos] - '0');
      if (value > (1L << 30)) throw DecodeError(path, "header value out of range");
      ++pos;
      any = true;
    }
    if (!any) throw DecodeError(path, "malformed netpbm header");
    return value;
  };
  const int channels = bytes[1] == '6' ? 3 : 1;
  const long width = next_token();
  const long height = next_token();
  const long maxval = next_token();
  if (maxval != 255) throw DecodeError(path, "unsupported bit depth (maxval must be 255)");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw DecodeError(path, "malformed header");
  ++pos;
  const std::size_t need = static_cast<std::size_t>(width) * height * channels;
  if (bytes.size() - pos < need) throw DecodeError(path, "truncated pixel data");
  return from_bytes(static_cast<int>(width), static_cast<int>(height), channels, bytes.data() + pos);
}

std::vector<std::uint8_t> encode_bytes(int width, int height, bool gray,
                                       const std::vector<std::uint8_t>& pixels,
                                       const std::string& name) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels.data(), 0, nullptr)) {
    throw EncodeError(name, image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels.data(), 0, nullptr)) {
    throw EncodeError(name, image.message);
  }
  out.resize(size);
  return out;
}

template <typename Image>
std::vector<std::uint8_t> to_levels(const Image& img) {
  std::vector<std::uint8_t> levels(img.data.size());
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    levels[i] = static_cast<std::uint8_t>(to_level(img.data[i]));
  }
  return levels;
}

void write_file(const std::vector<std::uint8_t>& bytes, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw EncodeError(path, "file cannot be opened for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw EncodeError(path, "write failed");
}

}  // namespace

ColorImage load_image(const std::string& path) {
  const auto bytes = read_file(path);
  if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) {
    return decode_png_impl(bytes, path, 0);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) {
    return decode_pnm(bytes, path);
  }
  throw DecodeError(path, "unsupported format (expected PNG, P5 or P6)");
}

ColorImage decode_png(const std::vector<std::uint8_t>& bytes, std::size_t max_pixels) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw DecodeError("<memory>", "not a PNG stream");
  }
  return decode_png_impl(bytes, "<memory>", max_pixels);
}

std::vector<std::uint8_t> encode_png(const ColorImage& img) {
  return encode_bytes(img.width, img.height, false, to_levels(img), "<memory>");
}

std::vector<std::uint8_t> encode_png(const GrayImage& img) {
  return encode_bytes(img.width, img.height, true, to_levels(img), "<memory>");
}

void save_image(const ColorImage& img, const std::string& path) {
  write_file(encode_bytes(img.width, img.height, false, to_levels(img), path), path);
}

void save_image(const GrayImage& img, const std::string& path) {
  write_file(encode_bytes(img.width, img.height, true, to_levels(img), path), path);
}

RegionMask load_mask(const std::string& path) {
  const ColorImage img = load_image(path);
  RegionMask mask(img.width, img.height, false);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const double* px = img.pixel(i);
    mask.inside[i] = (px[0] + px[1] + px[2]) / 3.0 >= 0.5 ? 1 : 0;
  }
  return mask;
}

void save_mask(const RegionMask& mask, const std::string& path) {
  GrayImage img(mask.width, mask.height);
  for (std::size_t i = 0; i < mask.inside.size(); ++i) img.data[i] = mask.inside[i] ? 1.0 : 0.0;
  save_image(img, path);
}

}  // namespace cofkit
