#pragma once

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <variant>
#include <vector>

#include "devpool/error.hpp"
#include "devpool/raster.hpp"

namespace devpool {

/// A decoded 8-bit file: single-channel files stay gray, everything else becomes RGB.
using DecodedImage = std::variant<GrayImage, RgbImage>;

namespace detail {

inline std::vector<std::uint8_t> read_file_bytes(std::filesystem::path const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DecodeError("cannot open '" + path.string() + "'");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline GrayImage gray_from_bytes(std::size_t w, std::size_t h, std::vector<std::uint8_t> const& bytes)
{
    return GrayImage(w, h, std::vector<double>(bytes.begin(), bytes.end()));
}

inline DecodedImage decode_png(std::vector<std::uint8_t> const& bytes, std::string const& name)
{
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        throw DecodeError("'" + name + "': " + image.message);
    }
    bool const color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw DecodeError("'" + name + "': " + msg);
    }
    std::size_t const w = image.width;
    std::size_t const h = image.height;
    if (w == 0 || h == 0) {
        throw DecodeError("'" + name + "': zero-dimension image");
    }
    if (!color) {
        return gray_from_bytes(w, h, pixels);
    }
    return RgbImage{w, h, std::move(pixels)};
}

inline std::uint32_t le32(std::vector<std::uint8_t> const& b, std::size_t off)
{
    return static_cast<std::uint32_t>(b[off]) | static_cast<std::uint32_t>(b[off + 1]) << 8 |
           static_cast<std::uint32_t>(b[off + 2]) << 16 | static_cast<std::uint32_t>(b[off + 3]) << 24;
}

inline std::uint16_t le16(std::vector<std::uint8_t> const& b, std::size_t off)
{
    return static_cast<std::uint16_t>(b[off] | b[off + 1] << 8);
}

// Uncompressed BMP (BI_RGB) with 8-bit palette, 24-bit or 32-bit pixels.
inline DecodedImage decode_bmp(std::vector<std::uint8_t> const& b, std::string const& name)
{
    auto fail = [&](std::string const& why) { return DecodeError("'" + name + "': " + why); };
    if (b.size() < 54) {
        throw fail("truncated BMP header");
    }
    std::uint32_t const data_offset = le32(b, 10);
    std::uint32_t const header_size = le32(b, 14);
    if (header_size < 40) {
        throw fail("unsupported BMP header version");
    }
    auto const width = static_cast<std::int32_t>(le32(b, 18));
    auto const signed_height = static_cast<std::int32_t>(le32(b, 22));
    std::uint16_t const bpp = le16(b, 28);
    std::uint32_t const compression = le32(b, 30);
    if (compression != 0) {
        throw fail("compressed BMP is not supported");
    }
    if (width <= 0 || signed_height == 0) {
        throw fail("zero-dimension image");
    }
    if (bpp != 8 && bpp != 24 && bpp != 32) {
        throw fail("unsupported bit depth " + std::to_string(bpp));
    }
    bool const top_down = signed_height < 0;
    auto const w = static_cast<std::size_t>(width);
    auto const h = static_cast<std::size_t>(top_down ? -static_cast<std::int64_t>(signed_height) : signed_height);
    std::size_t const stride = ((w * bpp + 31) / 32) * 4;
    if (data_offset > b.size() || (b.size() - data_offset) / stride < h) {
        throw fail("truncated pixel data");
    }

    std::vector<std::array<std::uint8_t, 3>> palette;
    if (bpp == 8) {
        std::uint32_t colors = le32(b, 46);
        if (colors == 0) {
            colors = 256;
        }
        std::size_t const pal_off = 14 + header_size;
        if (pal_off + 4 * static_cast<std::size_t>(colors) > data_offset) {
            throw fail("truncated palette");
        }
        for (std::uint32_t i = 0; i < colors; ++i) {
            std::size_t const o = pal_off + 4 * i;
            palette.push_back({b[o + 2], b[o + 1], b[o]}); // stored BGRx
        }
    }

    std::vector<std::uint8_t> rgb(3 * w * h);
    bool gray = true;
    for (std::size_t row = 0; row < h; ++row) {
        std::size_t const src_row = top_down ? row : h - 1 - row;
        std::uint8_t const* p = b.data() + data_offset + src_row * stride;
        for (std::size_t x = 0; x < w; ++x) {
            std::array<std::uint8_t, 3> px{};
            if (bpp == 8) {
                if (p[x] >= palette.size()) {
                    throw fail("palette index out of range");
                }
                px = palette[p[x]];
            } else {
                std::size_t const bytes_pp = bpp / 8;
                px = {p[x * bytes_pp + 2], p[x * bytes_pp + 1], p[x * bytes_pp]};
            }
            gray = gray && px[0] == px[1] && px[1] == px[2];
            std::copy(px.begin(), px.end(), rgb.begin() + static_cast<std::ptrdiff_t>(3 * (row * w + x)));
        }
    }
    if (bpp == 8 && gray) {
        std::vector<std::uint8_t> luma(w * h);
        for (std::size_t i = 0; i < luma.size(); ++i) {
            luma[i] = rgb[3 * i];
        }
        return gray_from_bytes(w, h, luma);
    }
    return RgbImage{w, h, std::move(rgb)};
}

inline std::uint8_t to_byte(double v)
{
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

} // namespace detail

/// Decodes an 8-bit PNG or uncompressed BMP, sniffing the format from its signature.
inline DecodedImage decode_image(std::filesystem::path const& path)
{
    auto const bytes = detail::read_file_bytes(path);
    static constexpr std::array<std::uint8_t, 8> png_sig{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (bytes.size() >= png_sig.size() && std::equal(png_sig.begin(), png_sig.end(), bytes.begin())) {
        return detail::decode_png(bytes, path.string());
    }
    if (bytes.size() >= 2 && bytes[0] == 'B' && bytes[1] == 'M') {
        return detail::decode_bmp(bytes, path.string());
    }
    throw DecodeError("'" + path.string() + "': not a PNG or BMP file");
}

inline std::size_t image_width(DecodedImage const& img)
{
    return std::visit([](auto const& i) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(i)>, RgbImage>) {
            return i.width;
        } else {
            return i.width();
        }
    }, img);
}

inline std::size_t image_height(DecodedImage const& img)
{
    return std::visit([](auto const& i) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(i)>, RgbImage>) {
            return i.height;
        } else {
            return i.height();
        }
    }, img);
}

/// Writes an 8-bit grayscale PNG; values are rounded and clamped to [0, 255].
inline void write_png(std::filesystem::path const& path, GrayImage const& img)
{
    std::vector<std::uint8_t> bytes(img.size());
    std::transform(img.values().begin(), img.values().end(), bytes.begin(), detail::to_byte);
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    image.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, bytes.data(), 0, nullptr)) {
        throw Error("cannot write '" + path.string() + "': " + image.message);
    }
}

inline void write_png(std::filesystem::path const& path, RgbImage const& img)
{
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width);
    image.height = static_cast<png_uint_32>(img.height);
    image.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, img.samples.data(), 0, nullptr)) {
        throw Error("cannot write '" + path.string() + "': " + image.message);
    }
}

/// Writes a bottom-up 24-bit BMP.
inline void write_bmp(std::filesystem::path const& path, RgbImage const& img)
{
    std::size_t const stride = ((img.width * 24 + 31) / 32) * 4;
    std::size_t const data_size = stride * img.height;
    std::vector<std::uint8_t> out(54 + data_size, 0);
    auto put32 = [&](std::size_t off, std::uint32_t v) {
        for (int i = 0; i < 4; ++i) {
            out[off + i] = static_cast<std::uint8_t>(v >> (8 * i));
        }
    };
    out[0] = 'B';
    out[1] = 'M';
    put32(2, static_cast<std::uint32_t>(out.size()));
    put32(10, 54);
    put32(14, 40);
    put32(18, static_cast<std::uint32_t>(img.width));
    put32(22, static_cast<std::uint32_t>(img.height));
    out[26] = 1;
    out[28] = 24;
    put32(34, static_cast<std::uint32_t>(data_size));
    for (std::size_t y = 0; y < img.height; ++y) {
        std::uint8_t* row = out.data() + 54 + (img.height - 1 - y) * stride;
        for (std::size_t x = 0; x < img.width; ++x) {
            std::size_t const s = 3 * (y * img.width + x);
            row[3 * x] = img.samples[s + 2];
            row[3 * x + 1] = img.samples[s + 1];
            row[3 * x + 2] = img.samples[s];
        }
    }
    std::ofstream f(path, std::ios::binary);
    f.write(reinterpret_cast<char const*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) {
        throw Error("cannot write '" + path.string() + "'");
    }
}

} // namespace devpool
