#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "devpool/error.hpp"

namespace devpool {

/*!
    Row-major 2-D grid of finite doubles.

    The tag parameter keeps luminance images and derived fields (gradient
    magnitudes, similarity maps) from being mixed up at call sites while
    sharing one implementation. Instances are immutable once constructed.
*/
template <typename Tag>
class Raster {
public:
    Raster(std::size_t width, std::size_t height, std::vector<double> data)
        : width_(width), height_(height), data_(std::move(data))
    {
        if (width_ == 0 || height_ == 0) {
            throw InvalidInput("raster dimensions must be positive");
        }
        if (data_.size() != width_ * height_) {
            throw InvalidInput("raster data length " + std::to_string(data_.size()) +
                               " does not match " + std::to_string(width_) + "x" +
                               std::to_string(height_));
        }
        for (double v : data_) {
            if (!std::isfinite(v)) {
                throw InvalidInput("raster contains a non-finite value");
            }
        }
    }

    Raster(std::size_t width, std::size_t height, double fill)
        : Raster(width, height, std::vector<double>(width * height, fill))
    {
    }

    [[nodiscard]] std::size_t width() const noexcept { return width_; }
    [[nodiscard]] std::size_t height() const noexcept { return height_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] std::span<const double> values() const& noexcept { return data_; }
    std::span<const double> values() const&& = delete;

    [[nodiscard]] double operator()(std::size_t x, std::size_t y) const noexcept
    {
        return data_[y * width_ + x];
    }

    /// Replicate-padded access: coordinates outside the grid clamp to the nearest edge.
    [[nodiscard]] double clamped(std::ptrdiff_t x, std::ptrdiff_t y) const noexcept
    {
        auto const cx = std::clamp<std::ptrdiff_t>(x, 0, static_cast<std::ptrdiff_t>(width_) - 1);
        auto const cy = std::clamp<std::ptrdiff_t>(y, 0, static_cast<std::ptrdiff_t>(height_) - 1);
        return data_[static_cast<std::size_t>(cy) * width_ + static_cast<std::size_t>(cx)];
    }

    template <typename OtherTag>
    [[nodiscard]] bool same_shape(Raster<OtherTag> const& other) const noexcept
    {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(Raster const&, Raster const&) = default;

private:
    std::size_t width_;
    std::size_t height_;
    std::vector<double> data_;
};

struct GrayTag;
struct FieldTag;

/// Luminance raster, nominal range [0, 255].
using GrayImage = Raster<GrayTag>;
/// Real-valued field: gradient magnitudes and local-similarity maps.
using ScalarField = Raster<FieldTag>;

/// Interleaved 8-bit RGB raster as produced by the decoders.
struct RgbImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> samples; // r, g, b per pixel, row-major
};

using Kernel3x3 = std::array<std::array<double, 3>, 3>;

/// Prewitt horizontal-derivative kernel, normalized by 1/3.
inline constexpr Kernel3x3 prewitt_x{{
    {1.0 / 3.0, 0.0, -1.0 / 3.0},
    {1.0 / 3.0, 0.0, -1.0 / 3.0},
    {1.0 / 3.0, 0.0, -1.0 / 3.0},
}};

/// Prewitt vertical-derivative kernel, normalized by 1/3.
inline constexpr Kernel3x3 prewitt_y{{
    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
    {0.0, 0.0, 0.0},
    {-1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0},
}};

/// BT.601 luma: 0.299 R + 0.587 G + 0.114 B.
inline GrayImage to_grayscale(RgbImage const& rgb)
{
    if (rgb.width == 0 || rgb.height == 0) {
        throw InvalidInput("cannot convert a zero-dimension raster");
    }
    std::size_t const n = rgb.width * rgb.height;
    if (rgb.samples.size() != 3 * n) {
        throw InvalidInput("RGB sample count does not match dimensions");
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = 0.299 * rgb.samples[3 * i] + 0.587 * rgb.samples[3 * i + 1] +
                 0.114 * rgb.samples[3 * i + 2];
    }
    return GrayImage(rgb.width, rgb.height, std::move(out));
}

/// Mean of non-overlapping 2x2 blocks; a trailing odd row or column is dropped.
inline GrayImage downsample2(GrayImage const& img)
{
    if (img.width() < 2 || img.height() < 2) {
        throw InvalidInput("downsample2 needs an image of at least 2x2");
    }
    std::size_t const w = img.width() / 2;
    std::size_t const h = img.height() / 2;
    std::vector<double> out(w * h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            double const s = img(2 * x, 2 * y) + img(2 * x + 1, 2 * y) + img(2 * x, 2 * y + 1) +
                             img(2 * x + 1, 2 * y + 1);
            out[y * w + x] = s / 4.0;
        }
    }
    return GrayImage(w, h, std::move(out));
}

/*!
    3x3 correlation (the kernel is not flipped) with replicate padding.

    kernel[r][c] multiplies the pixel at offset (c - 1, r - 1) from the centre.
*/
template <typename Tag>
ScalarField convolve3x3(Raster<Tag> const& img, Kernel3x3 const& kernel)
{
    for (auto const& row : kernel) {
        for (double k : row) {
            if (!std::isfinite(k)) {
                throw InvalidInput("kernel entries must be finite");
            }
        }
    }
    std::size_t const w = img.width();
    std::size_t const h = img.height();
    std::vector<double> out(w * h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            double acc = 0.0;
            for (std::ptrdiff_t dy = -1; dy <= 1; ++dy) {
                for (std::ptrdiff_t dx = -1; dx <= 1; ++dx) {
                    acc += kernel[dy + 1][dx + 1] *
                           img.clamped(static_cast<std::ptrdiff_t>(x) + dx, static_cast<std::ptrdiff_t>(y) + dy);
                }
            }
            out[y * w + x] = acc;
        }
    }
    return ScalarField(w, h, std::move(out));
}

/*!
    Prewitt gradient magnitude sqrt(gx^2 + gy^2), kernels normalized by 1/3.

    Equivalent to convolve3x3 with prewitt_x / prewitt_y, but evaluated as
    sums of pixel differences so that adding a constant to an integer-valued
    image leaves the result bit-identical.
*/
inline ScalarField gradient_magnitude_prewitt(GrayImage const& img)
{
    std::size_t const w = img.width();
    std::size_t const h = img.height();
    std::vector<double> out(w * h);
    for (std::size_t y = 0; y < h; ++y) {
        auto const iy = static_cast<std::ptrdiff_t>(y);
        for (std::size_t x = 0; x < w; ++x) {
            auto const ix = static_cast<std::ptrdiff_t>(x);
            double dx = 0.0;
            double dy = 0.0;
            for (std::ptrdiff_t d = -1; d <= 1; ++d) {
                dx += img.clamped(ix - 1, iy + d) - img.clamped(ix + 1, iy + d);
                dy += img.clamped(ix + d, iy - 1) - img.clamped(ix + d, iy + 1);
            }
            dx /= 3.0;
            dy /= 3.0;
            out[y * w + x] = std::sqrt(dx * dx + dy * dy);
        }
    }
    return ScalarField(w, h, std::move(out));
}

} // namespace devpool
