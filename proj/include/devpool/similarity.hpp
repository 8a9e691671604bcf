#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "devpool/error.hpp"
#include "devpool/raster.hpp"

namespace devpool {

struct GmsParams {
    /// Stability constant, in squared-gradient units of [0, 255] luminance.
    double c = 170.0;

    void validate() const
    {
        if (!(c > 0.0) || !std::isfinite(c)) {
            throw InvalidInput("GMS constant c must be positive");
        }
    }

    friend bool operator==(GmsParams const&, GmsParams const&) = default;
};

struct SsimParams {
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 255.0;
    std::size_t window = 11;
    double sigma = 1.5;

    void validate() const
    {
        if (!(k1 > 0.0 && k1 < 1.0) || !(k2 > 0.0 && k2 < 1.0)) {
            throw InvalidInput("SSIM constants k1, k2 must lie in (0, 1)");
        }
        if (!(dynamic_range > 0.0) || !std::isfinite(dynamic_range)) {
            throw InvalidInput("SSIM dynamic range must be positive");
        }
        if (window < 3 || window % 2 == 0) {
            throw InvalidInput("SSIM window must be odd and at least 3");
        }
        if (!(sigma > 0.0) || !std::isfinite(sigma)) {
            throw InvalidInput("SSIM window sigma must be positive");
        }
    }

    friend bool operator==(SsimParams const&, SsimParams const&) = default;
};

namespace detail {

inline void require_same_shape(GrayImage const& a, GrayImage const& b)
{
    if (!a.same_shape(b)) {
        throw InvalidInput("image dimensions differ: " + std::to_string(a.width()) + "x" +
                           std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                           std::to_string(b.height()));
    }
}

// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
inline std::vector<double> gaussian_taps(std::size_t size, double sigma)
{
    std::vector<double> taps(size);
    auto const half = static_cast<double>(size / 2);
    double sum = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        double const x = static_cast<double>(i) - half;
        taps[i] = std::exp(-(x * x) / (2.0 * sigma * sigma));
        sum += taps[i];
    }
    for (double& t : taps) {
        t /= sum;
    }
    return taps;
}

// Separable 'valid' filtering: output is (w - k + 1) x (h - k + 1).
inline std::vector<double> filter_valid(std::vector<double> const& img, std::size_t w, std::size_t h,
                                        std::vector<double> const& taps)
{
    std::size_t const k = taps.size();
    std::size_t const ow = w - k + 1;
    std::size_t const oh = h - k + 1;
    std::vector<double> rows(ow * h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (std::size_t t = 0; t < k; ++t) {
                acc += taps[t] * img[y * w + x + t];
            }
            rows[y * ow + x] = acc;
        }
    }
    std::vector<double> out(ow * oh);
    for (std::size_t y = 0; y < oh; ++y) {
        for (std::size_t x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (std::size_t t = 0; t < k; ++t) {
                acc += taps[t] * rows[(y + t) * ow + x];
            }
            out[y * ow + x] = acc;
        }
    }
    return out;
}

} // namespace detail

/// Per-pixel (2 G_r G_d + c) / (G_r^2 + G_d^2 + c) over Prewitt gradient magnitudes.
inline ScalarField gms_map(GrayImage const& ref, GrayImage const& dist, GmsParams const& p = {})
{
    detail::require_same_shape(ref, dist);
    p.validate();
    ScalarField const gr = gradient_magnitude_prewitt(ref);
    ScalarField const gd = gradient_magnitude_prewitt(dist);
    auto const r = gr.values();
    auto const d = gd.values();
    std::vector<double> out(r.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = (2.0 * r[i] * d[i] + p.c) / (r[i] * r[i] + d[i] * d[i] + p.c);
    }
    return ScalarField(ref.width(), ref.height(), std::move(out));
}

/// Per-pixel squared error; its mean is the MSE of the pair.
inline ScalarField mse_map(GrayImage const& ref, GrayImage const& dist)
{
    detail::require_same_shape(ref, dist);
    auto const r = ref.values();
    auto const d = dist.values();
    std::vector<double> out(r.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double const e = r[i] - d[i];
        out[i] = e * e;
    }
    return ScalarField(ref.width(), ref.height(), std::move(out));
}

/*!
    Local SSIM (luminance x contrast x structure) under a Gaussian window.

    Statistics are taken only where the window fits entirely inside the image,
    so the map is (w - window + 1) x (h - window + 1).
*/
inline ScalarField ssim_map(GrayImage const& ref, GrayImage const& dist, SsimParams const& p = {})
{
    detail::require_same_shape(ref, dist);
    p.validate();
    std::size_t const w = ref.width();
    std::size_t const h = ref.height();
    if (w < p.window || h < p.window) {
        throw InvalidInput("image is smaller than the SSIM window");
    }
    auto const taps = detail::gaussian_taps(p.window, p.sigma);
    auto const r = ref.values();
    auto const d = dist.values();
    std::vector<double> const x(r.begin(), r.end());
    std::vector<double> const y(d.begin(), d.end());
    std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    auto const mu_x = detail::filter_valid(x, w, h, taps);
    auto const mu_y = detail::filter_valid(y, w, h, taps);
    auto const e_xx = detail::filter_valid(xx, w, h, taps);
    auto const e_yy = detail::filter_valid(yy, w, h, taps);
    auto const e_xy = detail::filter_valid(xy, w, h, taps);

    double const c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
    double const c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);
    std::vector<double> out(mu_x.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double const mx2 = mu_x[i] * mu_x[i];
        double const my2 = mu_y[i] * mu_y[i];
        double const mxy = mu_x[i] * mu_y[i];
        double const vx = e_xx[i] - mx2;
        double const vy = e_yy[i] - my2;
        double const cov = e_xy[i] - mxy;
        out[i] = ((2.0 * mxy + c1) * (2.0 * cov + c2)) / ((mx2 + my2 + c1) * (vx + vy + c2));
    }
    return ScalarField(w - p.window + 1, h - p.window + 1, std::move(out));
}

} // namespace devpool
