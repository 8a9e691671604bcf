#pragma once

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "devpool/devpool.hpp"

namespace devpool::test {

/// 8-px checkerboard (60 / 190) over a gentle ramp and a low-frequency ripple.
inline GrayImage checkerboard_scene(std::size_t w = 64, std::size_t h = 64)
{
    std::vector<double> v(w * h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            bool const dark = ((x / 8) + (y / 8)) % 2 == 0;
            double const ramp = 20.0 * static_cast<double>(x) / static_cast<double>(w);
            double const ripple = 6.0 * std::sin(0.3 * static_cast<double>(x) + 0.2 * static_cast<double>(y));
            v[y * w + x] = (dark ? 60.0 : 190.0) + ramp + ripple;
        }
    }
    return GrayImage(w, h, std::move(v));
}

/// Standard normal field, fixed by seed.
inline std::vector<double> noise_field(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> z(n);
    for (double& v : z) {
        v = normal(rng);
    }
    return z;
}

/// img + sigma * z, the same z for every sigma so distortions are nested.
inline GrayImage add_noise(GrayImage const& img, double sigma, std::uint64_t seed)
{
    auto const z = noise_field(img.size(), seed);
    std::vector<double> v(img.values().begin(), img.values().end());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] += sigma * z[i];
    }
    return GrayImage(img.width(), img.height(), std::move(v));
}

/// Uniform random image in [lo, hi].
inline GrayImage random_image(std::size_t w, std::size_t h, std::mt19937_64& rng, double lo = 0.0, double hi = 255.0)
{
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(w * h);
    for (double& x : v) {
        x = u(rng);
    }
    return GrayImage(w, h, std::move(v));
}

/// Rounds to integers in [0, 255], as an 8-bit file would store them.
inline GrayImage quantize(GrayImage const& img)
{
    std::vector<double> v(img.values().begin(), img.values().end());
    for (double& x : v) {
        x = std::clamp(std::round(x), 0.0, 255.0);
    }
    return GrayImage(img.width(), img.height(), std::move(v));
}

inline std::vector<double> random_values(std::size_t n, std::mt19937_64& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) {
        x = u(rng);
    }
    return v;
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir()
    {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("devpool-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    TempDir(TempDir const&) = delete;
    TempDir& operator=(TempDir const&) = delete;
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }

    [[nodiscard]] std::filesystem::path const& path() const { return path_; }
    [[nodiscard]] std::filesystem::path operator/(std::string const& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/*!
    Writes the nested-noise fixture: one reference plus `levels` distorted
    copies with sigma = step * k, and a manifest whose MOS falls with sigma.
    Returns the manifest path.
*/
inline std::filesystem::path write_noise_manifest(TempDir const& dir, std::size_t levels = 20, double step = 2.0,
                                                  std::uint64_t seed = 7)
{
    GrayImage const ref = checkerboard_scene();
    write_png(dir / "ref.png", ref);
    std::ofstream m(dir / "manifest.csv");
    m << "ref,dist,mos,tag\n";
    for (std::size_t k = 1; k <= levels; ++k) {
        std::string const name = "noise_" + std::to_string(k) + ".png";
        write_png(dir / name, add_noise(ref, step * static_cast<double>(k), seed));
        m << "ref.png," << name << ',' << 100.0 - 2.5 * static_cast<double>(k) << ",noise\n";
    }
    return dir / "manifest.csv";
}

} // namespace devpool::test
