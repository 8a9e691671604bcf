#pragma once

#include <algorithm>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "devpool/error.hpp"
#include "devpool/image_io.hpp"
#include "devpool/pooling.hpp"
#include "devpool/raster.hpp"
#include "devpool/similarity.hpp"

namespace devpool {

enum class MapKind { GMS, MSE, SSIM };

enum class Polarity { HigherIsBetter, LowerIsBetter };

struct Preprocess {
    bool grayscale = true;
    bool downsample2 = false;

    friend bool operator==(Preprocess const&, Preprocess const&) = default;
};

using MapParams = std::variant<std::monostate, GmsParams, SsimParams>;

/// A named quality index: preprocessing, similarity map, pooling and score polarity.
struct IndexSpec {
    std::string name;
    MapKind map_kind = MapKind::GMS;
    Preprocess preprocess;
    PoolingSpec pooling;
    Polarity polarity = Polarity::LowerIsBetter;
    MapParams map_params;

    void validate() const;
};

struct QualityScore {
    double value = 0.0;
    std::string index_name;
};

inline std::string_view to_string(MapKind k)
{
    switch (k) {
    case MapKind::GMS: return "gms";
    case MapKind::MSE: return "mse";
    case MapKind::SSIM: return "ssim";
    }
    return "?";
}

inline std::string_view to_string(Polarity p)
{
    return p == Polarity::HigherIsBetter ? "higher-is-better" : "lower-is-better";
}

inline MapKind parse_map_kind(std::string_view s)
{
    for (auto k : {MapKind::GMS, MapKind::MSE, MapKind::SSIM}) {
        if (s == to_string(k)) {
            return k;
        }
    }
    throw InvalidInput("unknown map kind '" + std::string(s) + "'");
}

inline Polarity parse_polarity(std::string_view s)
{
    if (s == "higher-is-better" || s == "higher") {
        return Polarity::HigherIsBetter;
    }
    if (s == "lower-is-better" || s == "lower") {
        return Polarity::LowerIsBetter;
    }
    throw InvalidInput("unknown polarity '" + std::string(s) + "'");
}

/// Deviations and every MSE-derived score fall with quality; similarity means rise with it.
inline Polarity expected_polarity(MapKind map, Strategy strategy)
{
    bool const deviation = strategy != Strategy::Mean && strategy != Strategy::WeightedMean;
    if (map == MapKind::MSE || deviation) {
        return Polarity::LowerIsBetter;
    }
    return Polarity::HigherIsBetter;
}

inline MapParams default_map_params(MapKind map)
{
    switch (map) {
    case MapKind::GMS: return GmsParams{};
    case MapKind::SSIM: return SsimParams{};
    case MapKind::MSE: return std::monostate{};
    }
    return std::monostate{};
}

inline void IndexSpec::validate() const
{
    if (name.empty()) {
        throw InvalidInput("index name must not be empty");
    }
    pooling.validate();
    if (pooling.strategy == Strategy::WeightedMean) {
        // Weights are per-pair data; no map in the registry produces them.
        throw InvalidInput("index '" + name + "': weighted-mean pooling is not available for indices");
    }
    switch (map_kind) {
    case MapKind::GMS:
        if (!std::holds_alternative<GmsParams>(map_params)) {
            throw InvalidInput("index '" + name + "': GMS map needs GMS parameters");
        }
        std::get<GmsParams>(map_params).validate();
        break;
    case MapKind::SSIM:
        if (!std::holds_alternative<SsimParams>(map_params)) {
            throw InvalidInput("index '" + name + "': SSIM map needs SSIM parameters");
        }
        std::get<SsimParams>(map_params).validate();
        break;
    case MapKind::MSE:
        if (!std::holds_alternative<std::monostate>(map_params)) {
            throw InvalidInput("index '" + name + "': MSE map takes no parameters");
        }
        break;
    }
}

namespace detail {

inline IndexSpec make_index(std::string name, MapKind map, bool downsample, PoolingSpec pooling)
{
    IndexSpec spec;
    spec.name = std::move(name);
    spec.map_kind = map;
    spec.preprocess = Preprocess{.grayscale = true, .downsample2 = downsample};
    spec.polarity = expected_polarity(map, pooling.strategy);
    spec.pooling = std::move(pooling);
    spec.map_params = default_map_params(map);
    return spec;
}

} // namespace detail

/*!
    The ten built-in presets.

    MSE and SSIM variants run at full resolution; GMS variants downsample by
    two first, following the GMSD reference implementation.
*/
inline std::vector<IndexSpec> builtin_indices()
{
    using detail::make_index;
    return {
        make_index("mse", MapKind::MSE, false, PoolingSpec::mean()),
        make_index("mse-sd", MapKind::MSE, false, PoolingSpec::sd()),
        make_index("mse-mad", MapKind::MSE, false, PoolingSpec::mad()),
        make_index("ssim", MapKind::SSIM, false, PoolingSpec::mean()),
        make_index("ssim-sd", MapKind::SSIM, false, PoolingSpec::sd()),
        make_index("ssim-mad", MapKind::SSIM, false, PoolingSpec::mad()),
        make_index("gms-mean", MapKind::GMS, true, PoolingSpec::mean()),
        make_index("gmsd", MapKind::GMS, true, PoolingSpec::sd()),
        make_index("gms-mad", MapKind::GMS, true, PoolingSpec::mad()),
        make_index("gms-dd", MapKind::GMS, true, PoolingSpec::dd(0.5)),
    };
}

inline std::optional<IndexSpec> find_index(std::string_view name)
{
    auto all = builtin_indices();
    auto it = std::find_if(all.begin(), all.end(), [&](IndexSpec const& s) { return s.name == name; });
    if (it == all.end()) {
        return std::nullopt;
    }
    return std::move(*it);
}

namespace detail {

inline GrayImage preprocess_image(DecodedImage const& img, Preprocess const& pre)
{
    GrayImage gray = std::visit(
        [&](auto const& i) -> GrayImage {
            if constexpr (std::is_same_v<std::decay_t<decltype(i)>, RgbImage>) {
                if (!pre.grayscale) {
                    throw InvalidInput("color input requires grayscale preprocessing");
                }
                return to_grayscale(i);
            } else {
                return i;
            }
        },
        img);
    return pre.downsample2 ? downsample2(gray) : gray;
}

} // namespace detail

/// Builds the similarity map of an already preprocessed pair.
inline ScalarField similarity_map(GrayImage const& ref, GrayImage const& dist, IndexSpec const& spec)
{
    switch (spec.map_kind) {
    case MapKind::GMS: return gms_map(ref, dist, std::get<GmsParams>(spec.map_params));
    case MapKind::MSE: return mse_map(ref, dist);
    case MapKind::SSIM: return ssim_map(ref, dist, std::get<SsimParams>(spec.map_params));
    }
    throw InvalidInput("unknown map kind");
}

/// Preprocesses both images identically, builds the map and pools it.
inline QualityScore score_pair(DecodedImage const& ref, DecodedImage const& dist, IndexSpec const& spec)
{
    spec.validate();
    if (image_width(ref) != image_width(dist) || image_height(ref) != image_height(dist)) {
        throw InvalidInput("reference and distorted images differ in size");
    }
    GrayImage const r = detail::preprocess_image(ref, spec.preprocess);
    GrayImage const d = detail::preprocess_image(dist, spec.preprocess);
    ScalarField const map = similarity_map(r, d, spec);
    return QualityScore{pool(map, spec.pooling).value, spec.name};
}

inline QualityScore score_files(std::filesystem::path const& ref, std::filesystem::path const& dist,
                                IndexSpec const& spec)
{
    return score_pair(decode_image(ref), decode_image(dist), spec);
}

} // namespace devpool
