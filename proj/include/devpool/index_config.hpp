#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "devpool/error.hpp"
#include "devpool/index.hpp"

namespace devpool {

/*!
    Custom index from a JSON document. All keys except "name" and "map" are
    optional and fall back to the preset conventions:

        {
          "name": "gms-dd-03",
          "map": "gms",                      // gms | mse | ssim
          "preprocess": {"grayscale": true, "downsample2": true},
          "pooling": {"strategy": "dd", "alpha": 0.3, "rho": 2, "mct": "mean"},
          "polarity": "lower-is-better",     // must agree with map + pooling
          "params": {"c": 170}               // or k1, k2, dynamic_range, window, sigma
        }
*/
inline IndexSpec index_from_json(nlohmann::json const& doc)
{
    try {
        IndexSpec spec;
        spec.name = doc.at("name").get<std::string>();
        spec.map_kind = parse_map_kind(doc.at("map").get<std::string>());
        spec.preprocess.downsample2 = spec.map_kind == MapKind::GMS;
        if (auto it = doc.find("preprocess"); it != doc.end()) {
            spec.preprocess.grayscale = it->value("grayscale", spec.preprocess.grayscale);
            spec.preprocess.downsample2 = it->value("downsample2", spec.preprocess.downsample2);
        }
        if (auto it = doc.find("pooling"); it != doc.end()) {
            spec.pooling.strategy = parse_strategy(it->value("strategy", std::string("mean")));
            spec.pooling.alpha = it->value("alpha", spec.pooling.alpha);
            spec.pooling.rho = it->value("rho", spec.pooling.rho);
            spec.pooling.mct = parse_central_tendency(it->value("mct", std::string("mean")));
        }
        spec.map_params = default_map_params(spec.map_kind);
        if (auto it = doc.find("params"); it != doc.end()) {
            if (auto* g = std::get_if<GmsParams>(&spec.map_params)) {
                g->c = it->value("c", g->c);
            } else if (auto* s = std::get_if<SsimParams>(&spec.map_params)) {
                s->k1 = it->value("k1", s->k1);
                s->k2 = it->value("k2", s->k2);
                s->dynamic_range = it->value("dynamic_range", s->dynamic_range);
                s->window = it->value("window", s->window);
                s->sigma = it->value("sigma", s->sigma);
            } else if (!it->empty()) {
                throw InvalidInput("index '" + spec.name + "': MSE map takes no parameters");
            }
        }
        spec.polarity = expected_polarity(spec.map_kind, spec.pooling.strategy);
        if (auto it = doc.find("polarity"); it != doc.end()) {
            if (parse_polarity(it->get<std::string>()) != spec.polarity) {
                throw InvalidInput("index '" + spec.name + "': polarity contradicts its map and pooling");
            }
        }
        spec.validate();
        return spec;
    } catch (nlohmann::json::exception const& e) {
        throw InvalidInput(std::string("malformed index definition: ") + e.what());
    }
}

inline IndexSpec load_index_config(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("cannot open index definition '" + path.string() + "'");
    }
    try {
        return index_from_json(nlohmann::json::parse(in));
    } catch (nlohmann::json::parse_error const& e) {
        throw InvalidInput("'" + path.string() + "': " + e.what());
    }
}

} // namespace devpool
