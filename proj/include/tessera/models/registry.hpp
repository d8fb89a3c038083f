#pragma once

#include "tessera/models/game_of_life.hpp"
#include "tessera/models/institutions.hpp"
#include "tessera/models/pastoral.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace tessera::models {

/// The shipped reference models, built once.
inline const std::vector<Model>& all() {
    static const std::vector<Model> models = {make_game_of_life(), make_pastoral(), make_institutions()};
    return models;
}

inline std::string_view canonical_name(std::string_view name) {
    if (name == "gol" || name == "life") return "game_of_life";
    return name;
}

inline const Model& find(std::string_view name) {
    const std::string_view wanted = canonical_name(name);
    for (const auto& m : all()) {
        if (m.name == wanted) return m;
    }
    fail(Errc::unknown_model, "unknown model '" + std::string(name) + "'");
}

inline std::vector<std::string> names() {
    std::vector<std::string> out;
    for (const auto& m : all()) out.push_back(m.name);
    return out;
}

}  // namespace tessera::models
