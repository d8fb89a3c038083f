#pragma once

#include "tessera/model.hpp"

namespace tessera::models {

/// Conway B3/S23.
constexpr bool gol_next_cell(bool alive, int live_neighbors) noexcept {
    return live_neighbors == 3 || (alive && live_neighbors == 2);
}

inline constexpr Rgb gol_alive_color{0, 160, 0};
inline constexpr Rgb gol_dead_color{0, 0, 0};

inline Model make_game_of_life() {
    Model m;
    m.name = "game_of_life";
    m.description = "Conway's Game of Life on a patch grid. One tick is one generation.";
    m.params = {
        int_attr("width", 16, 1, 4096, "grid columns"),
        int_attr("height", 16, 1, 4096, "grid rows"),
        symbol_attr("topology", {"bounded", "torus"}, "torus", "edge handling"),
        symbol_attr("initial", {"all_dead", "random"}, "random", "initial board"),
        real_attr("density", 0.5, 0.0, 1.0, "probability a cell starts alive when initial=random"),
    };
    m.patch_schema = {bool_attr("alive", false, "whether the cell is alive")};

    m.initializer = [](const Model&, SimulationState& s) {
        GridSpec grid{static_cast<int>(param_int(s.params, "width")), static_cast<int>(param_int(s.params, "height")),
                      parse_topology(param_symbol(s.params, "topology"))};
        check_grid(grid);
        s.grid = grid;
        s.patch_fields = 1;
        s.patches.assign(grid.cell_count(), make_bool(false));
        if (param_symbol(s.params, "initial") == "random") {
            const double density = param_real(s.params, "density");
            for (auto& cell : s.patches) {
                cell = make_bool(s.rng.uniform() < density);
            }
        }
    };

    m.patch_rule = [](const PatchView& view, std::span<AttributeValue> next) {
        const SimulationState& prev = view.prev;
        for (std::size_t cell = 0; cell < prev.grid.cell_count(); ++cell) {
            int live = 0;
            for (Cell n : neighbors(prev.grid, prev.grid.cell_at(cell))) {
                live += prev.patch_bool(prev.grid.index_of(n), 0) ? 1 : 0;
            }
            next[cell] = make_bool(gol_next_cell(prev.patch_bool(cell, 0), live));
        }
    };

    m.probes = {
        {"alive",
         [](const SimulationState& s) {
             double n = 0;
             for (std::size_t c = 0; c < s.grid.cell_count(); ++c) n += s.patch_bool(c, 0) ? 1 : 0;
             return n;
         }},
        {"dead",
         [](const SimulationState& s) {
             double n = 0;
             for (std::size_t c = 0; c < s.grid.cell_count(); ++c) n += s.patch_bool(c, 0) ? 0 : 1;
             return n;
         }},
    };

    m.povs = {{"life",
               [](const SimulationState& s, std::size_t c) {
                   return VisualAttrs{s.patch_bool(c, 0) ? gol_alive_color : gol_dead_color, Shape::cell_fill, 1.0};
               },
               {}}};
    return m;
}

}  // namespace tessera::models
