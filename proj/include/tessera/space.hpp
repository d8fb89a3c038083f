#pragma once

#include "tessera/error.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tessera {

inline constexpr std::string_view patch_kind = "patch";

/// Patches are {"patch", row * width + col}; agents are {class name, serial}.
/// Agent serials are assigned monotonically and never reused within a run.
struct EntityId {
    std::string kind;
    std::uint64_t index = 0;

    bool is_patch() const noexcept { return kind == patch_kind; }

    friend bool operator==(const EntityId&, const EntityId&) = default;
    friend auto operator<=>(const EntityId&, const EntityId&) = default;
};

inline std::string to_string(const EntityId& id) { return id.kind + "#" + std::to_string(id.index); }

struct Cell {
    int row = 0;
    int col = 0;

    friend bool operator==(const Cell&, const Cell&) = default;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

inline std::string to_string(Cell c) { return "(" + std::to_string(c.row) + ", " + std::to_string(c.col) + ")"; }

enum class Topology : std::uint8_t { bounded = 0, torus = 1 };

constexpr std::string_view to_string(Topology t) noexcept { return t == Topology::torus ? "torus" : "bounded"; }

inline Topology parse_topology(std::string_view text) {
    if (text == "bounded") return Topology::bounded;
    if (text == "torus") return Topology::torus;
    fail(Errc::out_of_range, "unknown topology '" + std::string(text) + "'");
}

/// Row-major lattice geometry. Cell index = row * width + col.
struct GridSpec {
    int width = 1;
    int height = 1;
    Topology topology = Topology::bounded;

    std::size_t cell_count() const noexcept {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }

    bool contains(Cell c) const noexcept { return c.row >= 0 && c.col >= 0 && c.row < height && c.col < width; }

    std::size_t index_of(Cell c) const noexcept {
        return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c.col);
    }

    Cell cell_at(std::size_t index) const noexcept {
        return {static_cast<int>(index / static_cast<std::size_t>(width)),
                static_cast<int>(index % static_cast<std::size_t>(width))};
    }

    /// Maps an arbitrary (row, col) onto the lattice: wrapped on a torus,
    /// nullopt when off-edge on a bounded grid.
    std::optional<Cell> resolve(int row, int col) const noexcept {
        if (topology == Topology::torus) {
            return Cell{wrap(row, height), wrap(col, width)};
        }
        Cell c{row, col};
        if (!contains(c)) {
            return std::nullopt;
        }
        return c;
    }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    static int wrap(int v, int n) noexcept {
        const int m = v % n;
        return m < 0 ? m + n : m;
    }
};

inline void check_grid(const GridSpec& grid) {
    if (grid.width < 1 || grid.height < 1) {
        fail(Errc::out_of_range, "grid dimensions must be at least 1x1, got " + std::to_string(grid.width) + "x" +
                                     std::to_string(grid.height));
    }
}

enum class NeighborhoodKind : std::uint8_t { moore, von_neumann };

struct Neighborhood {
    NeighborhoodKind kind = NeighborhoodKind::moore;
    int radius = 1;
};

/// Neighbors in row-major order of the (2r+1)^2 window, center excluded.
/// Bounded grids drop off-edge positions. On a torus every window offset maps
/// to a cell, so a torus narrower than 2r+1 yields repeated cells (counted
/// with multiplicity, as a wrapped Game of Life board expects).
inline std::vector<Cell> neighbors(const GridSpec& grid, Cell center, Neighborhood nb = {}) {
    if (!grid.contains(center)) {
        fail(Errc::out_of_range, "cell " + to_string(center) + " outside grid");
    }
    if (nb.radius < 1) {
        fail(Errc::invalid_argument, "neighborhood radius must be positive");
    }
    std::vector<Cell> out;
    out.reserve(static_cast<std::size_t>((2 * nb.radius + 1) * (2 * nb.radius + 1) - 1));
    for (int dr = -nb.radius; dr <= nb.radius; ++dr) {
        for (int dc = -nb.radius; dc <= nb.radius; ++dc) {
            if (dr == 0 && dc == 0) {
                continue;
            }
            if (nb.kind == NeighborhoodKind::von_neumann && std::abs(dr) + std::abs(dc) > nb.radius) {
                continue;
            }
            if (auto c = grid.resolve(center.row + dr, center.col + dc)) {
                out.push_back(*c);
            }
        }
    }
    return out;
}

}  // namespace tessera
