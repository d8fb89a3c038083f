#pragma once

#include "tessera/error.hpp"
#include "tessera/model.hpp"
#include "tessera/observation.hpp"
#include "tessera/value.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tessera {

/// One GIS layer in ESRI ASCII grid form. Row 0 is the northernmost row, as
/// in the file, and maps onto grid row 0.
struct RasterLayer {
    std::string name;
    int ncols = 0;
    int nrows = 0;
    double xllcorner = 0.0;
    double yllcorner = 0.0;
    double cellsize = 1.0;
    double nodata = -9999.0;
    std::vector<double> values;  // row-major, nrows * ncols

    double at(int row, int col) const {
        return values[static_cast<std::size_t>(row) * static_cast<std::size_t>(ncols) + static_cast<std::size_t>(col)];
    }

    bool is_nodata(int row, int col) const { return at(row, col) == nodata; }

    friend bool operator==(const RasterLayer&, const RasterLayer&) = default;
};

namespace detail {

inline std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline bool starts_alpha(std::string_view token) {
    return !token.empty() && std::isalpha(static_cast<unsigned char>(token.front())) && !parse_real(token);
}

}  // namespace detail

/// Header keys (any case): ncols, nrows, xllcorner, yllcorner, cellsize and
/// optionally NODATA_value (default -9999), then nrows*ncols values.
inline RasterLayer import_ascii_grid(std::string_view text, std::string name = {}) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        const std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) tokens.push_back(text.substr(start, i - start));
    }

    static constexpr std::array<std::string_view, 6> keys{"ncols", "nrows", "xllcorner", "yllcorner", "cellsize",
                                                          "nodata_value"};
    std::array<std::optional<double>, 6> header{};
    std::size_t t = 0;
    while (t < tokens.size() && detail::starts_alpha(tokens[t])) {
        const std::string key = detail::lower(tokens[t]);
        auto k = std::find(keys.begin(), keys.end(), key);
        if (k == keys.end()) fail(Errc::malformed, "unknown raster header key '" + std::string(tokens[t]) + "'");
        auto& slot = header[static_cast<std::size_t>(k - keys.begin())];
        if (slot) fail(Errc::malformed, "duplicate raster header key '" + std::string(tokens[t]) + "'");
        if (t + 1 >= tokens.size()) fail(Errc::malformed, "raster header key '" + key + "' has no value");
        auto v = parse_real(tokens[t + 1]);
        if (!v) fail(Errc::malformed, "non-numeric value for raster header key '" + key + "'");
        slot = *v;
        t += 2;
    }
    for (std::size_t k = 0; k < 5; ++k) {
        if (!header[k]) fail(Errc::malformed, "missing raster header key '" + std::string(keys[k]) + "'");
    }
    auto as_dim = [](double v, std::string_view key) {
        if (!(v >= 1.0) || std::floor(v) != v || v > 1.0e8) {
            fail(Errc::malformed, "raster '" + std::string(key) + "' must be a positive integer");
        }
        return static_cast<int>(v);
    };
    RasterLayer layer;
    layer.name = std::move(name);
    layer.ncols = as_dim(*header[0], "ncols");
    layer.nrows = as_dim(*header[1], "nrows");
    layer.xllcorner = *header[2];
    layer.yllcorner = *header[3];
    layer.cellsize = *header[4];
    if (!(layer.cellsize > 0.0)) fail(Errc::malformed, "raster cellsize must be positive");
    layer.nodata = header[5].value_or(-9999.0);

    const std::size_t expected = static_cast<std::size_t>(layer.ncols) * static_cast<std::size_t>(layer.nrows);
    const std::size_t got = tokens.size() - t;
    if (got != expected) {
        fail(Errc::dimension_mismatch, "raster has " + std::to_string(got) + " values, expected " +
                                           std::to_string(expected));
    }
    layer.values.reserve(expected);
    for (; t < tokens.size(); ++t) {
        auto v = parse_real(tokens[t]);
        if (!v) fail(Errc::malformed, "non-numeric raster value '" + std::string(tokens[t]) + "'");
        layer.values.push_back(*v);
    }
    return layer;
}

/// Canonical key order, one raster row per line, shortest round-trip reals.
inline std::string export_ascii_grid(const RasterLayer& layer) {
    std::string out;
    out += "ncols " + std::to_string(layer.ncols) + "\n";
    out += "nrows " + std::to_string(layer.nrows) + "\n";
    out += "xllcorner " + format_real(layer.xllcorner) + "\n";
    out += "yllcorner " + format_real(layer.yllcorner) + "\n";
    out += "cellsize " + format_real(layer.cellsize) + "\n";
    out += "NODATA_value " + format_real(layer.nodata) + "\n";
    for (int r = 0; r < layer.nrows; ++r) {
        for (int c = 0; c < layer.ncols; ++c) {
            if (c > 0) out += ' ';
            out += format_real(layer.at(r, c));
        }
        out += '\n';
    }
    return out;
}

struct AffineTransform {
    double scale = 1.0;
    double offset = 0.0;
};

struct ClampBounds {
    double lo = 0.0;
    double hi = 1.0;
};

/// patch[attr] := clamp(scale * value + offset) on every non-nodata cell.
/// Nodata cells keep whatever the initializer gave them.
inline SimulationState apply_layer(const Model& model, SimulationState state, const RasterLayer& layer,
                                   std::string_view attr, AffineTransform transform = {},
                                   std::optional<ClampBounds> clamp = {}) {
    if (layer.ncols != state.grid.width || layer.nrows != state.grid.height) {
        fail(Errc::dimension_mismatch, "layer is " + std::to_string(layer.ncols) + "x" + std::to_string(layer.nrows) +
                                           ", grid is " + std::to_string(state.grid.width) + "x" +
                                           std::to_string(state.grid.height));
    }
    const std::size_t field = model.patch_field(attr);
    const AttributeSpec& spec = model.patch_schema[field];
    if (spec.type != ValueType::real) {
        fail(Errc::type_mismatch, "layer target '" + std::string(attr) + "' is not real-valued");
    }
    for (int r = 0; r < layer.nrows; ++r) {
        for (int c = 0; c < layer.ncols; ++c) {
            if (layer.is_nodata(r, c)) continue;
            double v = transform.scale * layer.at(r, c) + transform.offset;
            if (clamp) v = std::clamp(v, clamp->lo, clamp->hi);
            state.patch_value(state.grid.index_of({r, c}), field) = validate(spec, make_real(v));
        }
    }
    state.probes = sample_probes(model, state);
    return state;
}

}  // namespace tessera
