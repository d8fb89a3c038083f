#pragma once

#include "tessera/model.hpp"

#include <exception>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace tessera {

// ---------------------------------------------------------------------------
// Probes

/// Evaluates every probe on the same state. A throwing probe yields an error
/// entry rather than propagating.
inline ProbeRecord sample_probes(const SimulationState& state, const std::vector<ProbeDef>& defs) {
    ProbeRecord out;
    for (const auto& def : defs) {
        ProbeResult r;
        try {
            r.value = def.expression(state);
        } catch (const std::exception& e) {
            r.error = e.what()[0] ? e.what() : "probe failed";
        } catch (...) {
            r.error = "probe failed";
        }
        out.emplace(def.name, std::move(r));
    }
    return out;
}

inline ProbeRecord sample_probes(const Model& model, const SimulationState& state) {
    return sample_probes(state, model.probes);
}

struct ProbeSeries {
    std::string name;
    std::vector<std::pair<std::uint64_t, double>> samples;  // (tick, value), ticks strictly increasing

    void append(std::uint64_t tick, double value) {
        if (!samples.empty() && tick <= samples.back().first) {
            fail(Errc::bad_tick, "probe series '" + name + "' ticks must increase");
        }
        samples.emplace_back(tick, value);
    }

    friend bool operator==(const ProbeSeries&, const ProbeSeries&) = default;
};

/// Collects one series per model probe, in the model's probe order.
class ProbeRecorder {
public:
    explicit ProbeRecorder(const Model& model) {
        for (const auto& def : model.probes) {
            series_.push_back({def.name, {}});
        }
    }

    void observe(const SimulationState& state) {
        for (auto& s : series_) {
            auto it = state.probes.find(s.name);
            s.append(state.tick, (it != state.probes.end() && it->second.ok()) ? it->second.value
                                                                                : std::numeric_limits<double>::quiet_NaN());
        }
    }

    const std::vector<ProbeSeries>& series() const noexcept { return series_; }

private:
    std::vector<ProbeSeries> series_;
};

/// "tick,<name1>,<name2>,..." then one LF-terminated row per tick. Reals use
/// the shortest representation that reads back to the same double.
inline std::string export_csv(const std::vector<ProbeSeries>& series) {
    if (series.empty()) {
        fail(Errc::invalid_argument, "nothing to export: no probe series");
    }
    const auto& ref = series.front().samples;
    for (const auto& s : series) {
        if (s.samples.size() != ref.size()) {
            fail(Errc::dimension_mismatch, "ragged probe series: '" + s.name + "' has " +
                                               std::to_string(s.samples.size()) + " samples, expected " +
                                               std::to_string(ref.size()));
        }
        for (std::size_t i = 0; i < ref.size(); ++i) {
            if (s.samples[i].first != ref[i].first) {
                fail(Errc::dimension_mismatch, "probe series '" + s.name + "' covers different ticks");
            }
        }
    }
    std::string out = "tick";
    for (const auto& s : series) {
        out += ',';
        out += s.name;
    }
    out += '\n';
    for (std::size_t i = 0; i < ref.size(); ++i) {
        out += std::to_string(ref[i].first);
        for (const auto& s : series) {
            out += ',';
            out += format_real(s.samples[i].second);
        }
        out += '\n';
    }
    return out;
}

inline std::vector<ProbeSeries> parse_csv(std::string_view text) {
    std::vector<std::string_view> lines;
    while (!text.empty()) {
        auto nl = text.find('\n');
        if (nl == std::string_view::npos) {
            lines.push_back(text);
            break;
        }
        lines.push_back(text.substr(0, nl));
        text.remove_prefix(nl + 1);
    }
    auto split = [](std::string_view line) {
        std::vector<std::string_view> cells;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                cells.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        return cells;
    };
    if (lines.empty()) fail(Errc::malformed, "empty CSV");
    auto header = split(lines.front());
    if (header.empty() || header.front() != "tick") fail(Errc::malformed, "CSV header must start with 'tick'");
    std::vector<ProbeSeries> out;
    for (std::size_t c = 1; c < header.size(); ++c) {
        out.push_back({std::string(header[c]), {}});
    }
    for (std::size_t l = 1; l < lines.size(); ++l) {
        auto cells = split(lines[l]);
        if (cells.size() != header.size()) fail(Errc::malformed, "CSV row " + std::to_string(l) + " has wrong width");
        auto tick = parse_integer(cells[0]);
        if (!tick || *tick < 0) fail(Errc::malformed, "bad tick in CSV row " + std::to_string(l));
        for (std::size_t c = 1; c < cells.size(); ++c) {
            auto v = parse_real(cells[c]);
            if (!v) fail(Errc::malformed, "bad value in CSV row " + std::to_string(l));
            out[c - 1].append(static_cast<std::uint64_t>(*tick), *v);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Points of view

struct AgentGlyph {
    EntityId id;
    Cell location;
    VisualAttrs visual;

    friend bool operator==(const AgentGlyph&, const AgentGlyph&) = default;
};

/// Cells row-major, then agents in ascending id so later glyphs draw on top.
struct RenderFrame {
    std::string pov;
    std::uint64_t tick = 0;
    int width = 0;
    int height = 0;
    std::vector<VisualAttrs> cells;
    std::vector<AgentGlyph> agents;

    friend bool operator==(const RenderFrame&, const RenderFrame&) = default;
};

inline void check_visual(const VisualAttrs& v) {
    if (!(v.size > 0.0 && v.size <= 1.0)) fail(Errc::out_of_range, "visual size must lie in (0, 1]");
}

inline RenderFrame render_pov(const Model& model, const SimulationState& state, const PointOfView& pov) {
    for (const auto& [kind, painter] : pov.agents) {
        if (!model.agent_schemas.contains(kind)) {
            fail(Errc::unknown_entity, "point of view '" + pov.name + "' paints unknown agent class '" + kind + "'");
        }
    }
    RenderFrame frame;
    frame.pov = pov.name;
    frame.tick = state.tick;
    frame.width = state.grid.width;
    frame.height = state.grid.height;
    frame.cells.reserve(state.grid.cell_count());
    for (std::size_t c = 0; c < state.grid.cell_count(); ++c) {
        VisualAttrs v = pov.patch ? pov.patch(state, c) : VisualAttrs{{255, 255, 255}, Shape::cell_fill, 1.0};
        check_visual(v);
        frame.cells.push_back(v);
    }
    for (const Agent& a : state.agents) {
        if (!a.alive) continue;
        auto it = pov.agents.find(a.id.kind);
        VisualAttrs v = it != pov.agents.end() ? it->second(state, a) : VisualAttrs{{128, 128, 128}, Shape::circle, 0.5};
        check_visual(v);
        frame.agents.push_back({a.id, a.location, v});
    }
    return frame;
}

inline RenderFrame render_pov(const Model& model, const SimulationState& state, std::string_view pov_name) {
    return render_pov(model, state, model.pov(pov_name));
}

}  // namespace tessera
