#pragma once

#include "tessera/comms.hpp"
#include "tessera/state.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace tessera {

// ---------------------------------------------------------------------------
// Visual vocabulary for points of view

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

enum class Shape : std::uint8_t { cell_fill, circle };

constexpr std::string_view to_string(Shape s) noexcept { return s == Shape::circle ? "circle" : "cell-fill"; }

struct VisualAttrs {
    Rgb color;
    Shape shape = Shape::cell_fill;
    double size = 1.0;  // fraction of a cell, in (0, 1]

    friend bool operator==(const VisualAttrs&, const VisualAttrs&) = default;
};

/// Linear ramp between two colors; t is clamped to [0, 1], channels rounded to nearest.
inline Rgb lerp(Rgb from, Rgb to, double t) {
    t = std::isnan(t) ? 0.0 : std::clamp(t, 0.0, 1.0);
    auto mix = [t](std::uint8_t a, std::uint8_t b) {
        return static_cast<std::uint8_t>(std::lround(static_cast<double>(a) + (static_cast<double>(b) - a) * t));
    };
    return {mix(from.r, to.r), mix(from.g, to.g), mix(from.b, to.b)};
}

using PatchPainter = std::function<VisualAttrs(const SimulationState&, std::size_t cell)>;
using AgentPainter = std::function<VisualAttrs(const SimulationState&, const Agent&)>;

/// A named, pure mapping from entity state to visuals. Agent classes without
/// a painter fall back to a grey circle.
struct PointOfView {
    std::string name;
    PatchPainter patch;
    std::map<std::string, AgentPainter, std::less<>> agents;
};

struct ProbeDef {
    std::string name;
    std::function<double(const SimulationState&)> expression;
};

// ---------------------------------------------------------------------------
// Model contract

class AgentContext;
struct Model;

/// Read-only view handed to the synchronous patch rule: every patch of the
/// new tick is computed from `prev`, never from partially updated cells.
struct PatchView {
    const SimulationState& prev;
    const OccupancyIndex& occupancy;
    std::uint64_t tick;  // the tick being computed
};

/// Writes the whole next patch layer (cell-major, same layout as
/// SimulationState::patches, pre-filled with the previous values).
using PatchRule = std::function<void(const PatchView&, std::span<AttributeValue> next)>;
using AgentRule = std::function<void(AgentContext&)>;
using Initializer = std::function<void(const Model&, SimulationState&)>;
using ParamCheck = std::function<void(const ParamSet&)>;

struct Model {
    std::string name;
    std::string description;
    Schema params;
    ParamCheck check_params;  // cross-parameter constraints, may be empty
    Schema patch_schema;
    std::map<std::string, Schema, std::less<>> agent_schemas;
    PatchRule patch_rule;  // empty: patches never change on their own
    std::map<std::string, AgentRule, std::less<>> agent_rules;
    std::vector<ProbeDef> probes;
    std::vector<PointOfView> povs;
    /// Receives a state with model, params, rng and tick 0 set; builds grid,
    /// patches, agents and channels.
    Initializer initializer;

    const Schema& agent_schema(std::string_view kind) const {
        auto it = agent_schemas.find(kind);
        if (it == agent_schemas.end()) fail(Errc::unknown_entity, "unknown agent class '" + std::string(kind) + "'");
        return it->second;
    }

    std::size_t patch_field(std::string_view attr) const {
        auto i = field_index(patch_schema, attr);
        if (!i) fail(Errc::unknown_attribute, "patches have no attribute '" + std::string(attr) + "'");
        return *i;
    }

    std::size_t agent_field(std::string_view kind, std::string_view attr) const {
        auto i = field_index(agent_schema(kind), attr);
        if (!i) fail(Errc::unknown_attribute, std::string(kind) + " has no attribute '" + std::string(attr) + "'");
        return *i;
    }

    const PointOfView& pov(std::string_view pov_name) const {
        for (const auto& p : povs) {
            if (p.name == pov_name) return p;
        }
        fail(Errc::unknown_pov, "model '" + name + "' has no point of view '" + std::string(pov_name) + "'");
    }
};

// ---------------------------------------------------------------------------
// Construction helpers for initializers

inline void allocate_patches(const Model& model, SimulationState& state, GridSpec grid) {
    check_grid(grid);
    state.grid = grid;
    state.patch_fields = model.patch_schema.size();
    state.patches.clear();
    state.patches.reserve(grid.cell_count() * state.patch_fields);
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        for (const auto& spec : model.patch_schema) {
            state.patches.push_back(spec.default_value);
        }
    }
}

/// Appends an agent with schema defaults; returns its id.
inline EntityId spawn_agent(const Model& model, SimulationState& state, std::string_view kind, Cell at) {
    const Schema& schema = model.agent_schema(kind);
    if (!state.grid.contains(at)) fail(Errc::out_of_range, "cannot place agent at " + to_string(at));
    Agent agent;
    agent.id = EntityId{std::string(kind), state.next_agent_index++};
    agent.location = at;
    agent.attrs.reserve(schema.size());
    for (const auto& spec : schema) {
        agent.attrs.push_back(spec.default_value);
    }
    state.agents.push_back(std::move(agent));
    return state.agents.back().id;
}

// ---------------------------------------------------------------------------
// What an agent rule may do while it is acting

class AgentContext {
public:
    AgentContext(const Model& model, SimulationState& state, std::size_t position)
        : model_(model), state_(state), position_(position) {}

    const Model& model() const noexcept { return model_; }
    const SimulationState& state() const noexcept { return state_; }
    std::uint64_t tick() const noexcept { return state_.tick; }
    Rng& rng() noexcept { return state_.rng; }

    const Agent& self() const noexcept { return state_.agents[position_]; }
    const EntityId& id() const noexcept { return self().id; }
    Cell location() const noexcept { return self().location; }

    const AttributeValue& attr(std::size_t field) const { return self().attrs.at(field); }
    void set_attr(std::size_t field, AttributeValue value) { mutable_self().attrs.at(field) = std::move(value); }

    AttributeValue& patch(std::size_t cell, std::size_t field) { return state_.patch_value(cell, field); }

    void move_to(Cell dest) {
        auto c = state_.grid.resolve(dest.row, dest.col);
        if (!c) fail(Errc::out_of_range, "move destination " + to_string(dest) + " outside grid");
        mutable_self().location = *c;
    }

    /// Marks the agent dead; it is removed in the cull phase of this tick.
    void die() { mutable_self().alive = false; }

    const std::vector<Message>& inbox() const { return read_inbox(state_, id()); }

    bool send(const EntityId& to, std::string topic, AttributeValue payload) {
        return send_in_place(state_, Message{id(), to, std::move(topic), std::move(payload), state_.tick});
    }

    void broadcast(const std::string& topic, const AttributeValue& payload) {
        broadcast_in_place(state_, id(), topic, payload);
    }

    std::vector<Cell> neighbors(Neighborhood nb = {}) const { return tessera::neighbors(state_.grid, location(), nb); }

private:
    // Positions stay valid through the agent phase: nothing is erased until the cull.
    Agent& mutable_self() noexcept { return state_.agents[position_]; }

    const Model& model_;
    SimulationState& state_;
    std::size_t position_;
};

}  // namespace tessera
