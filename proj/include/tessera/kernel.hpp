#pragma once

#include "tessera/comms.hpp"
#include "tessera/model.hpp"
#include "tessera/observation.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace tessera {

/// Builds tick 0. Equal (model, params, seed) give byte-identical states.
inline SimulationState init_simulation(const Model& model, const ParamSet& params, std::uint64_t seed) {
    SimulationState state;
    state.model = model.name;
    state.tick = 0;
    state.params = resolve_params(model.params, params);
    if (model.check_params) {
        model.check_params(state.params);
    }
    state.rng = Rng(seed);
    if (!model.initializer) fail(Errc::invalid_argument, "model '" + model.name + "' has no initializer");
    model.initializer(model, state);
    check_grid(state.grid);
    state.probes = sample_probes(model, state);
    return state;
}

/// Fisher-Yates over live agents (ascending id as the starting order), drawing
/// from `rng`. Used by the kernel with the state's own generator.
inline std::vector<std::size_t> shuffle_positions(const SimulationState& state, Rng& rng) {
    std::vector<std::size_t> order;
    order.reserve(state.agents.size());
    for (std::size_t i = 0; i < state.agents.size(); ++i) {
        if (state.agents[i].alive) order.push_back(i);
    }
    for (std::size_t i = order.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

/// The order in which live agents would act if `state` were stepped now.
/// Pure: works on a copy of the generator.
inline std::vector<EntityId> activation_order(const SimulationState& state) {
    Rng rng = state.rng;
    std::vector<EntityId> ids;
    for (std::size_t pos : shuffle_positions(state, rng)) {
        ids.push_back(state.agents[pos].id);
    }
    return ids;
}

/// Advances one tick. Phases, in order: deliver messages sent last tick,
/// synchronous patch update from the previous tick, agents in shuffled order,
/// removal of dead agents, probe sampling.
inline SimulationState step(const Model& model, const SimulationState& prev) {
    SimulationState next = prev;
    next.tick = prev.tick + 1;

    deliver_pending_in_place(next);

    if (model.patch_rule && next.patch_fields > 0) {
        const OccupancyIndex occupancy(prev);
        const PatchView view{prev, occupancy, next.tick};
        model.patch_rule(view, std::span<AttributeValue>(next.patches));
    }

    for (std::size_t pos : shuffle_positions(next, next.rng)) {
        if (!next.agents[pos].alive) {
            continue;  // died earlier this tick
        }
        auto rule = model.agent_rules.find(next.agents[pos].id.kind);
        if (rule == model.agent_rules.end() || !rule->second) {
            continue;
        }
        AgentContext ctx(model, next, pos);
        rule->second(ctx);
    }

    const auto before = next.agents.size();
    std::erase_if(next.agents, [](const Agent& a) { return !a.alive; });
    if (next.agents.size() != before) {
        purge_removed_agents(next);
    }

    next.probes = sample_probes(model, next);
    return next;
}

inline SimulationState run(const Model& model, SimulationState state, std::uint64_t ticks) {
    for (std::uint64_t i = 0; i < ticks; ++i) {
        state = step(model, state);
    }
    return state;
}

// ---------------------------------------------------------------------------
// Inspection and direct manipulation

inline std::size_t checked_patch_cell(const SimulationState& state, const EntityId& id) {
    if (!id.is_patch() || id.index >= state.grid.cell_count()) {
        fail(Errc::unknown_entity, "no entity " + to_string(id));
    }
    return static_cast<std::size_t>(id.index);
}

inline AttributeValue get_attribute(const Model& model, const SimulationState& state, const EntityId& id,
                                    std::string_view name) {
    if (id.is_patch()) {
        const std::size_t cell = checked_patch_cell(state, id);
        return state.patch_value(cell, model.patch_field(name));
    }
    const Agent& agent = state.live_agent(id);
    return agent.attrs.at(model.agent_field(agent.id.kind, name));
}

/// Returns a copy differing only in that attribute (probes re-sampled so they
/// describe the edited world). The tick does not change.
inline SimulationState set_attribute(const Model& model, SimulationState state, const EntityId& id,
                                     std::string_view name, const AttributeValue& value) {
    if (id.is_patch()) {
        const std::size_t cell = checked_patch_cell(state, id);
        const std::size_t field = model.patch_field(name);
        state.patch_value(cell, field) = validate(model.patch_schema[field], value);
    } else {
        Agent& agent = state.live_agent(id);
        const std::size_t field = model.agent_field(agent.id.kind, name);
        agent.attrs[field] = validate(model.agent_schema(agent.id.kind)[field], value);
    }
    state.probes = sample_probes(model, state);
    return state;
}

struct Inspection {
    EntityId id;
    Cell location;
    std::vector<std::pair<std::string, AttributeValue>> attrs;  // schema order

    friend bool operator==(const Inspection&, const Inspection&) = default;
};

inline Inspection inspect_entity(const Model& model, const SimulationState& state, const EntityId& id) {
    Inspection out;
    out.id = id;
    if (id.is_patch()) {
        const std::size_t cell = checked_patch_cell(state, id);
        out.location = state.grid.cell_at(cell);
        for (std::size_t f = 0; f < model.patch_schema.size(); ++f) {
            out.attrs.emplace_back(model.patch_schema[f].name, state.patch_value(cell, f));
        }
        return out;
    }
    const Agent& agent = state.live_agent(id);
    const Schema& schema = model.agent_schema(agent.id.kind);
    out.location = agent.location;
    for (std::size_t f = 0; f < schema.size(); ++f) {
        out.attrs.emplace_back(schema[f].name, agent.attrs[f]);
    }
    return out;
}

/// Relocates a live agent. Several agents may share a cell.
inline SimulationState move_agent(const Model& model, SimulationState state, const EntityId& id, Cell dest) {
    Agent& agent = state.live_agent(id);
    if (!state.grid.contains(dest)) {
        fail(Errc::out_of_range, "destination " + to_string(dest) + " outside grid");
    }
    agent.location = dest;
    state.probes = sample_probes(model, state);
    return state;
}

}  // namespace tessera
