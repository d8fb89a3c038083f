#pragma once

#include "tessera/error.hpp"
#include "tessera/rng.hpp"
#include "tessera/space.hpp"
#include "tessera/value.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

namespace tessera {

struct Message {
    EntityId from;
    EntityId to;
    std::string topic;
    AttributeValue payload;
    std::uint64_t send_tick = 0;

    friend bool operator==(const Message&, const Message&) = default;
};

/// pending: sent this tick, in transit. inbox: delivered at the start of the
/// current tick and readable until the next delivery.
struct Mailbox {
    std::deque<Message> pending;
    std::vector<Message> inbox;

    friend bool operator==(const Mailbox&, const Mailbox&) = default;
};

struct Channel {
    EntityId from;
    EntityId to;
    double reliability = 1.0;

    friend bool operator==(const Channel&, const Channel&) = default;
};

struct Agent {
    EntityId id;
    Cell location;
    std::vector<AttributeValue> attrs;
    bool alive = true;

    friend bool operator==(const Agent&, const Agent&) = default;
};

struct ProbeResult {
    double value = 0.0;
    std::string error;

    bool ok() const noexcept { return error.empty(); }

    friend bool operator==(const ProbeResult&, const ProbeResult&) = default;
};

using ProbeRecord = std::map<std::string, ProbeResult, std::less<>>;

/// The complete world at one tick. Attribute vectors are positional; field
/// names live in the model's schemas.
struct SimulationState {
    std::string model;
    std::uint64_t tick = 0;
    GridSpec grid;
    std::size_t patch_fields = 0;
    std::vector<AttributeValue> patches;  // cell-major, patch_fields values per cell
    std::vector<Agent> agents;            // ascending id.index
    std::uint64_t next_agent_index = 0;
    std::map<std::uint64_t, Mailbox> mailboxes;  // keyed by agent serial
    std::vector<Channel> channels;               // creation order
    Rng rng;
    ParamSet params;
    ProbeRecord probes;  // sampled at the end of the step that produced this tick

    AttributeValue& patch_value(std::size_t cell, std::size_t field) { return patches[cell * patch_fields + field]; }
    const AttributeValue& patch_value(std::size_t cell, std::size_t field) const {
        return patches[cell * patch_fields + field];
    }

    double patch_real(std::size_t cell, std::size_t field) const { return std::get<double>(patch_value(cell, field)); }
    bool patch_bool(std::size_t cell, std::size_t field) const { return std::get<bool>(patch_value(cell, field)); }

    /// Live or dying agent with this serial, or nullptr.
    const Agent* find_agent(std::uint64_t index) const {
        auto it = std::lower_bound(agents.begin(), agents.end(), index,
                                   [](const Agent& a, std::uint64_t i) { return a.id.index < i; });
        return (it != agents.end() && it->id.index == index) ? &*it : nullptr;
    }

    Agent* find_agent(std::uint64_t index) {
        return const_cast<Agent*>(static_cast<const SimulationState&>(*this).find_agent(index));
    }

    const Agent* find_agent(const EntityId& id) const {
        const Agent* a = find_agent(id.index);
        return (a && a->id.kind == id.kind) ? a : nullptr;
    }

    Agent* find_agent(const EntityId& id) {
        return const_cast<Agent*>(static_cast<const SimulationState&>(*this).find_agent(id));
    }

    const Agent& live_agent(const EntityId& id) const {
        const Agent* a = find_agent(id);
        if (!a || !a->alive) fail(Errc::unknown_entity, "no live agent " + to_string(id));
        return *a;
    }

    Agent& live_agent(const EntityId& id) {
        return const_cast<Agent&>(static_cast<const SimulationState&>(*this).live_agent(id));
    }

    friend bool operator==(const SimulationState&, const SimulationState&) = default;
};

inline EntityId patch_id(const GridSpec& grid, Cell c) { return {std::string(patch_kind), grid.index_of(c)}; }

/// Agents per cell, as positions into state.agents. Rebuilt from scratch.
class OccupancyIndex {
public:
    explicit OccupancyIndex(const SimulationState& state) : cells_(state.grid.cell_count()) {
        for (std::size_t i = 0; i < state.agents.size(); ++i) {
            const Agent& a = state.agents[i];
            if (a.alive) {
                cells_[state.grid.index_of(a.location)].push_back(i);
            }
        }
    }

    const std::vector<std::size_t>& at(std::size_t cell) const { return cells_[cell]; }

    std::size_t count(const SimulationState& state, std::size_t cell, std::string_view kind) const {
        return static_cast<std::size_t>(std::count_if(cells_[cell].begin(), cells_[cell].end(), [&](std::size_t i) {
            return state.agents[i].id.kind == kind;
        }));
    }

    friend bool operator==(const OccupancyIndex&, const OccupancyIndex&) = default;

private:
    std::vector<std::vector<std::size_t>> cells_;
};

}  // namespace tessera
