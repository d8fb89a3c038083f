#pragma once

#include "tessera/state.hpp"

#include <vector>

namespace tessera {

/// Adds a directed channel. Endpoints must be live agents.
inline void add_channel_in_place(SimulationState& state, const EntityId& from, const EntityId& to, double reliability) {
    state.live_agent(from);
    state.live_agent(to);
    if (!(reliability >= 0.0 && reliability <= 1.0)) {
        fail(Errc::out_of_range, "channel reliability must lie in [0, 1]");
    }
    state.channels.push_back({from, to, reliability});
}

inline SimulationState add_channel(SimulationState state, const EntityId& from, const EntityId& to, double reliability) {
    add_channel_in_place(state, from, to, reliability);
    return state;
}

/// Loss is a Bernoulli trial on the channel reliability that consumes exactly
/// one draw whether or not the message survives, so raising a reliability
/// never turns a delivered message into a dropped one under the same seed.
/// Returns whether the message was enqueued.
inline bool send_in_place(SimulationState& state, Message msg) {
    state.live_agent(msg.from);
    const Agent* recipient = state.find_agent(msg.to);
    if (!recipient || !recipient->alive) {
        fail(Errc::unknown_entity, "recipient " + to_string(msg.to) + " is not alive");
    }
    auto channel = std::find_if(state.channels.begin(), state.channels.end(),
                                [&](const Channel& c) { return c.from == msg.from && c.to == msg.to; });
    if (channel == state.channels.end()) {
        fail(Errc::no_channel, "no channel " + to_string(msg.from) + " -> " + to_string(msg.to));
    }
    const bool delivered = state.rng.bernoulli(channel->reliability);
    if (delivered) {
        state.mailboxes[msg.to.index].pending.push_back(std::move(msg));
    }
    return delivered;
}

inline SimulationState send(SimulationState state, Message msg) {
    msg.send_tick = state.tick;
    send_in_place(state, std::move(msg));
    return state;
}

/// Sends over every outgoing channel of `from`, in channel-creation order.
inline void broadcast_in_place(SimulationState& state, const EntityId& from, const std::string& topic,
                               const AttributeValue& payload) {
    state.live_agent(from);
    // Index loop: send never adds channels, but keep iterators out of it anyway.
    for (std::size_t i = 0; i < state.channels.size(); ++i) {
        if (state.channels[i].from == from) {
            send_in_place(state, Message{from, state.channels[i].to, topic, payload, state.tick});
        }
    }
}

inline SimulationState broadcast(SimulationState state, const EntityId& from, const std::string& topic,
                                 const AttributeValue& payload) {
    broadcast_in_place(state, from, topic, payload);
    return state;
}

/// Clears last tick's inboxes and moves everything in transit into them.
/// Mailboxes left with nothing in them are dropped, keeping the encoding canonical.
inline void deliver_pending_in_place(SimulationState& state) {
    for (auto it = state.mailboxes.begin(); it != state.mailboxes.end();) {
        Mailbox& box = it->second;
        box.inbox.assign(std::make_move_iterator(box.pending.begin()), std::make_move_iterator(box.pending.end()));
        box.pending.clear();
        if (box.inbox.empty()) {
            it = state.mailboxes.erase(it);
        } else {
            ++it;
        }
    }
}

inline SimulationState deliver_pending(SimulationState state) {
    deliver_pending_in_place(state);
    return state;
}

inline const std::vector<Message>& read_inbox(const SimulationState& state, const EntityId& id) {
    static const std::vector<Message> empty;
    state.live_agent(id);
    auto it = state.mailboxes.find(id.index);
    return it == state.mailboxes.end() ? empty : it->second.inbox;
}

/// Drops channels and queued messages that mention agents not in `state.agents`.
inline void purge_removed_agents(SimulationState& state) {
    auto present = [&](const EntityId& id) { return state.find_agent(id) != nullptr; };
    std::erase_if(state.channels, [&](const Channel& c) { return !present(c.from) || !present(c.to); });
    for (auto it = state.mailboxes.begin(); it != state.mailboxes.end();) {
        if (!state.find_agent(it->first)) {
            it = state.mailboxes.erase(it);
            continue;
        }
        Mailbox& box = it->second;
        std::erase_if(box.pending, [&](const Message& m) { return !present(m.from); });
        std::erase_if(box.inbox, [&](const Message& m) { return !present(m.from); });
        if (box.pending.empty() && box.inbox.empty()) {
            it = state.mailboxes.erase(it);
        } else {
            ++it;
        }
    }
}

}  // namespace tessera
