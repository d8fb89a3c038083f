#pragma once

// Reference mailbox automaton: one FIFO per recipient for messages in
// transit, swapped wholesale into the readable inbox at each tick boundary.
// Works on plain structs, independent of the engine's Mailbox type.

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

struct Msg {
    std::uint64_t from = 0;
    std::uint64_t to = 0;
    std::int64_t payload = 0;
    std::uint64_t sent = 0;

    friend bool operator==(const Msg&, const Msg&) = default;
};

class QueueAutomaton {
public:
    void send(const Msg& m) { transit_[m.to].push_back(m); }

    /// Tick boundary: last tick's inboxes vanish, transit becomes readable.
    void advance() {
        inbox_.clear();
        for (auto& [to, q] : transit_) {
            inbox_[to] = std::vector<Msg>(q.begin(), q.end());
        }
        transit_.clear();
    }

    std::vector<Msg> inbox(std::uint64_t agent) const {
        auto it = inbox_.find(agent);
        return it == inbox_.end() ? std::vector<Msg>{} : it->second;
    }

private:
    std::map<std::uint64_t, std::deque<Msg>> transit_;
    std::map<std::uint64_t, std::vector<Msg>> inbox_;
};

}  // namespace oracle
