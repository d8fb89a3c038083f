#pragma once

#include "tessera/kernel.hpp"
#include "tessera/serialize.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <vector>

namespace tessera {

struct Snapshot {
    std::uint64_t tick = 0;
    Bytes payload;
    std::uint64_t hash = 0;

    static Snapshot of(const SimulationState& state) {
        Snapshot s;
        s.tick = state.tick;
        s.payload = serialize(state);
        s.hash = fnv1a64(s.payload);
        return s;
    }

    SimulationState restore() const { return deserialize(payload); }
};

/// Full snapshot per tick, contiguous from 0. Rewinding moves the cursor and
/// keeps the recorded future; an edit at the cursor truncates it.
class Timeline {
public:
    bool empty() const noexcept { return snapshots_.empty(); }
    std::uint64_t max_tick() const { return require_nonempty().back().tick; }
    std::uint64_t current() const noexcept { return current_; }
    std::uint64_t branch_count() const noexcept { return branch_count_; }
    const std::vector<Snapshot>& snapshots() const noexcept { return snapshots_; }

    const Snapshot& at(std::uint64_t tick) const {
        if (empty() || tick > max_tick()) fail(Errc::bad_tick, "no snapshot for tick " + std::to_string(tick));
        return snapshots_[static_cast<std::size_t>(tick)];
    }

    SimulationState state_at(std::uint64_t tick) const { return at(tick).restore(); }
    SimulationState current_state() const { return state_at(current_); }

    /// Appends the next tick (0 on an empty timeline) and moves the cursor to it.
    void record(const SimulationState& state) {
        const std::uint64_t expected = empty() ? 0 : max_tick() + 1;
        if (state.tick != expected) {
            fail(Errc::bad_tick, "cannot record tick " + std::to_string(state.tick) + ", expected " +
                                     std::to_string(expected));
        }
        snapshots_.push_back(Snapshot::of(state));
        current_ = state.tick;
    }

    SimulationState rewind(std::uint64_t tick) {
        if (empty() || tick > max_tick()) {
            fail(Errc::bad_tick, "cannot rewind to tick " + std::to_string(tick) + ", max is " +
                                     (empty() ? std::string("none") : std::to_string(max_tick())));
        }
        current_ = tick;
        return state_at(tick);
    }

    /// With an edited state for the cursor tick that differs from the stored
    /// one: drop everything after the cursor, replace the cursor snapshot and
    /// count a new branch. Without an edit (or an identical one) nothing changes.
    void resume(const std::optional<SimulationState>& edited = std::nullopt) {
        if (!edited) return;
        if (edited->tick != current_) {
            fail(Errc::bad_tick, "edited state is at tick " + std::to_string(edited->tick) + ", cursor is at " +
                                     std::to_string(current_));
        }
        Snapshot snap = Snapshot::of(*edited);
        const Snapshot& stored = at(current_);
        if (snap.hash == stored.hash && snap.payload == stored.payload) return;
        snapshots_.resize(static_cast<std::size_t>(current_) + 1);
        snapshots_.back() = std::move(snap);
        ++branch_count_;
    }

    /// Moves the cursor forward by one with the successor of the cursor state.
    /// If that tick is already recorded the stored snapshot must match (the
    /// future is replayed, not rewritten); a mismatch truncates and records.
    void advance(const SimulationState& next) {
        if (next.tick != current_ + 1) {
            fail(Errc::bad_tick, "advance expects tick " + std::to_string(current_ + 1));
        }
        if (current_ < max_tick()) {
            Snapshot snap = Snapshot::of(next);
            const Snapshot& stored = at(next.tick);
            if (snap.hash == stored.hash && snap.payload == stored.payload) {
                current_ = next.tick;
                return;
            }
            snapshots_.resize(static_cast<std::size_t>(current_) + 1);
            ++branch_count_;
        }
        record(next);
    }

    /// Re-simulates from snapshot t1 and checks every tick through t2 against
    /// the stored payloads and hashes.
    bool verify_replay(const Model& model, std::uint64_t t1, std::uint64_t t2) const {
        if (empty() || t1 >= t2 || t2 > max_tick()) {
            fail(Errc::bad_tick, "verify_replay needs t1 < t2 <= max");
        }
        try {
            for (std::uint64_t t = t1; t <= t2; ++t) {
                const Snapshot& s = at(t);
                if (fnv1a64(s.payload) != s.hash) return false;
            }
            SimulationState state = at(t1).restore();
            if (state.tick != t1 || Snapshot::of(state).hash != at(t1).hash) return false;
            for (std::uint64_t t = t1 + 1; t <= t2; ++t) {
                state = step(model, state);
                const Snapshot replayed = Snapshot::of(state);
                const Snapshot& stored = at(t);
                if (replayed.hash != stored.hash || replayed.payload != stored.payload) return false;
            }
        } catch (const Error&) {
            return false;
        }
        return true;
    }

    /// Test and audit hook: direct access to a stored payload.
    Bytes& mutable_payload(std::uint64_t tick) { return snapshots_.at(static_cast<std::size_t>(tick)).payload; }

    /// Writes tick_<n>.snap per snapshot plus index.csv ("tick,hash", hex hash).
    void export_to(const std::filesystem::path& dir) const {
        std::filesystem::create_directories(dir);
        std::ofstream index(dir / "index.csv", std::ios::binary);
        if (!index) fail(Errc::invalid_argument, "cannot write " + (dir / "index.csv").string());
        index << "tick,hash\n";
        for (const auto& s : snapshots_) {
            const auto file = dir / snapshot_filename(s.tick);
            std::ofstream out(file, std::ios::binary);
            out.write(reinterpret_cast<const char*>(s.payload.data()), static_cast<std::streamsize>(s.payload.size()));
            if (!out) fail(Errc::invalid_argument, "cannot write " + file.string());
            index << s.tick << ',' << hex64(s.hash) << '\n';
        }
    }

    static std::string snapshot_filename(std::uint64_t tick) {
        std::string digits = std::to_string(tick);
        if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
        return "tick_" + digits + ".snap";
    }

private:
    const std::vector<Snapshot>& require_nonempty() const {
        if (snapshots_.empty()) fail(Errc::bad_tick, "timeline is empty");
        return snapshots_;
    }

    std::vector<Snapshot> snapshots_;
    std::uint64_t current_ = 0;
    std::uint64_t branch_count_ = 0;
};

}  // namespace tessera
