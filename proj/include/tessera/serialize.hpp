#pragma once

#include "tessera/state.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tessera {

using Bytes = std::vector<std::uint8_t>;

// Canonical snapshot encoding. Little-endian fixed-width integers, reals as
// their IEEE-754 bit pattern (never reformatted), strings length-prefixed,
// containers in their in-memory order (agents by id, mailboxes by recipient,
// channels by creation, params and probes by name). Layout, version 1:
//
//   "TSSN" u32:version str:model u64:tick
//   u32:width u32:height u8:topology
//   u32:patch_fields u64:n value*n
//   u64:next_agent_index u64:n agent*n
//   u64:n (u64:recipient u64:n msg*n u64:n msg*n)*n     pending, inbox
//   u64:n (id id f64)*n                                 channels
//   u64*4                                               rng
//   u64:n (str value)*n                                 params
//   u64:n (str u8:ok f64 str)*n                         probes
//
//   value = u8:tag (0 bool u8 | 1 int i64 | 2 real f64 | 3 symbol str)
//   agent = id i32:row i32:col u8:alive u32:n value*n
//   id    = str:kind u64:index
//   msg   = id:from id:to str:topic value u64:send_tick
namespace detail {

class Writer {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

    void str(std::string_view s) {
        u32(static_cast<std::uint32_t>(s.size()));
        out_.insert(out_.end(), s.begin(), s.end());
    }

    void value(const AttributeValue& v) {
        u8(static_cast<std::uint8_t>(type_of(v)));
        switch (type_of(v)) {
        case ValueType::boolean: u8(std::get<bool>(v) ? 1 : 0); break;
        case ValueType::integer: i64(std::get<std::int64_t>(v)); break;
        case ValueType::real: f64(std::get<double>(v)); break;
        case ValueType::symbol: str(std::get<Symbol>(v).label); break;
        }
    }

    void id(const EntityId& e) {
        str(e.kind);
        u64(e.index);
    }

    void message(const Message& m) {
        id(m.from);
        id(m.to);
        str(m.topic);
        value(m.payload);
        u64(m.send_tick);
    }

    Bytes take() { return std::move(out_); }

private:
    void put(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) {
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }

    Bytes out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    std::uint8_t u8() {
        need(1);
        return in_[pos_++];
    }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    double f64() { return std::bit_cast<double>(u64()); }

    std::string str() {
        const std::uint32_t n = u32();
        need(n);
        std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
        pos_ += n;
        return s;
    }

    /// Element count, sanity-checked against the bytes left (each element
    /// occupies at least `min_size` bytes).
    std::size_t count(std::size_t min_size = 1) {
        const std::uint64_t n = u64();
        if (n > (in_.size() - pos_) / std::max<std::size_t>(min_size, 1)) {
            fail(Errc::malformed, "snapshot count exceeds payload");
        }
        return static_cast<std::size_t>(n);
    }

    AttributeValue value() {
        switch (u8()) {
        case 0: {
            const std::uint8_t b = u8();
            if (b > 1) fail(Errc::malformed, "bad boolean in snapshot");
            return make_bool(b == 1);
        }
        case 1: return make_int(i64());
        case 2: return make_real(f64());
        case 3: return make_symbol(str());
        default: fail(Errc::malformed, "bad value tag in snapshot");
        }
    }

    EntityId id() {
        EntityId e;
        e.kind = str();
        e.index = u64();
        return e;
    }

    Message message() {
        Message m;
        m.from = id();
        m.to = id();
        m.topic = str();
        m.payload = value();
        m.send_tick = u64();
        return m;
    }

    bool done() const noexcept { return pos_ == in_.size(); }

private:
    void need(std::size_t n) const {
        if (in_.size() - pos_ < n) fail(Errc::malformed, "truncated snapshot");
    }

    std::uint64_t get(int n) {
        need(static_cast<std::size_t>(n));
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) {
            v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
        }
        return v;
    }

    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

inline constexpr char magic[4] = {'T', 'S', 'S', 'N'};
inline constexpr std::uint32_t format_version = 1;

}  // namespace detail

inline Bytes serialize(const SimulationState& s) {
    detail::Writer w;
    for (char c : detail::magic) w.u8(static_cast<std::uint8_t>(c));
    w.u32(detail::format_version);
    w.str(s.model);
    w.u64(s.tick);
    w.u32(static_cast<std::uint32_t>(s.grid.width));
    w.u32(static_cast<std::uint32_t>(s.grid.height));
    w.u8(static_cast<std::uint8_t>(s.grid.topology));
    w.u32(static_cast<std::uint32_t>(s.patch_fields));
    w.u64(s.patches.size());
    for (const auto& v : s.patches) w.value(v);
    w.u64(s.next_agent_index);
    w.u64(s.agents.size());
    for (const auto& a : s.agents) {
        w.id(a.id);
        w.i32(a.location.row);
        w.i32(a.location.col);
        w.u8(a.alive ? 1 : 0);
        w.u32(static_cast<std::uint32_t>(a.attrs.size()));
        for (const auto& v : a.attrs) w.value(v);
    }
    w.u64(s.mailboxes.size());
    for (const auto& [recipient, box] : s.mailboxes) {
        w.u64(recipient);
        w.u64(box.pending.size());
        for (const auto& m : box.pending) w.message(m);
        w.u64(box.inbox.size());
        for (const auto& m : box.inbox) w.message(m);
    }
    w.u64(s.channels.size());
    for (const auto& c : s.channels) {
        w.id(c.from);
        w.id(c.to);
        w.f64(c.reliability);
    }
    for (std::uint64_t word : s.rng.state()) w.u64(word);
    w.u64(s.params.size());
    for (const auto& [name, v] : s.params) {
        w.str(name);
        w.value(v);
    }
    w.u64(s.probes.size());
    for (const auto& [name, p] : s.probes) {
        w.str(name);
        w.u8(p.ok() ? 1 : 0);
        w.f64(p.value);
        w.str(p.error);
    }
    return w.take();
}

inline SimulationState deserialize(std::span<const std::uint8_t> payload) {
    detail::Reader r(payload);
    for (char c : detail::magic) {
        if (r.u8() != static_cast<std::uint8_t>(c)) fail(Errc::malformed, "not a snapshot payload");
    }
    if (r.u32() != detail::format_version) fail(Errc::malformed, "unsupported snapshot version");
    SimulationState s;
    s.model = r.str();
    s.tick = r.u64();
    s.grid.width = static_cast<int>(r.u32());
    s.grid.height = static_cast<int>(r.u32());
    const std::uint8_t topo = r.u8();
    if (topo > 1) fail(Errc::malformed, "bad topology in snapshot");
    s.grid.topology = static_cast<Topology>(topo);
    if (s.grid.width < 1 || s.grid.height < 1) fail(Errc::malformed, "bad grid size in snapshot");
    s.patch_fields = r.u32();
    const std::size_t n_values = r.count(2);
    if (n_values != s.grid.cell_count() * s.patch_fields) fail(Errc::malformed, "patch count mismatch in snapshot");
    s.patches.reserve(n_values);
    for (std::size_t i = 0; i < n_values; ++i) s.patches.push_back(r.value());
    s.next_agent_index = r.u64();
    const std::size_t n_agents = r.count(21);
    s.agents.reserve(n_agents);
    for (std::size_t i = 0; i < n_agents; ++i) {
        Agent a;
        a.id = r.id();
        a.location.row = r.i32();
        a.location.col = r.i32();
        const std::uint8_t alive = r.u8();
        if (alive > 1) fail(Errc::malformed, "bad alive flag in snapshot");
        a.alive = alive == 1;
        const std::uint32_t n_attrs = r.u32();
        for (std::uint32_t k = 0; k < n_attrs; ++k) a.attrs.push_back(r.value());
        if (!s.agents.empty() && s.agents.back().id.index >= a.id.index) {
            fail(Errc::malformed, "agents out of order in snapshot");
        }
        s.agents.push_back(std::move(a));
    }
    const std::size_t n_boxes = r.count(24);
    for (std::size_t i = 0; i < n_boxes; ++i) {
        const std::uint64_t recipient = r.u64();
        Mailbox box;
        const std::size_t n_pending = r.count(30);
        for (std::size_t k = 0; k < n_pending; ++k) box.pending.push_back(r.message());
        const std::size_t n_inbox = r.count(30);
        for (std::size_t k = 0; k < n_inbox; ++k) box.inbox.push_back(r.message());
        s.mailboxes.emplace(recipient, std::move(box));
    }
    const std::size_t n_channels = r.count(32);
    for (std::size_t i = 0; i < n_channels; ++i) {
        Channel c;
        c.from = r.id();
        c.to = r.id();
        c.reliability = r.f64();
        s.channels.push_back(std::move(c));
    }
    Rng::State rng{};
    for (auto& word : rng) word = r.u64();
    s.rng = Rng::from_state(rng);
    const std::size_t n_params = r.count(6);
    for (std::size_t i = 0; i < n_params; ++i) {
        std::string name = r.str();
        s.params.emplace(std::move(name), r.value());
    }
    const std::size_t n_probes = r.count(17);
    for (std::size_t i = 0; i < n_probes; ++i) {
        std::string name = r.str();
        ProbeResult p;
        r.u8();
        p.value = r.f64();
        p.error = r.str();
        s.probes.emplace(std::move(name), std::move(p));
    }
    if (!r.done()) fail(Errc::malformed, "trailing bytes in snapshot");
    return s;
}

/// 64-bit FNV-1a (offset basis 0xcbf29ce484222325, prime 0x100000001b3).
/// Byte-oriented, so identical on every platform.
inline std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t state_hash(const SimulationState& s) { return fnv1a64(serialize(s)); }

inline std::string hex64(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

}  // namespace tessera
