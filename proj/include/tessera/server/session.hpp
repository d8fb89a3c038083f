#pragma once

// One live simulation driven by protocol commands. Not thread-safe: the
// owner serializes every call (the network layer runs each session on its
// own strand).

#include "tessera/models/registry.hpp"
#include "tessera/server/wire.hpp"
#include "tessera/timetravel.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tessera::server {

using wire::Json;
using wire::ProtocolError;
using wire::WireMessage;

/// Everything that changed the session, in the order it happened. Play ticks
/// appear as their own entries so a log can be replayed without a clock.
/// Per-model parameter values applied before a load's own "params"
/// (the serve command reads them from a models directory).
using ParamDefaults = std::map<std::string, ParamSet, std::less<>>;

struct LogEntry {
    enum class Kind { command, play_tick } kind = Kind::command;
    WireMessage command;

    friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

class Session {
public:
    explicit Session(std::string id = "session", std::shared_ptr<const ParamDefaults> defaults = {})
        : id_(std::move(id)), defaults_(std::move(defaults)) {}

    const std::string& id() const noexcept { return id_; }
    bool loaded() const noexcept { return model_ != nullptr; }
    bool playing() const noexcept { return tps_.has_value(); }
    std::optional<double> tps() const noexcept { return tps_; }
    const SimulationState& state() const { return require_loaded(), state_; }
    const Timeline& timeline() const noexcept { return timeline_; }
    const std::vector<LogEntry>& log() const noexcept { return log_; }

    /// Applies one command; returns the events it produced (a single error
    /// event if it failed, in which case the session is unchanged).
    std::vector<WireMessage> handle(const WireMessage& cmd) {
        try {
            auto events = dispatch(cmd);
            log_.push_back({LogEntry::Kind::command, cmd});
            return events;
        } catch (const ProtocolError& e) {
            return {wire::make_error(e.code(), e.what())};
        } catch (const Error& e) {
            return {wire::make_error(wire::code_for(e.code()), e.what())};
        }
    }

    /// Decodes and applies a text frame.
    std::vector<WireMessage> handle_text(std::string_view text) {
        try {
            const WireMessage cmd = wire::decode(text);
            if (!wire::is_command(cmd.type)) {
                throw ProtocolError(wire::code::unknown_type, "'" + cmd.type + "' is not a command");
            }
            return handle(cmd);
        } catch (const ProtocolError& e) {
            return {wire::make_error(e.code(), e.what())};
        }
    }

    /// One advance of the play loop; nothing if paused.
    std::optional<WireMessage> play_tick() {
        if (!playing() || !loaded()) return std::nullopt;
        advance();
        log_.push_back({LogEntry::Kind::play_tick, {}});
        return tick_event();
    }

    /// Re-applies a log on this (fresh) session, play ticks as single steps.
    void replay(const std::vector<LogEntry>& entries) {
        for (const auto& e : entries) {
            if (e.kind == LogEntry::Kind::play_tick) {
                require_loaded();
                advance();
                log_.push_back(e);
            } else {
                handle(e.command);
            }
        }
    }

private:
    std::vector<WireMessage> dispatch(const WireMessage& cmd) {
        const Json& b = cmd.body;
        if (cmd.type == "load") return load(b);
        if (!wire::is_command(cmd.type)) {
            throw ProtocolError(wire::code::unknown_type, "unknown command '" + cmd.type + "'");
        }
        require_loaded();
        if (cmd.type == "step") return step_n(wire::unsigned_field(b, "count"));
        if (cmd.type == "play") return play(b);
        if (cmd.type == "pause") {
            tps_.reset();
            return {ack("pause")};
        }
        if (cmd.type == "rewind") return rewind(wire::unsigned_field(b, "tick"));
        if (cmd.type == "edit") return edit(b);
        if (cmd.type == "inspect") {
            return {{"inspection", wire::to_json(inspect_entity(*model_, state_, wire::entity_field(b, "entity")))}};
        }
        return subscribe(b);
    }

    std::vector<WireMessage> load(const Json& b) {
        const Model& model = models::find(wire::string_field(b, "model"));
        ParamSet params;
        if (defaults_) {
            if (auto d = defaults_->find(model.name); d != defaults_->end()) params = d->second;
        }
        if (auto it = b.find("params"); it != b.end()) {
            if (!it->is_object()) throw ProtocolError(wire::code::malformed, "'params' must be an object");
            for (const auto& [name, value] : it->items()) {
                auto idx = field_index(model.params, name);
                if (!idx) throw ProtocolError(wire::code::bad_param, "unknown parameter '" + name + "'");
                try {
                    params[name] = wire::value_from_json(model.params[*idx], value);
                } catch (const Error& e) {
                    throw ProtocolError(wire::code::bad_param, e.what());
                } catch (const ProtocolError& e) {
                    throw ProtocolError(wire::code::bad_param, e.what());
                }
            }
        }
        std::uint64_t seed = 0;
        if (b.contains("seed")) seed = wire::unsigned_field(b, "seed");
        SimulationState initial;
        try {
            initial = init_simulation(model, params, seed);
        } catch (const Error& e) {
            throw ProtocolError(wire::code::bad_param, e.what());
        }
        model_ = &model;
        state_ = std::move(initial);
        timeline_ = Timeline{};
        timeline_.record(state_);
        tps_.reset();
        povs_.clear();
        probes_ = false;

        Json povs = Json::array();
        for (const auto& p : model.povs) povs.push_back(p.name);
        Json probes = Json::array();
        for (const auto& p : model.probes) probes.push_back(p.name);
        return {{"loaded", Json{{"height", state_.grid.height},
                                {"model", model.name},
                                {"povs", std::move(povs)},
                                {"probes", std::move(probes)},
                                {"tick", state_.tick},
                                {"width", state_.grid.width}}}};
    }

    std::vector<WireMessage> step_n(std::uint64_t count) {
        if (count == 0) return {ack("step")};
        std::vector<WireMessage> out;
        for (std::uint64_t i = 0; i < count; ++i) {
            advance();
            out.push_back(tick_event());
        }
        out.push_back(timeline_event());
        return out;
    }

    std::vector<WireMessage> play(const Json& b) {
        const Json& j = wire::field(b, "tps");
        if (!j.is_number()) throw ProtocolError(wire::code::malformed, "'tps' must be a number");
        const double tps = j.get<double>();
        if (!(tps > 0.0) || tps > 1000.0) throw ProtocolError(wire::code::range, "'tps' must lie in (0, 1000]");
        tps_ = tps;
        return {ack("play")};
    }

    std::vector<WireMessage> rewind(std::uint64_t tick) {
        state_ = timeline_.rewind(tick);
        return {timeline_event(), tick_event()};
    }

    std::vector<WireMessage> edit(const Json& b) {
        const EntityId id = wire::entity_field(b, "entity");
        const std::string attr = wire::string_field(b, "attr");
        const Json& value = wire::field(b, "value");
        const AttributeSpec* spec = nullptr;
        if (id.is_patch()) {
            checked_patch_cell(state_, id);
            spec = &model_->patch_schema[model_->patch_field(attr)];
        } else {
            const Agent& a = state_.live_agent(id);
            spec = &model_->agent_schema(a.id.kind)[model_->agent_field(a.id.kind, attr)];
        }
        SimulationState edited = set_attribute(*model_, state_, id, attr, wire::value_from_json(*spec, value));
        timeline_.resume(edited);
        state_ = std::move(edited);
        tps_.reset();  // edits pause the run
        return {timeline_event(), tick_event()};
    }

    std::vector<WireMessage> subscribe(const Json& b) {
        std::set<std::string> povs;
        if (auto it = b.find("povs"); it != b.end()) {
            if (!it->is_array()) throw ProtocolError(wire::code::malformed, "'povs' must be an array");
            for (const auto& p : *it) {
                if (!p.is_string()) throw ProtocolError(wire::code::malformed, "point of view names are strings");
                povs.insert(model_->pov(p.get<std::string>()).name);
            }
        }
        bool probes = false;
        if (auto it = b.find("probes"); it != b.end()) {
            if (!it->is_boolean()) throw ProtocolError(wire::code::malformed, "'probes' must be a boolean");
            probes = it->get<bool>();
        }
        povs_ = std::move(povs);
        probes_ = probes;
        return {ack("subscribe"), tick_event()};
    }

    void advance() {
        SimulationState next = tessera::step(*model_, state_);
        timeline_.advance(next);
        state_ = std::move(next);
    }

    WireMessage tick_event() const {
        Json frames = Json::object();
        for (const auto& name : povs_) frames[name] = wire::to_json(render_pov(*model_, state_, name));
        return {"tick", Json{{"frames", std::move(frames)},
                             {"probes", probes_ ? wire::to_json(state_.probes) : Json::object()},
                             {"tick", state_.tick}}};
    }

    WireMessage timeline_event() const {
        return {"timeline", Json{{"branch_count", timeline_.branch_count()},
                                 {"current", timeline_.current()},
                                 {"max", timeline_.max_tick()},
                                 {"playing", playing()}}};
    }

    static WireMessage ack(std::string_view of) { return {"ack", Json{{"of", of}}}; }

    void require_loaded() const {
        if (!model_) throw ProtocolError(wire::code::not_loaded, "no model loaded in this session");
    }

    std::string id_;
    std::shared_ptr<const ParamDefaults> defaults_;
    const Model* model_ = nullptr;
    SimulationState state_;
    Timeline timeline_;
    std::optional<double> tps_;
    std::set<std::string> povs_;
    bool probes_ = false;
    std::vector<LogEntry> log_;
};

}  // namespace tessera::server
