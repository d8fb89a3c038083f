#pragma once

// JSON text frames for the session protocol. One object per frame with a
// string "type"; keys are emitted in sorted order so transcripts are stable.

#include "tessera/kernel.hpp"
#include "tessera/observation.hpp"

#include <json.hpp>

#include <array>
#include <string>
#include <string_view>

namespace tessera::wire {

using Json = nlohmann::json;

inline constexpr std::array<std::string_view, 8> command_types{"load",   "step",   "play",    "pause",
                                                               "rewind", "edit",   "inspect", "subscribe"};
inline constexpr std::array<std::string_view, 6> event_types{"loaded",     "tick", "timeline",
                                                             "inspection", "ack",  "error"};

// Stable error codes carried by error events.
namespace code {
inline constexpr std::string_view unknown_type = "E_UNKNOWN_TYPE";
inline constexpr std::string_view bad_tick = "E_BAD_TICK";
inline constexpr std::string_view no_entity = "E_NO_ENTITY";
inline constexpr std::string_view range = "E_RANGE";
inline constexpr std::string_view not_loaded = "E_NOT_LOADED";
inline constexpr std::string_view malformed = "E_MALFORMED";
inline constexpr std::string_view unknown_model = "E_UNKNOWN_MODEL";
inline constexpr std::string_view bad_param = "E_BAD_PARAM";
inline constexpr std::string_view type = "E_TYPE";
inline constexpr std::string_view unknown_pov = "E_UNKNOWN_POV";
inline constexpr std::string_view unknown_attr = "E_UNKNOWN_ATTR";
}  // namespace code

struct WireMessage {
    std::string type;
    Json body = Json::object();  // everything except "type"

    friend bool operator==(const WireMessage&, const WireMessage&) = default;
};

/// Thrown by decode and by command handlers; becomes an error event.
class ProtocolError : public std::runtime_error {
public:
    ProtocolError(std::string_view code, const std::string& what) : std::runtime_error(what), code_(code) {}
    std::string_view code() const noexcept { return code_; }

private:
    std::string_view code_;
};

inline std::string_view code_for(Errc e) noexcept {
    switch (e) {
    case Errc::unknown_entity: return code::no_entity;
    case Errc::unknown_attribute: return code::unknown_attr;
    case Errc::unknown_parameter: return code::bad_param;
    case Errc::unknown_model: return code::unknown_model;
    case Errc::unknown_pov: return code::unknown_pov;
    case Errc::type_mismatch: return code::type;
    case Errc::out_of_range: return code::range;
    case Errc::bad_tick: return code::bad_tick;
    case Errc::no_channel:
    case Errc::dimension_mismatch:
    case Errc::malformed:
    case Errc::invalid_argument: return code::malformed;
    }
    return code::malformed;
}

inline std::string encode(const WireMessage& msg) {
    Json j = msg.body.is_object() ? msg.body : Json::object();
    j["type"] = msg.type;
    return j.dump();
}

inline bool is_command(std::string_view type) {
    return std::find(command_types.begin(), command_types.end(), type) != command_types.end();
}

inline bool is_event(std::string_view type) {
    return std::find(event_types.begin(), event_types.end(), type) != event_types.end();
}

/// Parses one frame. Accepts command and event types alike so that both
/// directions round-trip; anything else is E_UNKNOWN_TYPE.
inline WireMessage decode(std::string_view text) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ProtocolError(code::malformed, "frame is not valid JSON");
    if (!j.is_object()) throw ProtocolError(code::malformed, "frame must be a JSON object");
    auto it = j.find("type");
    if (it == j.end() || !it->is_string()) throw ProtocolError(code::malformed, "frame needs a string \"type\"");
    WireMessage msg;
    msg.type = it->get<std::string>();
    if (!is_command(msg.type) && !is_event(msg.type)) {
        throw ProtocolError(code::unknown_type, "unknown message type '" + msg.type + "'");
    }
    j.erase(it);
    msg.body = std::move(j);
    return msg;
}

inline WireMessage make_error(std::string_view code, const std::string& message) {
    return {"error", Json{{"code", code}, {"message", message}}};
}

// ---------------------------------------------------------------------------
// Value and entity encodings

inline Json to_json(const AttributeValue& v) {
    return std::visit(
        [](const auto& x) -> Json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Symbol>) {
                return x.label;
            } else {
                return x;
            }
        },
        v);
}

/// JSON scalar to the declared attribute type. Reals accept integers;
/// integers accept integral reals; symbols come as strings.
inline AttributeValue value_from_json(const AttributeSpec& spec, const Json& j) {
    AttributeValue raw;
    if (j.is_boolean()) {
        raw = make_bool(j.get<bool>());
    } else if (j.is_number_integer()) {
        raw = make_int(j.get<std::int64_t>());
    } else if (j.is_number_float()) {
        raw = make_real(j.get<double>());
    } else if (j.is_string()) {
        raw = make_symbol(j.get<std::string>());
    } else {
        throw ProtocolError(code::type, "value for '" + spec.name + "' must be a scalar");
    }
    return validate(spec, raw);
}

inline Json to_json(const EntityId& id) { return Json{{"index", id.index}, {"kind", id.kind}}; }

inline Json to_json(Rgb c) { return Json::array({c.r, c.g, c.b}); }

/// Cells as one flat row-major RGB array; agents carry their own glyph.
inline Json to_json(const RenderFrame& f) {
    Json cells = Json::array();
    for (const auto& v : f.cells) {
        cells.push_back(v.color.r);
        cells.push_back(v.color.g);
        cells.push_back(v.color.b);
    }
    Json agents = Json::array();
    for (const auto& a : f.agents) {
        agents.push_back(Json{{"col", a.location.col},
                              {"color", to_json(a.visual.color)},
                              {"id", to_json(a.id)},
                              {"row", a.location.row},
                              {"shape", std::string(to_string(a.visual.shape))},
                              {"size", a.visual.size}});
    }
    return Json{{"agents", std::move(agents)}, {"cells", std::move(cells)}, {"height", f.height}, {"width", f.width}};
}

inline Json to_json(const ProbeRecord& probes) {
    Json out = Json::object();
    for (const auto& [name, r] : probes) {
        out[name] = r.ok() ? Json(r.value) : Json(nullptr);
    }
    return out;
}

inline Json to_json(const Inspection& ins) {
    Json attrs = Json::object();
    for (const auto& [name, v] : ins.attrs) attrs[name] = to_json(v);
    return Json{{"attrs", std::move(attrs)},
                {"entity", to_json(ins.id)},
                {"location", Json{{"col", ins.location.col}, {"row", ins.location.row}}}};
}

// ---------------------------------------------------------------------------
// Field access for command bodies

inline const Json& field(const Json& body, std::string_view name) {
    auto it = body.find(name);
    if (it == body.end()) throw ProtocolError(code::malformed, "missing field '" + std::string(name) + "'");
    return *it;
}

inline std::string string_field(const Json& body, std::string_view name) {
    const Json& j = field(body, name);
    if (!j.is_string()) throw ProtocolError(code::malformed, "field '" + std::string(name) + "' must be a string");
    return j.get<std::string>();
}

inline std::uint64_t unsigned_field(const Json& body, std::string_view name) {
    const Json& j = field(body, name);
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer()) {
        const auto v = j.get<std::int64_t>();
        if (v < 0) throw ProtocolError(code::range, "field '" + std::string(name) + "' must be >= 0");
        return static_cast<std::uint64_t>(v);
    }
    throw ProtocolError(code::malformed, "field '" + std::string(name) + "' must be an integer");
}

inline EntityId entity_field(const Json& body, std::string_view name) {
    const Json& j = field(body, name);
    if (!j.is_object()) throw ProtocolError(code::malformed, "field '" + std::string(name) + "' must be an object");
    return EntityId{string_field(j, "kind"), unsigned_field(j, "index")};
}

}  // namespace tessera::wire
