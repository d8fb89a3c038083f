#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tessera {

enum class Errc {
    unknown_entity,
    unknown_attribute,
    unknown_parameter,
    unknown_model,
    unknown_pov,
    type_mismatch,
    out_of_range,
    bad_tick,
    no_channel,
    dimension_mismatch,
    malformed,
    invalid_argument,
};

constexpr std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::unknown_entity: return "unknown entity";
    case Errc::unknown_attribute: return "unknown attribute";
    case Errc::unknown_parameter: return "unknown parameter";
    case Errc::unknown_model: return "unknown model";
    case Errc::unknown_pov: return "unknown point of view";
    case Errc::type_mismatch: return "type mismatch";
    case Errc::out_of_range: return "out of range";
    case Errc::bad_tick: return "bad tick";
    case Errc::no_channel: return "no such channel";
    case Errc::dimension_mismatch: return "dimension mismatch";
    case Errc::malformed: return "malformed input";
    case Errc::invalid_argument: return "invalid argument";
    }
    return "error";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace tessera
