#pragma once

#include "tessera/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

namespace tessera {

/// Enumerated label, e.g. a topology name or a landscape type.
struct Symbol {
    std::string label;

    friend bool operator==(const Symbol&, const Symbol&) = default;
    friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

using AttributeValue = std::variant<bool, std::int64_t, double, Symbol>;

enum class ValueType : std::uint8_t { boolean = 0, integer = 1, real = 2, symbol = 3 };

constexpr std::string_view to_string(ValueType type) noexcept {
    switch (type) {
    case ValueType::boolean: return "boolean";
    case ValueType::integer: return "integer";
    case ValueType::real: return "real";
    case ValueType::symbol: return "symbol";
    }
    return "?";
}

inline ValueType type_of(const AttributeValue& value) noexcept { return static_cast<ValueType>(value.index()); }

inline AttributeValue make_bool(bool b) { return AttributeValue{std::in_place_type<bool>, b}; }
inline AttributeValue make_int(std::int64_t i) { return AttributeValue{std::in_place_type<std::int64_t>, i}; }
inline AttributeValue make_real(double r) { return AttributeValue{std::in_place_type<double>, r}; }
inline AttributeValue make_symbol(std::string s) { return AttributeValue{std::in_place_type<Symbol>, Symbol{std::move(s)}}; }

/// Shortest decimal form that parses back to the identical double.
inline std::string format_real(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

inline std::optional<double> parse_real(std::string_view text) {
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        return std::nullopt;
    }
    return value;
}

inline std::optional<std::int64_t> parse_integer(std::string_view text) {
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        return std::nullopt;
    }
    return value;
}

inline std::string to_string(const AttributeValue& value) {
    switch (type_of(value)) {
    case ValueType::boolean: return std::get<bool>(value) ? "true" : "false";
    case ValueType::integer: return std::to_string(std::get<std::int64_t>(value));
    case ValueType::real: return format_real(std::get<double>(value));
    case ValueType::symbol: return std::get<Symbol>(value).label;
    }
    return {};
}

/// Numeric view of a value; booleans map to 0/1, symbols have none.
inline std::optional<double> as_number(const AttributeValue& value) {
    switch (type_of(value)) {
    case ValueType::boolean: return std::get<bool>(value) ? 1.0 : 0.0;
    case ValueType::integer: return static_cast<double>(std::get<std::int64_t>(value));
    case ValueType::real: return std::get<double>(value);
    case ValueType::symbol: return std::nullopt;
    }
    return std::nullopt;
}

/// Declared attribute or parameter: name, type, optional inclusive bounds for
/// numeric types, allowed labels for symbols, and the default value.
struct AttributeSpec {
    std::string name;
    ValueType type = ValueType::real;
    std::optional<double> min;
    std::optional<double> max;
    std::vector<std::string> symbols;
    AttributeValue default_value = make_real(0.0);
    std::string doc;
};

using Schema = std::vector<AttributeSpec>;

inline AttributeSpec real_attr(std::string name, double def, std::optional<double> lo = {}, std::optional<double> hi = {},
                               std::string doc = {}) {
    return {std::move(name), ValueType::real, lo, hi, {}, make_real(def), std::move(doc)};
}

inline AttributeSpec int_attr(std::string name, std::int64_t def, std::optional<double> lo = {},
                              std::optional<double> hi = {}, std::string doc = {}) {
    return {std::move(name), ValueType::integer, lo, hi, {}, make_int(def), std::move(doc)};
}

inline AttributeSpec bool_attr(std::string name, bool def, std::string doc = {}) {
    return {std::move(name), ValueType::boolean, {}, {}, {}, make_bool(def), std::move(doc)};
}

inline AttributeSpec symbol_attr(std::string name, std::vector<std::string> labels, std::string def,
                                 std::string doc = {}) {
    return {std::move(name), ValueType::symbol, {}, {}, std::move(labels), make_symbol(std::move(def)), std::move(doc)};
}

inline std::optional<std::size_t> field_index(const Schema& schema, std::string_view name) {
    auto it = std::find_if(schema.begin(), schema.end(), [&](const AttributeSpec& s) { return s.name == name; });
    if (it == schema.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - schema.begin());
}

/// Integral reals are accepted for integer fields, and integers for real
/// fields; anything else must match the declared type exactly.
inline AttributeValue coerce(const AttributeSpec& spec, const AttributeValue& value) {
    const ValueType have = type_of(value);
    if (have == spec.type) {
        return value;
    }
    if (spec.type == ValueType::real && have == ValueType::integer) {
        return make_real(static_cast<double>(std::get<std::int64_t>(value)));
    }
    if (spec.type == ValueType::integer && have == ValueType::real) {
        const double r = std::get<double>(value);
        if (std::isfinite(r) && std::floor(r) == r && std::abs(r) < 9.0e15) {
            return make_int(static_cast<std::int64_t>(r));
        }
    }
    fail(Errc::type_mismatch, "attribute '" + spec.name + "' expects " + std::string(to_string(spec.type)) + ", got " +
                                  std::string(to_string(have)));
}

/// Throws type_mismatch or out_of_range; returns the coerced value.
inline AttributeValue validate(const AttributeSpec& spec, const AttributeValue& value) {
    AttributeValue v = coerce(spec, value);
    if (spec.type == ValueType::real || spec.type == ValueType::integer) {
        const double x = *as_number(v);
        if (std::isnan(x) || (spec.min && x < *spec.min) || (spec.max && x > *spec.max)) {
            fail(Errc::out_of_range, "attribute '" + spec.name + "' value " + to_string(v) + " outside [" +
                                         (spec.min ? format_real(*spec.min) : std::string("-inf")) + ", " +
                                         (spec.max ? format_real(*spec.max) : std::string("inf")) + "]");
        }
    }
    if (spec.type == ValueType::symbol && !spec.symbols.empty()) {
        const auto& label = std::get<Symbol>(v).label;
        if (std::find(spec.symbols.begin(), spec.symbols.end(), label) == spec.symbols.end()) {
            fail(Errc::out_of_range, "attribute '" + spec.name + "' has no label '" + label + "'");
        }
    }
    return v;
}

/// Parses a textual value ("true", "3", "0.25", "torus") per the spec's type.
inline AttributeValue parse_value(const AttributeSpec& spec, std::string_view text) {
    switch (spec.type) {
    case ValueType::boolean:
        if (text == "true" || text == "1") return make_bool(true);
        if (text == "false" || text == "0") return make_bool(false);
        break;
    case ValueType::integer:
        if (auto i = parse_integer(text)) return make_int(*i);
        if (auto r = parse_real(text)) return coerce(spec, make_real(*r));
        break;
    case ValueType::real:
        if (auto r = parse_real(text)) return make_real(*r);
        break;
    case ValueType::symbol: return make_symbol(std::string(text));
    }
    fail(Errc::type_mismatch, "cannot read '" + std::string(text) + "' as " + std::string(to_string(spec.type)) +
                                  " for '" + spec.name + "'");
}

using ParamSet = std::map<std::string, AttributeValue, std::less<>>;

/// Fills defaults, rejects unknown names, validates each value.
inline ParamSet resolve_params(const Schema& schema, const ParamSet& overrides) {
    ParamSet out;
    for (const auto& spec : schema) {
        out.emplace(spec.name, spec.default_value);
    }
    for (const auto& [name, value] : overrides) {
        auto idx = field_index(schema, name);
        if (!idx) {
            fail(Errc::unknown_parameter, "unknown parameter '" + name + "'");
        }
        out[name] = validate(schema[*idx], value);
    }
    return out;
}

inline double param_real(const ParamSet& params, std::string_view name) {
    auto it = params.find(name);
    if (it == params.end()) fail(Errc::unknown_parameter, "missing parameter '" + std::string(name) + "'");
    auto n = as_number(it->second);
    if (!n) fail(Errc::type_mismatch, "parameter '" + std::string(name) + "' is not numeric");
    return *n;
}

inline std::int64_t param_int(const ParamSet& params, std::string_view name) {
    auto it = params.find(name);
    if (it == params.end()) fail(Errc::unknown_parameter, "missing parameter '" + std::string(name) + "'");
    if (const auto* i = std::get_if<std::int64_t>(&it->second)) return *i;
    fail(Errc::type_mismatch, "parameter '" + std::string(name) + "' is not an integer");
}

inline const std::string& param_symbol(const ParamSet& params, std::string_view name) {
    auto it = params.find(name);
    if (it == params.end()) fail(Errc::unknown_parameter, "missing parameter '" + std::string(name) + "'");
    if (const auto* s = std::get_if<Symbol>(&it->second)) return s->label;
    fail(Errc::type_mismatch, "parameter '" + std::string(name) + "' is not a symbol");
}

}  // namespace tessera
