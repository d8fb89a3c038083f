#pragma once

// Run and sweep configuration. Config files are single JSON objects, the same
// encoding as protocol bodies; command-line flags override file values.

#include "tessera/models/registry.hpp"
#include "tessera/raster.hpp"
#include "tessera/server/session.hpp"
#include "tessera/server/wire.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tessera::cli {

using wire::Json;
namespace fs = std::filesystem;

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_runtime = 3, exit_port_in_use = 4 };

/// Anything wrong with what the user asked for (exit 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure while running a valid configuration (exit 3).
class RunError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LayerBinding {
    std::string attr;
    fs::path path;
    AffineTransform transform;
    std::optional<ClampBounds> clamp;
};

struct RunConfig {
    std::string model;
    ParamSet params;
    std::vector<std::uint64_t> seeds;
    std::uint64_t steps = 0;
    fs::path out;  // prefix; one "<out>_seed<k>.csv" per seed
    std::vector<LayerBinding> layers;
    std::optional<fs::path> timeline;  // export directory
};

struct SweepSpec {
    RunConfig base;  // model, fixed params, seeds, steps, layers
    std::vector<std::pair<std::string, std::vector<AttributeValue>>> grid;  // sorted by name
    fs::path out;                                                          // summary CSV
    unsigned jobs = 1;
};

inline std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Json read_json_file(const fs::path& path) {
    Json j = Json::parse(read_text(path), nullptr, false);
    if (j.is_discarded()) throw ConfigError(path.string() + ": not valid JSON");
    if (!j.is_object()) throw ConfigError(path.string() + ": expected a JSON object");
    return j;
}

inline const Model& find_model(std::string_view name) {
    try {
        return models::find(name);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

inline const AttributeSpec& param_spec(const Model& model, std::string_view name) {
    auto idx = field_index(model.params, name);
    if (!idx) throw ConfigError("model '" + model.name + "' has no parameter '" + std::string(name) + "'");
    return model.params[*idx];
}

inline AttributeValue param_from_json(const Model& model, std::string_view name, const Json& j) {
    const AttributeSpec& spec = param_spec(model, name);
    try {
        return wire::value_from_json(spec, j);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

inline ParamSet params_from_json(const Model& model, const Json& j) {
    if (!j.is_object()) throw ConfigError("'params' must be an object");
    ParamSet out;
    for (const auto& [name, value] : j.items()) out[name] = param_from_json(model, name, value);
    return out;
}

/// "name=value" as given to --param.
inline std::pair<std::string, AttributeValue> param_from_text(const Model& model, std::string_view kv) {
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("expected name=value, got '" + std::string(kv) + "'");
    }
    const std::string name(kv.substr(0, eq));
    const AttributeSpec& spec = param_spec(model, name);
    try {
        return {name, validate(spec, parse_value(spec, kv.substr(eq + 1)))};
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

/// Full validation of a parameter set against the model, cross checks included.
inline void check_params(const Model& model, const ParamSet& params) {
    try {
        const ParamSet resolved = resolve_params(model.params, params);
        if (model.check_params) model.check_params(resolved);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

namespace detail {

inline std::uint64_t to_u64(const Json& j, std::string_view what) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
    throw ConfigError("'" + std::string(what) + "' must be a non-negative integer");
}

inline std::string to_str(const Json& j, std::string_view what) {
    if (!j.is_string()) throw ConfigError("'" + std::string(what) + "' must be a string");
    return j.get<std::string>();
}

inline double to_real(const Json& j, std::string_view what) {
    if (!j.is_number()) throw ConfigError("'" + std::string(what) + "' must be a number");
    return j.get<double>();
}

inline fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

inline std::vector<std::uint64_t> seeds_from_json(const Json& j) {
    std::vector<std::uint64_t> out;
    if (j.is_array()) {
        for (const auto& s : j) out.push_back(to_u64(s, "seeds"));
    } else {
        out.push_back(to_u64(j, "seeds"));
    }
    return out;
}

inline LayerBinding layer_from_json(const Json& j, const fs::path& base) {
    if (!j.is_object()) throw ConfigError("each layer must be an object");
    LayerBinding b;
    b.attr = to_str(j.contains("attr") ? j.at("attr") : Json(), "attr");
    b.path = resolve(base, to_str(j.contains("path") ? j.at("path") : Json(), "path"));
    if (j.contains("scale")) b.transform.scale = to_real(j.at("scale"), "scale");
    if (j.contains("offset")) b.transform.offset = to_real(j.at("offset"), "offset");
    if (j.contains("clamp")) {
        const Json& c = j.at("clamp");
        if (!c.is_array() || c.size() != 2) throw ConfigError("'clamp' must be [lo, hi]");
        b.clamp = ClampBounds{to_real(c[0], "clamp"), to_real(c[1], "clamp")};
        if (b.clamp->lo > b.clamp->hi) throw ConfigError("'clamp' needs lo <= hi");
    }
    return b;
}

}  // namespace detail

/// "attr=path" as given to --layer.
inline LayerBinding layer_from_text(std::string_view kv) {
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == kv.size()) {
        throw ConfigError("expected attr=path, got '" + std::string(kv) + "'");
    }
    return LayerBinding{std::string(kv.substr(0, eq)), fs::path(std::string(kv.substr(eq + 1))), {}, {}};
}

/// Reads the run keys of a config object. Relative paths resolve against `base`.
/// Keys: model, params, seeds (int or list), steps, out, layers, timeline.
inline RunConfig run_config_from_json(const Json& j, const fs::path& base = {}) {
    static const std::vector<std::string> known{"model", "params", "seeds", "steps", "out",
                                                "layers", "timeline", "grid", "jobs"};
    for (const auto& [key, _] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    RunConfig c;
    if (j.contains("model")) c.model = detail::to_str(j.at("model"), "model");
    if (j.contains("params")) {
        if (c.model.empty()) throw ConfigError("'params' given without 'model'");
        c.params = params_from_json(find_model(c.model), j.at("params"));
    }
    if (j.contains("seeds")) c.seeds = detail::seeds_from_json(j.at("seeds"));
    if (j.contains("steps")) c.steps = detail::to_u64(j.at("steps"), "steps");
    if (j.contains("out")) c.out = detail::resolve(base, detail::to_str(j.at("out"), "out"));
    if (j.contains("timeline")) c.timeline = detail::resolve(base, detail::to_str(j.at("timeline"), "timeline"));
    if (j.contains("layers")) {
        if (!j.at("layers").is_array()) throw ConfigError("'layers' must be an array");
        for (const auto& l : j.at("layers")) c.layers.push_back(detail::layer_from_json(l, base));
    }
    return c;
}

/// Checks everything that can be checked before running.
inline void validate(const RunConfig& c) {
    if (c.model.empty()) throw ConfigError("no model given");
    const Model& model = find_model(c.model);
    check_params(model, c.params);
    if (c.seeds.empty()) throw ConfigError("at least one seed is required");
    if (c.out.empty()) throw ConfigError("no output path given");
    for (const auto& l : c.layers) {
        if (!field_index(model.patch_schema, l.attr)) {
            throw ConfigError("model '" + model.name + "' has no patch attribute '" + l.attr + "'");
        }
        if (!fs::is_regular_file(l.path)) throw ConfigError("layer file not found: " + l.path.string());
    }
}

/// Sweep spec: a run config plus "grid" (name -> list of values) and an
/// optional "jobs". Grid axes are ordered by name.
inline SweepSpec sweep_from_json(const Json& j, const fs::path& base = {}) {
    SweepSpec s;
    s.base = run_config_from_json(j, base);
    s.out = s.base.out;
    if (j.contains("jobs")) {
        const auto jobs = detail::to_u64(j.at("jobs"), "jobs");
        if (jobs == 0) throw ConfigError("'jobs' must be at least 1");
        s.jobs = static_cast<unsigned>(std::min<std::uint64_t>(jobs, 256));
    }
    if (s.base.model.empty()) throw ConfigError("no model given");
    const Model& model = find_model(s.base.model);
    if (!j.contains("grid") || !j.at("grid").is_object() || j.at("grid").empty()) {
        throw ConfigError("sweep needs a non-empty 'grid' object");
    }
    for (const auto& [name, values] : j.at("grid").items()) {
        if (!values.is_array() || values.empty()) throw ConfigError("grid axis '" + name + "' needs a non-empty list");
        std::vector<AttributeValue> axis;
        for (const auto& v : values) axis.push_back(param_from_json(model, name, v));
        s.grid.emplace_back(name, std::move(axis));
    }
    std::sort(s.grid.begin(), s.grid.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return s;
}

/// Grid combinations, first axis slowest.
inline std::vector<ParamSet> combinations(const SweepSpec& s) {
    std::vector<ParamSet> out{s.base.params};
    for (const auto& [name, values] : s.grid) {
        std::vector<ParamSet> next;
        next.reserve(out.size() * values.size());
        for (const auto& p : out) {
            for (const auto& v : values) {
                ParamSet q = p;
                q[name] = v;
                next.push_back(std::move(q));
            }
        }
        out = std::move(next);
    }
    return out;
}

inline void validate(const SweepSpec& s) {
    RunConfig probe = s.base;
    probe.out = s.out;
    validate(probe);
    const Model& model = find_model(s.base.model);
    for (const auto& p : combinations(s)) check_params(model, p);
}

/// Default parameters per model from a directory of run configs ("*.json",
/// each naming its model). Missing or unreadable directories are config errors.
inline server::ParamDefaults load_models_dir(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ConfigError("models directory not found: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    server::ParamDefaults out;
    for (const auto& f : files) {
        RunConfig c;
        try {
            c = run_config_from_json(read_json_file(f), f.parent_path());
        } catch (const ConfigError& e) {
            throw ConfigError(f.string() + ": " + e.what());
        }
        if (c.model.empty()) throw ConfigError(f.string() + ": no 'model' key");
        const Model& model = find_model(c.model);
        check_params(model, c.params);
        if (!out.emplace(model.name, c.params).second) {
            throw ConfigError(f.string() + ": second parameter file for '" + model.name + "'");
        }
    }
    return out;
}

}  // namespace tessera::cli
