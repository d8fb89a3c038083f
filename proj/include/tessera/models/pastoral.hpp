#pragma once

#include "tessera/model.hpp"

#include <algorithm>
#include <cstdint>

namespace tessera::models {

// Pastoral unit: patches carry ground water and fresh/dry grass, cows graze,
// trees draw water. One tick is roughly one week; the default 52-tick cycle
// has a 16-week wet season at its start.
//
// Every rate lives in this table so a workshop can revise it without touching
// the rules. Names map to parameter keys in the model definition below.
struct PastoralParams {
    int width = 20;
    int height = 20;
    Topology topology = Topology::bounded;
    std::int64_t season_length = 52;     // S, ticks per seasonal cycle
    std::int64_t wet_length = 16;        // W, wet ticks at the start of each cycle
    double rain = 0.08;                  // r0, humidity gained per wet tick
    double evaporation = 0.02;           // e0, humidity lost per tick
    double tree_uptake = 0.05;           // u_tree, humidity drawn per tree on the patch
    double grass_growth = 0.25;          // g0
    double drying_threshold = 0.15;      // h_dry, fresh grass dries below this humidity
    double drying_rate = 0.2;            // delta
    double dry_decay = 0.05;             // mu
    double bite = 0.3;                   // b_max, grass a cow can eat per tick
    double energy_yield = 1.0;           // y, energy per unit of grass
    double move_cost = 0.1;              // c_move
    double initial_energy = 1.0;         // E0
    double metabolism = 0.05;            // fixed upkeep per tick
    std::int64_t herd_size = 10;
    std::int64_t tree_count = 15;
    std::int64_t herd_scale = 1;         // >1 turns each cow into a herd: bite and upkeep scale with it

    static PastoralParams from(const ParamSet& p) {
        PastoralParams out;
        out.width = static_cast<int>(param_int(p, "width"));
        out.height = static_cast<int>(param_int(p, "height"));
        out.topology = parse_topology(param_symbol(p, "topology"));
        out.season_length = param_int(p, "season_length");
        out.wet_length = param_int(p, "wet_length");
        out.rain = param_real(p, "rain");
        out.evaporation = param_real(p, "evaporation");
        out.tree_uptake = param_real(p, "tree_uptake");
        out.grass_growth = param_real(p, "grass_growth");
        out.drying_threshold = param_real(p, "drying_threshold");
        out.drying_rate = param_real(p, "drying_rate");
        out.dry_decay = param_real(p, "dry_decay");
        out.bite = param_real(p, "bite");
        out.energy_yield = param_real(p, "energy_yield");
        out.move_cost = param_real(p, "move_cost");
        out.initial_energy = param_real(p, "initial_energy");
        out.metabolism = param_real(p, "metabolism");
        out.herd_size = param_int(p, "herd_size");
        out.tree_count = param_int(p, "tree_count");
        out.herd_scale = param_int(p, "herd_scale");
        return out;
    }
};

inline double rain_at(std::uint64_t tick, const PastoralParams& p) {
    const auto season = static_cast<std::uint64_t>(p.season_length);
    return (tick % season) < static_cast<std::uint64_t>(p.wet_length) ? p.rain : 0.0;
}

inline double water_update(double humidity, std::uint64_t tick, std::int64_t trees, const PastoralParams& p) {
    const double h = humidity + rain_at(tick, p) - p.evaporation - p.tree_uptake * static_cast<double>(trees);
    return std::clamp(h, 0.0, 1.0);
}

struct Grass {
    double fresh = 0.0;
    double dry = 0.0;
};

/// Logistic growth on free capacity scaled by humidity; fresh grass dries
/// when the patch is below the drying threshold; dry grass decays.
inline Grass grass_update(double fresh, double dry, double humidity, const PastoralParams& p) {
    const double growth = p.grass_growth * humidity * std::max(0.0, 1.0 - fresh - dry);
    const double dryout = humidity < p.drying_threshold ? p.drying_rate * fresh : 0.0;
    Grass g;
    g.fresh = std::clamp(fresh + growth - dryout, 0.0, 1.0);
    g.dry = std::clamp(dry + dryout - p.dry_decay * dry, 0.0, 1.0);
    g.dry = std::min(g.dry, 1.0 - g.fresh);
    return g;
}

namespace pastoral {

inline constexpr std::size_t humidity = 0;
inline constexpr std::size_t fresh = 1;
inline constexpr std::size_t dry = 2;
inline constexpr std::size_t energy = 0;   // cow
inline constexpr std::size_t biomass = 0;  // tree

inline constexpr Rgb white{255, 255, 255};
inline constexpr Rgb blue{0, 0, 255};
inline constexpr Rgb green{0, 160, 0};
inline constexpr Rgb yellow{230, 200, 0};
inline constexpr Rgb cow_red{220, 20, 20};
inline constexpr Rgb tree_pink{255, 105, 180};
inline constexpr double cow_size = 0.6;
inline constexpr double tree_size = 0.5;

inline Rgb humidity_color(double h) { return lerp(white, blue, h); }
inline Rgb fresh_color(double f) { return lerp(white, green, f); }
inline Rgb dry_color(double d) { return lerp(white, yellow, d); }

/// white * (1 - f - d) + green * f + yellow * d, per channel.
inline Rgb grass_color(double f, double d) {
    f = std::clamp(f, 0.0, 1.0);
    d = std::clamp(d, 0.0, 1.0 - f);
    const double bare = 1.0 - f - d;
    auto mix = [&](std::uint8_t w, std::uint8_t g, std::uint8_t y) {
        return static_cast<std::uint8_t>(std::lround(bare * w + f * g + d * y));
    };
    return {mix(white.r, green.r, yellow.r), mix(white.g, green.g, yellow.g), mix(white.b, green.b, yellow.b)};
}

}  // namespace pastoral

/// Moves to the best-grazed cell among the current one and its Moore
/// neighbors (highest fresh grass; ties go to the lowest row-major index,
/// whether or not that is the current cell), eats, pays upkeep, and dies at
/// zero energy.
inline void cow_step(AgentContext& ctx, const PastoralParams& p) {
    using namespace pastoral;
    const SimulationState& s = ctx.state();
    const Cell here = ctx.location();

    std::vector<Cell> candidates = ctx.neighbors();
    candidates.push_back(here);
    std::size_t best = s.grid.index_of(here);
    double best_fresh = s.patch_real(best, fresh);
    for (Cell c : candidates) {
        const std::size_t idx = s.grid.index_of(c);
        const double f = s.patch_real(idx, fresh);
        if (f > best_fresh || (f == best_fresh && idx < best)) {
            best = idx;
            best_fresh = f;
        }
    }
    const Cell dest = s.grid.cell_at(best);
    const bool moved = dest != here;
    if (moved) ctx.move_to(dest);

    const double scale = static_cast<double>(p.herd_scale);
    const double bite = p.bite * scale;
    double& f = std::get<double>(ctx.patch(best, fresh));
    double& d = std::get<double>(ctx.patch(best, dry));
    const double from_fresh = std::min(bite, f);
    f -= from_fresh;
    double from_dry = 0.0;
    if (from_fresh < bite) {
        from_dry = std::min(bite - from_fresh, d);
        d -= from_dry;
    }

    double e = std::get<double>(ctx.attr(energy));
    e += p.energy_yield * (from_fresh + from_dry) - (moved ? p.move_cost : 0.0) - p.metabolism * scale;
    ctx.set_attr(energy, make_real(e));
    if (e <= 0.0) ctx.die();
}

/// Trees never move or die; biomass follows the water on their patch.
inline void tree_step(AgentContext& ctx) {
    using namespace pastoral;
    const double h = ctx.state().patch_real(ctx.state().grid.index_of(ctx.location()), humidity);
    const double b = std::get<double>(ctx.attr(biomass));
    ctx.set_attr(biomass, make_real(b + 0.1 * h));
}

inline Model make_pastoral() {
    using namespace pastoral;
    const PastoralParams d;
    Model m;
    m.name = "pastoral";
    m.description = "Pastoral unit: ground water, fresh and dry grass, grazing cows and water-drawing trees. "
                    "One tick is about one week.";
    m.params = {
        int_attr("width", d.width, 1, 1000, "grid columns"),
        int_attr("height", d.height, 1, 1000, "grid rows"),
        symbol_attr("topology", {"bounded", "torus"}, "bounded", "edge handling"),
        int_attr("season_length", d.season_length, 1, 10000, "S: ticks per seasonal cycle"),
        int_attr("wet_length", d.wet_length, 0, 10000, "W: wet ticks at the start of each cycle"),
        real_attr("rain", d.rain, 0, 1, "r0: humidity gained per wet tick"),
        real_attr("evaporation", d.evaporation, 0, 1, "e0: humidity lost per tick"),
        real_attr("tree_uptake", d.tree_uptake, 0, 1, "u_tree: humidity drawn per tree on the patch"),
        real_attr("grass_growth", d.grass_growth, 0, 1, "g0: growth rate of fresh grass"),
        real_attr("drying_threshold", d.drying_threshold, 0, 1, "h_dry: humidity below which grass dries"),
        real_attr("drying_rate", d.drying_rate, 0, 1, "delta: fraction of fresh grass drying per tick"),
        real_attr("dry_decay", d.dry_decay, 0, 1, "mu: fraction of dry grass lost per tick"),
        real_attr("bite", d.bite, 0, 1, "b_max: grass one cow eats per tick"),
        real_attr("energy_yield", d.energy_yield, 0, 1, "y: energy per unit of grass eaten"),
        real_attr("move_cost", d.move_cost, 0, 1, "c_move: energy spent on a move"),
        real_attr("initial_energy", d.initial_energy, 0.000001, 1000, "E0: energy of a new cow"),
        real_attr("metabolism", d.metabolism, 0, 1, "energy upkeep per tick, scaled by herd_scale"),
        int_attr("herd_size", d.herd_size, 0, 100000, "number of cows"),
        int_attr("tree_count", d.tree_count, 0, 100000, "number of trees"),
        int_attr("herd_scale", d.herd_scale, 1, 1000, "animals per cow agent; scales bite and upkeep"),
    };
    m.check_params = [](const ParamSet& ps) {
        if (param_int(ps, "wet_length") > param_int(ps, "season_length")) {
            fail(Errc::out_of_range, "wet_length must not exceed season_length");
        }
    };
    m.patch_schema = {
        real_attr("humidity", 0.0, 0, 1, "ground water, 0 dry to 1 saturated"),
        real_attr("fresh", 0.0, 0, 1, "fresh grass cover"),
        real_attr("dry", 0.0, 0, 1, "dry grass cover"),
    };
    m.agent_schemas = {
        {"cow", {real_attr("energy", d.initial_energy, std::nullopt, std::nullopt, "dies at or below 0")}},
        {"tree", {real_attr("biomass", 0.0, 0, std::nullopt, "grows with ground water")}},
    };

    m.initializer = [](const Model& model, SimulationState& s) {
        const PastoralParams p = PastoralParams::from(s.params);
        allocate_patches(model, s, {p.width, p.height, p.topology});
        for (std::size_t c = 0; c < s.grid.cell_count(); ++c) {
            s.patch_value(c, humidity) = make_real(s.rng.uniform());
            s.patch_value(c, fresh) = make_real(0.5 * s.rng.uniform());
            s.patch_value(c, dry) = make_real(0.5 * s.rng.uniform());
        }
        auto random_cell = [&] {
            const int row = static_cast<int>(s.rng.below(static_cast<std::uint64_t>(p.height)));
            const int col = static_cast<int>(s.rng.below(static_cast<std::uint64_t>(p.width)));
            return Cell{row, col};
        };
        for (std::int64_t i = 0; i < p.herd_size; ++i) {
            spawn_agent(model, s, "cow", random_cell());
            s.agents.back().attrs[energy] = make_real(p.initial_energy);
        }
        for (std::int64_t i = 0; i < p.tree_count; ++i) {
            spawn_agent(model, s, "tree", random_cell());
        }
    };

    m.patch_rule = [](const PatchView& view, std::span<AttributeValue> next) {
        const SimulationState& prev = view.prev;
        const PastoralParams p = PastoralParams::from(prev.params);
        const std::size_t n = prev.patch_fields;
        for (std::size_t c = 0; c < prev.grid.cell_count(); ++c) {
            const auto trees = static_cast<std::int64_t>(view.occupancy.count(prev, c, "tree"));
            const double h = water_update(prev.patch_real(c, humidity), view.tick, trees, p);
            const Grass g = grass_update(prev.patch_real(c, fresh), prev.patch_real(c, dry), h, p);
            next[c * n + humidity] = make_real(h);
            next[c * n + fresh] = make_real(g.fresh);
            next[c * n + dry] = make_real(g.dry);
        }
    };

    m.agent_rules = {
        {"cow", [](AgentContext& ctx) { cow_step(ctx, PastoralParams::from(ctx.state().params)); }},
        {"tree", [](AgentContext& ctx) { tree_step(ctx); }},
    };

    auto patch_sum = [](std::size_t field) {
        return [field](const SimulationState& s) {
            double total = 0.0;
            for (std::size_t c = 0; c < s.grid.cell_count(); ++c) total += s.patch_real(c, field);
            return total;
        };
    };
    m.probes = {
        {"fresh_grass", patch_sum(fresh)},
        {"dry_grass", patch_sum(dry)},
        {"mean_humidity",
         [patch_sum](const SimulationState& s) {
             return patch_sum(humidity)(s) / static_cast<double>(s.grid.cell_count());
         }},
        {"cows",
         [](const SimulationState& s) {
             return static_cast<double>(
                 std::count_if(s.agents.begin(), s.agents.end(), [](const Agent& a) { return a.id.kind == "cow"; }));
         }},
        {"herd_energy",
         [](const SimulationState& s) {
             double total = 0.0;
             for (const Agent& a : s.agents) {
                 if (a.id.kind == "cow") total += std::get<double>(a.attrs[energy]);
             }
             return total;
         }},
    };

    const AgentPainter cow = [](const SimulationState&, const Agent&) {
        return VisualAttrs{cow_red, Shape::circle, cow_size};
    };
    const AgentPainter tree = [](const SimulationState&, const Agent&) {
        return VisualAttrs{tree_pink, Shape::circle, tree_size};
    };
    auto pov = [&](std::string name, PatchPainter patch) {
        return PointOfView{std::move(name), std::move(patch), {{"cow", cow}, {"tree", tree}}};
    };
    m.povs = {
        pov("grass",
            [](const SimulationState& s, std::size_t c) {
                return VisualAttrs{grass_color(s.patch_real(c, fresh), s.patch_real(c, dry)), Shape::cell_fill, 1.0};
            }),
        pov("humidity",
            [](const SimulationState& s, std::size_t c) {
                return VisualAttrs{humidity_color(s.patch_real(c, humidity)), Shape::cell_fill, 1.0};
            }),
        pov("fresh_grass",
            [](const SimulationState& s, std::size_t c) {
                return VisualAttrs{fresh_color(s.patch_real(c, fresh)), Shape::cell_fill, 1.0};
            }),
        pov("dry_grass",
            [](const SimulationState& s, std::size_t c) {
                return VisualAttrs{dry_color(s.patch_real(c, dry)), Shape::cell_fill, 1.0};
            }),
    };
    return m;
}

}  // namespace tessera::models
