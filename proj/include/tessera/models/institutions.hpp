#pragma once

#include "tessera/model.hpp"

#include <bit>
#include <cstdint>

namespace tessera::models {

// Institutions exchanging information tokens over directed, possibly lossy
// channels. Holdings are a bitmask (bit k = token k); tokens are opaque and
// never forgotten.
namespace institutions {

inline constexpr std::string_view kind = "institution";
inline constexpr std::string_view topic = "token";
inline constexpr std::size_t tokens = 0;

inline std::int64_t holdings(const Agent& a) { return std::get<std::int64_t>(a.attrs[tokens]); }

inline void announce(AgentContext& ctx) {
    const std::int64_t held = std::get<std::int64_t>(ctx.attr(tokens));
    for (int k = 0; k < 63; ++k) {
        if (held & (std::int64_t{1} << k)) ctx.broadcast(std::string(topic), make_int(k));
    }
}

}  // namespace institutions

/// Reads this tick's inbox into the holdings first, then broadcasts every
/// held token, so a token crosses one channel per tick.
inline void institution_step(AgentContext& ctx) {
    using namespace institutions;
    std::int64_t held = std::get<std::int64_t>(ctx.attr(tokens));
    for (const Message& m : ctx.inbox()) {
        if (m.topic != topic) continue;
        if (const auto* k = std::get_if<std::int64_t>(&m.payload); k && *k >= 0 && *k < 63) {
            held |= std::int64_t{1} << *k;
        }
    }
    ctx.set_attr(tokens, make_int(held));
    announce(ctx);
}

/// Fraction of (agent, token) pairs currently held.
inline double coverage(const SimulationState& s) {
    const auto n_tokens = std::get<std::int64_t>(s.params.at("tokens"));
    if (s.agents.empty() || n_tokens == 0) return 0.0;
    double held = 0.0;
    for (const Agent& a : s.agents) held += std::popcount(static_cast<std::uint64_t>(institutions::holdings(a)));
    return held / (static_cast<double>(s.agents.size()) * static_cast<double>(n_tokens));
}

inline Model make_institutions() {
    using namespace institutions;
    Model m;
    m.name = "institutions";
    m.description = "Institutions sharing information tokens over directed communication channels. "
                    "Agent i sits at (0, i); the source announces its tokens at tick 0.";
    m.params = {
        int_attr("agents", 6, 2, 256, "number of institutions"),
        symbol_attr("network", {"chain", "ring", "star", "complete", "random"}, "chain",
                    "channel layout: chain i->i+1; ring adds last->0; star links 0<->i; complete all pairs; "
                    "random each ordered pair with link_probability"),
        real_attr("reliability", 1.0, 0, 1, "delivery probability of every channel"),
        real_attr("link_probability", 0.3, 0, 1, "pair probability for the random network"),
        int_attr("tokens", 1, 1, 62, "distinct tokens, all initially held by the source"),
        int_attr("source", 0, 0, 255, "index of the institution holding the tokens at start"),
    };
    m.check_params = [](const ParamSet& ps) {
        if (param_int(ps, "source") >= param_int(ps, "agents")) {
            fail(Errc::out_of_range, "source must be below agents");
        }
    };
    m.patch_schema = {};
    m.agent_schemas = {{std::string(kind), {int_attr("tokens", 0, 0, std::nullopt, "bitmask of held tokens")}}};

    m.initializer = [](const Model& model, SimulationState& s) {
        const auto n = static_cast<int>(param_int(s.params, "agents"));
        const double reliability = param_real(s.params, "reliability");
        const std::string& network = param_symbol(s.params, "network");
        allocate_patches(model, s, {n, 1, Topology::bounded});
        std::vector<EntityId> ids;
        for (int i = 0; i < n; ++i) ids.push_back(spawn_agent(model, s, kind, {0, i}));

        auto link = [&](int a, int b) { add_channel_in_place(s, ids[a], ids[b], reliability); };
        if (network == "chain" || network == "ring") {
            for (int i = 0; i + 1 < n; ++i) link(i, i + 1);
            if (network == "ring") link(n - 1, 0);
        } else if (network == "star") {
            for (int i = 1; i < n; ++i) {
                link(0, i);
                link(i, 0);
            }
        } else {
            const double p = network == "complete" ? 1.0 : param_real(s.params, "link_probability");
            for (int a = 0; a < n; ++a) {
                for (int b = 0; b < n; ++b) {
                    if (a == b) continue;
                    if (network == "complete" || s.rng.bernoulli(p)) link(a, b);
                }
            }
        }

        const auto source = static_cast<std::size_t>(param_int(s.params, "source"));
        const auto n_tokens = param_int(s.params, "tokens");
        s.agents[source].attrs[tokens] = make_int((std::int64_t{1} << n_tokens) - 1);
        AgentContext ctx(model, s, source);
        announce(ctx);
    };

    m.agent_rules = {{std::string(kind), [](AgentContext& ctx) { institution_step(ctx); }}};

    m.probes = {
        {"coverage", coverage},
        {"informed",
         [](const SimulationState& s) {
             const auto all = (std::int64_t{1} << std::get<std::int64_t>(s.params.at("tokens"))) - 1;
             return static_cast<double>(std::count_if(s.agents.begin(), s.agents.end(),
                                                      [&](const Agent& a) { return holdings(a) == all; }));
         }},
        {"in_transit",
         [](const SimulationState& s) {
             double n = 0.0;
             for (const auto& [_, box] : s.mailboxes) n += static_cast<double>(box.pending.size());
             return n;
         }},
    };

    static constexpr Rgb grey{170, 170, 170};
    static constexpr Rgb orange{255, 140, 0};
    static constexpr Rgb pale{245, 245, 245};
    static constexpr Rgb reached{150, 220, 150};
    m.povs = {
        {"holdings",
         [](const SimulationState&, std::size_t) { return VisualAttrs{pale, Shape::cell_fill, 1.0}; },
         {{std::string(kind),
           [](const SimulationState& s, const Agent& a) {
               const double all = static_cast<double>(std::get<std::int64_t>(s.params.at("tokens")));
               const double held = std::popcount(static_cast<std::uint64_t>(holdings(a)));
               return VisualAttrs{lerp(grey, orange, held / all), Shape::circle, 0.8};
           }}}},
        {"reach",
         [](const SimulationState& s, std::size_t c) {
             for (const Agent& a : s.agents) {
                 if (s.grid.index_of(a.location) == c) {
                     return VisualAttrs{holdings(a) & 1 ? reached : pale, Shape::cell_fill, 1.0};
                 }
             }
             return VisualAttrs{pale, Shape::cell_fill, 1.0};
         },
         {{std::string(kind),
           [](const SimulationState&, const Agent&) { return VisualAttrs{{40, 40, 40}, Shape::circle, 0.3}; }}}},
    };
    return m;
}

}  // namespace tessera::models
