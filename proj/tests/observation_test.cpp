#include "support/test_util.hpp"

#include <tessera/observation.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace tessera;
using namespace tessera::models;

TEST(Probes, BlinkerCountsAndConservation) {
    auto s = testutil::gol_board({".....", "..#..", "..#..", "..#..", "....."}, "bounded");
    EXPECT_EQ(s.probes.at("alive").value, 3.0);
    for (int t = 0; t < 10; ++t) {
        ASSERT_EQ(s.probes.at("alive").value + s.probes.at("dead").value, 25.0);
        s = step(testutil::gol(), s);
    }
}

TEST(Probes, FreshGrassEqualsSumOverDecodedPatches) {
    const auto& m = testutil::pastoral();
    const auto s = init_simulation(m, {}, 7);
    // Recompute from the serialized dump, not from the live state.
    const auto dump = deserialize(serialize(s));
    double total = 0.0;
    for (std::size_t c = 0; c < dump.grid.cell_count(); ++c) {
        total += std::get<double>(dump.patches[c * dump.patch_fields + 1]);
    }
    EXPECT_EQ(s.probes.at("fresh_grass").value, total);
}

TEST(Probes, FailingExpressionBecomesErrorEntry) {
    const auto s = init_simulation(testutil::gol(), {}, 1);
    const std::vector<ProbeDef> defs{
        {"ok", [](const SimulationState&) { return 1.0; }},
        {"bad", [](const SimulationState&) -> double { throw std::runtime_error("boom"); }},
    };
    const auto rec = sample_probes(s, defs);
    EXPECT_TRUE(rec.at("ok").ok());
    EXPECT_FALSE(rec.at("bad").ok());
    EXPECT_NE(rec.at("bad").error.find("boom"), std::string::npos);
}

TEST(Probes, StoredSampleMatchesReevaluationOnSnapshot) {
    for (const Model& m : models::all()) {
        auto s = init_simulation(m, {}, 3);
        for (int t = 0; t < 20; ++t) {
            s = step(m, s);
            ASSERT_EQ(sample_probes(m, deserialize(serialize(s))), s.probes) << m.name;
        }
    }
}

TEST(Csv, BlinkerFormat) {
    ProbeSeries alive{"alive", {}};
    alive.append(0, 3);
    alive.append(1, 3);
    EXPECT_EQ(export_csv({alive}), "tick,alive\n0,3\n1,3\n");
}

TEST(Csv, Errors) {
    try {
        export_csv({});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::invalid_argument);
    }
    ProbeSeries a{"a", {{0, 1.0}, {1, 2.0}}};
    ProbeSeries b{"b", {{0, 1.0}}};
    try {
        export_csv({a, b});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::dimension_mismatch);
    }
    EXPECT_THROW(a.append(1, 0.0), Error);
}

TEST(Csv, RoundTripOfRecordedRun) {
    const auto& m = testutil::pastoral();
    ProbeRecorder rec(m);
    auto s = init_simulation(m, {}, 9);
    rec.observe(s);
    for (int t = 0; t < 40; ++t) {
        s = step(m, s);
        rec.observe(s);
    }
    const auto text = export_csv(rec.series());
    EXPECT_EQ(parse_csv(text), rec.series());
    EXPECT_EQ(text.find('\r'), std::string::npos);
}

TEST(Render, GameOfLifeColors) {
    const auto s = testutil::gol_board({"#.", ".."}, "bounded");
    const auto frame = render_pov(testutil::gol(), s, "life");
    EXPECT_EQ(frame.width, 2);
    EXPECT_EQ(frame.height, 2);
    ASSERT_EQ(frame.cells.size(), 4u);
    EXPECT_EQ(frame.cells[0].color, (Rgb{0, 160, 0}));
    EXPECT_EQ(frame.cells[1].color, (Rgb{0, 0, 0}));
    EXPECT_EQ(frame.cells[0].shape, Shape::cell_fill);
}

TEST(Render, HumidityRampEndpoints) {
    const auto& m = testutil::pastoral();
    auto s = init_simulation(m, {{"width", make_int(2)}, {"height", make_int(1)}}, 1);
    s = set_attribute(m, s, patch_id(s.grid, {0, 0}), "humidity", make_real(0.0));
    s = set_attribute(m, s, patch_id(s.grid, {0, 1}), "humidity", make_real(1.0));
    const auto frame = render_pov(m, s, "humidity");
    EXPECT_EQ(frame.cells[0].color, (Rgb{255, 255, 255}));
    EXPECT_EQ(frame.cells[1].color, (Rgb{0, 0, 255}));
}

TEST(Render, GrassMixIsProportional) {
    EXPECT_EQ(pastoral::grass_color(0, 0), (Rgb{255, 255, 255}));
    EXPECT_EQ(pastoral::grass_color(1, 0), pastoral::green);
    EXPECT_EQ(pastoral::grass_color(0, 1), pastoral::yellow);
    // Half green, half yellow.
    EXPECT_EQ(pastoral::grass_color(0.5, 0.5), (Rgb{115, 180, 0}));
}

TEST(Render, AgentsInIdOrderWithFixedGlyphs) {
    const auto& m = testutil::pastoral();
    const auto s = init_simulation(m, {}, 4);
    const auto frame = render_pov(m, s, "grass");
    ASSERT_EQ(frame.agents.size(), s.agents.size());
    for (std::size_t i = 1; i < frame.agents.size(); ++i) {
        EXPECT_LT(frame.agents[i - 1].id.index, frame.agents[i].id.index);
    }
    for (const auto& g : frame.agents) {
        if (g.id.kind == "cow") {
            EXPECT_EQ(g.visual.color, pastoral::cow_red);
            EXPECT_EQ(g.visual.size, 0.6);
        } else {
            EXPECT_EQ(g.visual.color, pastoral::tree_pink);
            EXPECT_EQ(g.visual.size, 0.5);
        }
        EXPECT_EQ(g.visual.shape, Shape::circle);
    }
}

TEST(Render, PointsOfViewAreIndependentAndPure) {
    const auto& m = testutil::pastoral();
    const auto s = run(m, init_simulation(m, {}, 4), 5);
    const auto before = state_hash(s);
    const auto grass1 = render_pov(m, s, "grass");
    const auto humid1 = render_pov(m, s, "humidity");
    const auto humid2 = render_pov(m, s, "humidity");
    const auto grass2 = render_pov(m, s, "grass");
    EXPECT_EQ(grass1, grass2);
    EXPECT_EQ(humid1, humid2);
    EXPECT_EQ(state_hash(s), before);
}

TEST(Render, UnknownPovAndUnknownAgentClass) {
    const auto& m = testutil::pastoral();
    const auto s = init_simulation(m, {}, 4);
    try {
        render_pov(m, s, "nope");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::unknown_pov);
    }
    PointOfView bad{"bad", nullptr, {{"goat", [](const SimulationState&, const Agent&) { return VisualAttrs{}; }}}};
    try {
        render_pov(m, s, bad);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::unknown_entity);
    }
}
